use super::Mesh;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// The pencil `(A, M)`: stiffness realizing the energy form and lumped mass
/// realizing the `L^2` inner product. Generalized eigenpairs `A v = lambda M v`
/// approximate the Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub stiffness: CsrMatrix,
    pub mass: Vec<f64>,
}

/// Assembles the stiffness matrix segment by segment. Dirichlet endpoints
/// only contribute to the diagonal of their neighbour.
pub fn assemble(mesh: &Mesh) -> DiscreteOperator {
    let n = mesh.len();
    let mut triplets = Vec::with_capacity(4 * mesh.segments.len());
    for s in &mesh.segments {
        let c = s.conductance;
        if let Some(a) = s.a {
            triplets.push((a, a, c));
        }
        if let Some(b) = s.b {
            triplets.push((b, b, c));
        }
        if let (Some(a), Some(b)) = (s.a, s.b) {
            triplets.push((a, b, -c));
            triplets.push((b, a, -c));
        }
    }
    DiscreteOperator { stiffness: CsrMatrix::from_triplets(n, triplets), mass: mesh.masses() }
}

/// `v^T A v`.
pub fn dirichlet_energy(op: &DiscreteOperator, v: &[f64]) -> Result<f64> {
    op.check_dim(v.len())?;
    Ok(dot(v, &op.stiffness.mul_vec(v)))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            Err(Error::DimensionMismatch { expected: self.dim(), got })
        } else {
            Ok(())
        }
    }

    /// `<u, v>_M`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.mass).map(|((a, b), m)| a * b * m).sum()
    }

    pub fn mass_norm(&self, v: &[f64]) -> f64 {
        self.inner(v, v).sqrt()
    }

    /// `M^{-1} A v`, the action of the discrete Laplacian.
    pub fn laplacian(&self, v: &[f64]) -> Vec<f64> {
        self.stiffness.mul_vec(v).iter().zip(&self.mass).map(|(a, m)| a / m).collect()
    }

    /// `|| M^{-1/2} (A v - lambda M v) ||`, the residual in the symmetric
    /// standard form.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let av = self.stiffness.mul_vec(v);
        av.iter()
            .zip(v)
            .zip(&self.mass)
            .map(|((a, x), m)| {
                let r = a - lambda * m * x;
                r * r / m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Upper bound on the largest eigenvalue of the pencil.
    pub fn norm_estimate(&self) -> f64 {
        let inv: Vec<f64> = self.mass.iter().map(|m| 1.0 / m).collect();
        self.stiffness.gershgorin(&inv)
    }
}

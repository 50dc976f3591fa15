use nalgebra::SymmetricEigen;

use super::EigenPairs;
use crate::error::{Error, Result};
use crate::metric_graph::DiscreteOperator;

/// Largest pencil handed to the dense solver.
pub const DENSE_THRESHOLD: usize = 4000;

pub(crate) fn check_mass(op: &DiscreteOperator) -> Result<()> {
    match op.mass.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
        Some(node) => Err(Error::NotPositiveMass { node }),
        None => Ok(()),
    }
}

/// Every eigenpair of `(A, M)`, via the symmetric matrix `M^{-1/2} A M^{-1/2}`.
pub fn solve_dense_all(op: &DiscreteOperator) -> Result<EigenPairs> {
    let n = op.dim();
    if n > DENSE_THRESHOLD {
        return Err(Error::TooLargeForDense { nodes: n, threshold: DENSE_THRESHOLD });
    }
    check_mass(op)?;
    let scale: Vec<f64> = op.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut s = op.stiffness.to_dense();
    for r in 0..n {
        for c in 0..n {
            s[(r, c)] *= scale[r] * scale[c];
        }
    }
    // exact symmetry for the solver
    for r in 0..n {
        for c in 0..r {
            let avg = 0.5 * (s[(r, c)] + s[(c, r)]);
            s[(r, c)] = avg;
            s[(c, r)] = avg;
        }
    }
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let col = eig.eigenvectors.column(i);
            // fix the sign so the first significant entry is positive
            let pivot = col.iter().copied().find(|x| x.abs() > 1e-8).unwrap_or(1.0);
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            col.iter().zip(&scale).map(|(y, s)| sign * y * s).collect()
        })
        .collect();
    Ok(EigenPairs { values, vectors })
}

/// The `k` smallest eigenpairs.
pub fn solve_dense(op: &DiscreteOperator, k: usize) -> Result<EigenPairs> {
    let mut all = solve_dense_all(op)?;
    all.truncate(k);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::{assemble, discretize, Boundary, MetricGraph};
    use crate::sparse::CsrMatrix;

    #[test]
    fn three_node_dirichlet_path() {
        let g = MetricGraph::interval(1.0, Boundary::Dirichlet, Boundary::Dirichlet);
        let op = assemble(&discretize(&g, 0.25).unwrap());
        let eig = solve_dense(&op, 3).unwrap();
        let h: f64 = 0.25;
        for (k, &l) in eig.values.iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - ((k + 1) as f64 * std::f64::consts::PI * h).cos());
            assert!((l - exact).abs() < 1e-12 * exact, "{l} vs {exact}");
        }
        assert!((eig.values[1] - 32.0).abs() < 1e-12);
        assert!(eig.max_relative_residual(&op) < 1e-12);
        assert!(eig.max_orthogonality_defect(&op) < 1e-12);
    }

    #[test]
    fn one_by_one() {
        let op = DiscreteOperator { stiffness: CsrMatrix::from_triplets(1, vec![(0, 0, 2.0)]), mass: vec![1.0] };
        assert_eq!(solve_dense(&op, 1).unwrap().values, vec![2.0]);
    }

    #[test]
    fn neumann_ground_state_is_constant() {
        let g = MetricGraph::interval(1.0, Boundary::Neumann, Boundary::Neumann);
        let op = assemble(&discretize(&g, 0.1).unwrap());
        let eig = solve_dense(&op, 1).unwrap();
        assert!(eig.values[0].abs() < 1e-10);
        let v = &eig.vectors[0];
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-10));
    }

    #[test]
    fn rejects_bad_mass() {
        let op = DiscreteOperator { stiffness: CsrMatrix::from_triplets(1, vec![(0, 0, 2.0)]), mass: vec![0.0] };
        assert!(matches!(solve_dense(&op, 1), Err(Error::NotPositiveMass { node: 0 })));
    }
}

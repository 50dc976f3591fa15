//! Shift-invert Lanczos with full reorthogonalization and locking.
//!
//! The iteration runs on `S = M^{1/2} (A + sigma M)^{-1} M^{1/2}`, whose largest
//! eigenvalues `theta = 1 / (lambda + sigma)` belong to the smallest `lambda`.
//! A single Krylov space only sees one direction per eigenspace, so converged
//! vectors are locked and the iteration restarts from a fresh random vector
//! orthogonal to them. The search stops once a restart turns up nothing below
//! the current bound, which also recovers every copy of a repeated eigenvalue.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::check_mass;
use super::{EigenPairs, Target};
use crate::error::{Error, Result};
use crate::metric_graph::DiscreteOperator;
use crate::sparse::{CsrMatrix, SkylineCholesky};

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    /// `sigma > 0` so that `A + sigma M` is positive definite.
    pub shift: f64,
    /// Ritz residual tolerance, relative to the largest Ritz value.
    pub tol: f64,
    /// Krylov steps allowed per restart.
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { shift: 1.0, tol: 1e-12, max_steps: 400, seed: 0x5eed_1a2c }
    }
}

struct ShiftInvert {
    factor: SkylineCholesky,
    sqrt_mass: Vec<f64>,
}

impl ShiftInvert {
    fn new(op: &DiscreteOperator, shift: f64) -> Result<Self> {
        let n = op.dim();
        let mut triplets = Vec::with_capacity(op.stiffness.nnz() + n);
        for r in 0..n {
            triplets.extend(op.stiffness.row(r).map(|(c, v)| (r, c, v)));
            triplets.push((r, r, shift * op.mass[r]));
        }
        let k = CsrMatrix::from_triplets(n, triplets);
        let factor = SkylineCholesky::factor(&k).map_err(|_| Error::NoConvergence { iterations: 0 })?;
        Ok(ShiftInvert { factor, sqrt_mass: op.mass.iter().map(|m| m.sqrt()).collect() })
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&self.sqrt_mass).map(|(a, s)| a * s).collect();
        let z = self.factor.solve(&y);
        z.iter().zip(&self.sqrt_mass).map(|(a, s)| a * s).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

struct Ritz {
    lambda: f64,
    vector: Vec<f64>,
}

/// One Krylov run in the complement of `locked`. Returns the leading
/// converged Ritz pairs (ascending in lambda) once `enough` accepts them, or
/// all exact pairs if the Krylov space becomes invariant.
fn run(
    si: &ShiftInvert,
    locked: &[Vec<f64>],
    start: Vec<f64>,
    opts: &LanczosOptions,
    enough: &dyn Fn(&[f64], bool) -> bool,
    iterations: &mut usize,
) -> Result<Vec<Ritz>> {
    let n = start.len();
    let available = n - locked.len();
    let max_steps = opts.max_steps.min(available);
    let mut q = start;
    orthogonalize(&mut q, locked);
    let norm = dot(&q, &q).sqrt();
    if norm < 1e-10 || max_steps == 0 {
        return Ok(Vec::new());
    }
    q.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    loop {
        *iterations += 1;
        let mut w = si.apply(&q);
        let a = dot(&q, &w);
        axpy(-a, &q, &mut w);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(-b, prev, &mut w);
        }
        basis.push(q);
        alpha.push(a);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        let steps = basis.len();
        let scale = alpha.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let exhausted = b <= 1e-13 * scale.max(f64::MIN_POSITIVE) || steps == available;

        if exhausted || steps == max_steps || steps.is_multiple_of(4) {
            let mut t = DMatrix::zeros(steps, steps);
            for i in 0..steps {
                t[(i, i)] = alpha[i];
                if i + 1 < steps {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..steps).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let theta_max = eig.eigenvalues[order[0]].abs();
            let mut prefix = Vec::new();
            for &i in &order {
                let theta = eig.eigenvalues[i];
                let resid = if exhausted { 0.0 } else { (b * eig.eigenvectors[(steps - 1, i)]).abs() };
                if theta <= 0.0 || resid > opts.tol * theta_max {
                    break;
                }
                prefix.push(i);
            }
            let lambdas: Vec<f64> = prefix.iter().map(|&i| 1.0 / eig.eigenvalues[i] - opts.shift).collect();
            if exhausted || enough(&lambdas, false) {
                return Ok(prefix
                    .iter()
                    .zip(&lambdas)
                    .map(|(&i, &lambda)| {
                        let mut v = vec![0.0; n];
                        for (j, qj) in basis.iter().enumerate() {
                            axpy(eig.eigenvectors[(j, i)], qj, &mut v);
                        }
                        Ritz { lambda, vector: v }
                    })
                    .collect());
            }
            if steps == max_steps {
                return Err(Error::NoConvergence { iterations: *iterations });
            }
        }
        beta.push(b);
        q = w.into_iter().map(|x| x / b).collect();
    }
}

/// Smallest eigenpairs of `(A, M)` by shift-invert Lanczos.
pub fn lanczos(op: &DiscreteOperator, target: Target, opts: &LanczosOptions) -> Result<EigenPairs> {
    check_mass(op)?;
    let n = op.dim();
    if n == 0 {
        return Ok(EigenPairs { values: vec![], vectors: vec![] });
    }
    let si = ShiftInvert::new(op, opts.shift)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0;

    loop {
        let (bound, want) = match target {
            Target::Count(k) if locked.len() < k => (f64::INFINITY, k - locked.len()),
            Target::Count(k) => {
                let mut sorted = locked_vals.clone();
                sorted.sort_by(f64::total_cmp);
                (sorted[k - 1], 0)
            }
            Target::UpTo(b) => (b, 0),
        };
        let enough = |lambdas: &[f64], _: bool| {
            if bound.is_finite() {
                lambdas.iter().any(|&l| l > bound)
            } else {
                lambdas.len() >= want
            }
        };
        let start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ritz = run(&si, &locked, start, opts, &enough, &mut iterations)?;
        let fresh: Vec<Ritz> = if bound.is_finite() {
            ritz.into_iter().filter(|r| r.lambda <= bound).collect()
        } else {
            ritz.into_iter().take(want).collect()
        };
        if fresh.is_empty() {
            break;
        }
        for r in fresh {
            locked_vals.push(r.lambda);
            locked.push(r.vector);
        }
        if locked.len() >= n {
            break;
        }
    }

    // back to the generalized problem, Rayleigh quotients for the values
    let mut pairs: Vec<(f64, Vec<f64>)> = locked
        .into_iter()
        .map(|y| {
            let v: Vec<f64> = y.iter().zip(&si.sqrt_mass).map(|(a, s)| a / s).collect();
            let mm = op.inner(&v, &v);
            let lambda = dot(&v, &op.stiffness.mul_vec(&v)) / mm;
            let norm = mm.sqrt();
            (lambda, v.into_iter().map(|x| x / norm).collect())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    match target {
        Target::Count(k) => pairs.truncate(k),
        Target::UpTo(b) => pairs.retain(|p| p.0 <= b),
    }
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenPairs { values, vectors })
}

/// The `k` smallest eigenpairs; `tol` is the Ritz residual tolerance.
pub fn solve_lanczos(op: &DiscreteOperator, k: usize, tol: f64) -> Result<EigenPairs> {
    lanczos(op, Target::Count(k), &LanczosOptions { tol, ..LanczosOptions::default() })
}

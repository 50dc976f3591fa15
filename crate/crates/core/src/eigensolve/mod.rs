//! Generalized symmetric eigensolvers for the pencils produced by
//! [`crate::metric_graph::assemble`], and the bookkeeping around their output:
//! clustering into multiplicities, counting functions, nesting and
//! comparison reports.

mod compare;
mod dense;
mod lanczos;
mod spectrum;
mod split;

pub use compare::{
    compare_spectra, convergence_ratios, richardson, verify_nesting, CompareOptions, CompareReport,
    ConvergenceRow, FdModel, MatchRow, NestingReport,
};
pub use dense::{solve_dense, solve_dense_all, DENSE_THRESHOLD};
pub use lanczos::{lanczos, solve_lanczos, LanczosOptions};
pub use spectrum::{cluster, cluster_tagged, counting_function, Origin, SpectrumEntry, SpectrumList, Tag};
pub use split::{new_subspace_split, tower_spectra, tower_spectra_with, TaggedPairs};

use crate::error::Result;
use crate::metric_graph::DiscreteOperator;

/// Default relative gap below which numeric eigenvalues are merged.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Eigenvalues in ascending order with `M`-orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// What part of the spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// The `k` smallest eigenpairs.
    Count(usize),
    /// Every eigenpair with eigenvalue at most the bound.
    UpTo(f64),
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest standard-form residual relative to the operator norm estimate.
    pub fn max_relative_residual(&self, op: &DiscreteOperator) -> f64 {
        let scale = op.norm_estimate().max(f64::MIN_POSITIVE);
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&l, v)| op.residual(l, v) / (scale * op.mass_norm(v)))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix (in the mass inner product) from the identity.
    pub fn max_orthogonality_defect(&self, op: &DiscreteOperator) -> f64 {
        let mut worst = 0.0f64;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((op.inner(u, v) - target).abs());
            }
        }
        worst
    }

    pub fn truncate(&mut self, k: usize) {
        self.values.truncate(k);
        self.vectors.truncate(k);
    }
}

/// Dense below [`DENSE_THRESHOLD`] nodes, shift-invert Lanczos above.
pub fn solve(op: &DiscreteOperator, target: Target) -> Result<EigenPairs> {
    solve_with(op, target, &LanczosOptions::default())
}

/// [`solve`] with explicit Lanczos settings for the large case.
pub fn solve_with(op: &DiscreteOperator, target: Target, opts: &LanczosOptions) -> Result<EigenPairs> {
    if op.dim() <= DENSE_THRESHOLD {
        let mut all = solve_dense_all(op)?;
        match target {
            Target::Count(k) => all.truncate(k),
            Target::UpTo(bound) => {
                let k = all.values.partition_point(|&l| l <= bound);
                all.truncate(k);
            }
        }
        Ok(all)
    } else {
        lanczos(op, target, opts)
    }
}

/// Index-paired eigenvalues at pitches `h` and `h/2` and their order-2
/// Richardson extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub values: Vec<f64>,
}

/// Every coarse eigenvalue up to `lambda_max`, paired with the same index on
/// the fine pencil. The lumped scheme underestimates, so the fine list never
/// has fewer entries below the bound.
pub fn extrapolate(
    coarse: &DiscreteOperator,
    fine: &DiscreteOperator,
    lambda_max: f64,
    opts: &LanczosOptions,
) -> Result<Extrapolation> {
    let c = solve_with(coarse, Target::UpTo(lambda_max), opts)?.values;
    let f = solve_with(fine, Target::Count(c.len()), opts)?.values;
    let values = richardson(&c, &f);
    Ok(Extrapolation { coarse: c, fine: f, values })
}

use nalgebra::{DMatrix, SymmetricEigen};

use super::spectrum::{cluster_tagged, Tag};
use super::{solve_with, EigenPairs, LanczosOptions, Target, CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::metric_graph::{DiscreteOperator, FiberStructure, Tower};
use crate::SpectrumList;

/// Eigenpairs classified as pullbacks from the previous level or as new
/// (fiber-mean-zero) vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPairs {
    pub pairs: EigenPairs,
    pub tags: Vec<Tag>,
}

impl TaggedPairs {
    pub fn count(&self, tag: &Tag) -> usize {
        self.tags.iter().filter(|t| *t == tag).count()
    }

    pub fn spectrum(&self) -> SpectrumList {
        cluster_tagged(&self.pairs.values, &self.tags, CLUSTER_TOL)
    }
}

/// Rotates each eigenspace so that `P_i` is diagonal on it, then tags every
/// vector by whether `P_i v = v` or `P_i v = 0` within `tol` (mass norm).
///
/// Eigenspaces must be complete: `P_i` commutes with the pencil, so a full
/// eigenspace is `P_i`-invariant and the rotated vectors split cleanly.
pub fn new_subspace_split(
    pairs: &EigenPairs,
    op: &DiscreteOperator,
    fibers: &FiberStructure,
    tol: f64,
) -> Result<TaggedPairs> {
    let level = fibers.level;
    let mut values = Vec::with_capacity(pairs.len());
    let mut vectors = Vec::with_capacity(pairs.len());
    let mut tags = Vec::with_capacity(pairs.len());
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() {
            let (a, b) = (pairs.values[end - 1], pairs.values[end]);
            if (b - a).abs() > CLUSTER_TOL * a.abs().max(b.abs()).max(1.0) {
                break;
            }
            end += 1;
        }
        let block = &pairs.vectors[start..end];
        let projected: Vec<Vec<f64>> = block.iter().map(|v| fibers.project(v)).collect::<Result<_>>()?;
        let c = block.len();
        let gram = DMatrix::from_fn(c, c, |i, j| 0.5 * (op.inner(&block[i], &projected[j]) + op.inner(&block[j], &projected[i])));
        let eig = SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..c).collect();
        // pullbacks (P = 1) first within an eigenspace
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for &s in &order {
            let n = pairs.vectors[start].len();
            let mut w = vec![0.0; n];
            let mut pw = vec![0.0; n];
            for (a, (v, pv)) in block.iter().zip(&projected).enumerate() {
                let coeff = eig.eigenvectors[(a, s)];
                for k in 0..n {
                    w[k] += coeff * v[k];
                    pw[k] += coeff * pv[k];
                }
            }
            let norm = op.mass_norm(&w);
            let kept = op.mass_norm(&pw) / norm;
            let lost = op.mass_norm(&w.iter().zip(&pw).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm;
            let lambda = pairs.values[start..end].iter().sum::<f64>() / c as f64;
            let tag = if lost <= tol {
                Tag::Pullback
            } else if kept <= tol {
                Tag::New(level)
            } else {
                return Err(Error::UnclassifiableVector { index: start, lambda, residual: kept.min(lost) });
            };
            values.push(pairs.values[start]);
            vectors.push(w.into_iter().map(|x| x / norm).collect());
            tags.push(tag);
        }
        // keep the values in ascending order inside the block
        values[start..end].copy_from_slice(&pairs.values[start..end]);
        start = end;
    }
    Ok(TaggedPairs { pairs: EigenPairs { values, vectors }, tags })
}

/// Eigenpairs up to `lambda_max` on every level of `tower`, classified with
/// [`new_subspace_split`] on levels `1..`. Level-0 pairs are tagged
/// [`Tag::Numeric`], except the constant mode at 0 which is [`Tag::Trivial`].
pub fn tower_spectra(tower: &Tower, lambda_max: f64, tol: f64) -> Result<Vec<TaggedPairs>> {
    tower_spectra_with(tower, lambda_max, tol, &LanczosOptions::default())
}

pub fn tower_spectra_with(tower: &Tower, lambda_max: f64, tol: f64, opts: &LanczosOptions) -> Result<Vec<TaggedPairs>> {
    use rayon::prelude::*;
    (0..tower.operators.len())
        .into_par_iter()
        .map(|level| {
            let op = &tower.operators[level];
            let pairs = solve_with(op, Target::UpTo(lambda_max), opts)?;
            if level == 0 {
                let zero = 1e-8 * lambda_max.abs().max(1.0);
                let tags = pairs.values.iter().map(|&l| if l.abs() <= zero { Tag::Trivial } else { Tag::Numeric }).collect();
                Ok(TaggedPairs { pairs, tags })
            } else {
                new_subspace_split(&pairs, op, &tower.fibers[level - 1], tol)
            }
        })
        .collect()
}

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DiscreteOperator, Mesh, NodeLabel};
use crate::error::{Error, Result};

/// Node correspondence between the meshes of two consecutive levels.
///
/// Every level-`(i-1)` node has either `|G_i|` copies at level `i` or, where
/// it lies in `B_i`, exactly one (glued) image. The fiber measure is uniform,
/// so averaging over the copies is the orthogonal projection `P_i` in the
/// lumped-mass inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberStructure {
    pub level: usize,
    pub fiber_size: usize,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

const MASS_TOL: f64 = 1e-12;

impl FiberStructure {
    /// Matches the nodes of `upper` (level `level`) against `lower`
    /// (level `level - 1`) through their labels: dropping the last fiber
    /// coordinate of an upper node gives its image.
    pub fn between(lower: &Mesh, upper: &Mesh, level: usize, fiber_size: usize) -> Result<Self> {
        if level == 0 || fiber_size == 0 {
            return Err(Error::IncompatibleMesh("level and fiber size must be positive".into()));
        }
        match (lower.pitch, upper.pitch) {
            (Some(a), Some(b)) if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) => {
                return Err(Error::IncompatibleMesh(format!("pitches differ: {a} vs {b}")))
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::IncompatibleMesh("one mesh has no pitch".into()))
            }
            _ => {}
        }
        let index: HashMap<&NodeLabel, usize> =
            lower.nodes.iter().enumerate().map(|(i, n)| (&n.label, i)).collect();
        if index.len() != lower.len() {
            return Err(Error::IncompatibleMesh("duplicate labels in lower mesh".into()));
        }
        let mut parent = Vec::with_capacity(upper.len());
        let mut children = vec![Vec::new(); lower.len()];
        for (ui, node) in upper.nodes.iter().enumerate() {
            if node.label.word.len() != level {
                return Err(Error::IncompatibleMesh(format!(
                    "upper node {ui} has a word of length {} at level {level}",
                    node.label.word.len()
                )));
            }
            let image = NodeLabel { site: node.label.site, word: node.label.word[..level - 1].to_vec() };
            let li = *index
                .get(&image)
                .ok_or_else(|| Error::IncompatibleMesh(format!("upper node {ui} has no image {image:?}")))?;
            parent.push(li);
            children[li].push(ui);
        }
        for (li, kids) in children.iter().enumerate() {
            let share = match kids.len() {
                1 => 1.0,
                k if k == fiber_size => 1.0 / fiber_size as f64,
                k => {
                    return Err(Error::IncompatibleMesh(format!(
                        "lower node {li} has {k} copies, expected 1 or {fiber_size}"
                    )))
                }
            };
            let expected = lower.nodes[li].mass * share;
            for &ui in kids {
                let m = upper.nodes[ui].mass;
                if (m - expected).abs() > MASS_TOL * expected.abs().max(1e-300) {
                    return Err(Error::IncompatibleMesh(format!(
                        "mass {m} at upper node {ui} does not split lower mass {}",
                        lower.nodes[li].mass
                    )));
                }
            }
        }
        Ok(FiberStructure { level, fiber_size, parent, children })
    }

    pub fn upper_len(&self) -> usize {
        self.parent.len()
    }

    pub fn lower_len(&self) -> usize {
        self.children.len()
    }

    /// `phi_i` on nodes.
    pub fn parent(&self, upper_node: usize) -> usize {
        self.parent[upper_node]
    }

    pub fn children(&self, lower_node: usize) -> &[usize] {
        &self.children[lower_node]
    }

    /// Whether the lower node lies in `B_i`.
    pub fn is_glued(&self, lower_node: usize) -> bool {
        self.fiber_size > 1 && self.children[lower_node].len() == 1
    }

    fn check(&self, len: usize, expected: usize) -> Result<()> {
        if len != expected {
            Err(Error::IncompatibleMesh(format!("vector of length {len}, mesh has {expected} nodes")))
        } else {
            Ok(())
        }
    }

    /// `P_i`: replaces each value by the mean over its fiber.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len(), self.upper_len())?;
        let mut out = vec![0.0; v.len()];
        for kids in &self.children {
            let mean = kids.iter().map(|&k| v[k]).sum::<f64>() / kids.len() as f64;
            for &k in kids {
                out[k] = mean;
            }
        }
        Ok(out)
    }

    /// `v - P_i v`, the fiber-mean-zero part.
    pub fn complement(&self, v: &[f64]) -> Result<Vec<f64>> {
        let p = self.project(v)?;
        Ok(v.iter().zip(&p).map(|(a, b)| a - b).collect())
    }

    /// The pullback `phi_i^*`.
    pub fn lift(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u.len(), self.lower_len())?;
        Ok(self.parent.iter().map(|&p| u[p]).collect())
    }

    /// Fiber average pushed down to level `i - 1`.
    pub fn project_down(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len(), self.upper_len())?;
        Ok(self
            .children
            .iter()
            .map(|kids| kids.iter().map(|&k| v[k]).sum::<f64>() / kids.len() as f64)
            .collect())
    }
}

impl FiberStructure {
    /// `|| L P v - P L v ||_M` with `L = M^-1 A` the upper-level Laplacian.
    pub fn commutator(&self, op: &DiscreteOperator, v: &[f64]) -> Result<f64> {
        op.check_dim(self.upper_len())?;
        let lp = op.laplacian(&self.project(v)?);
        let pl = self.project(&op.laplacian(v))?;
        Ok(op.mass_norm(&lp.iter().zip(&pl).map(|(a, b)| a - b).collect::<Vec<_>>()))
    }

    /// Largest [`Self::commutator`] over `count` seeded random vectors of
    /// unit mass norm.
    pub fn max_commutator(&self, op: &DiscreteOperator, count: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..count {
            let v: Vec<f64> = (0..self.upper_len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = op.mass_norm(&v);
            let v: Vec<f64> = v.into_iter().map(|x| x / norm).collect();
            worst = worst.max(self.commutator(op, &v)?);
        }
        Ok(worst)
    }
}

/// Composes the node maps of `fibers` (levels `1..=n` in order) into the
/// map from level-`n` nodes to level-0 nodes.
pub fn compose_parents(fibers: &[FiberStructure]) -> Vec<usize> {
    let Some(top) = fibers.last() else {
        return Vec::new();
    };
    (0..top.upper_len())
        .map(|mut node| {
            for fs in fibers.iter().rev() {
                node = fs.parent(node);
            }
            node
        })
        .collect()
}

//! Sierpinski gasket graphs, spectral decimation, and the Pâte à Choux
//! space: gasket sheets with binary fibers glued along `V_k \ V_{k-1}`.
//!
//! Gasket vertices live on a skew lattice: `(a, b)` stands for
//! `a e_1 + b e_2` with `e_2` at 60 degrees, and the level-`m` gasket has
//! side `2^m`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eigensolve::{self, cluster, tower_spectra, Origin, SpectrumList, TaggedPairs, Target, CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::metric_graph::quotient::{quotient_level, BaseEdge, BaseGraph, BaseVertex, GluingRule, Locus, QuotientGraph};
use crate::metric_graph::{assemble, Boundary, GraphMass, Mesh, NodeLabel, Tower};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasketGraph {
    pub level: usize,
    /// Skew-lattice coordinates, sorted.
    pub vertices: Vec<(i64, i64)>,
    pub edges: Vec<(usize, usize)>,
    /// First `k` with the vertex in `V_k`.
    pub vertex_level: Vec<usize>,
}

fn unit_cells(m: usize) -> Vec<(i64, i64)> {
    let mut cells = vec![(0, 0)];
    for k in 0..m {
        let s = 1i64 << k;
        cells = [(0, 0), (s, 0), (0, s)]
            .iter()
            .flat_map(|&(da, db)| cells.iter().map(move |&(a, b)| (a + da, b + db)))
            .collect();
    }
    cells
}

fn corners_of(cells: &[(i64, i64)]) -> Vec<[(i64, i64); 3]> {
    cells.iter().map(|&(a, b)| [(a, b), (a + 1, b), (a, b + 1)]).collect()
}

pub fn build_gasket(m: usize) -> GasketGraph {
    let tris = corners_of(&unit_cells(m));
    let mut index: BTreeMap<(i64, i64), usize> = tris.iter().flatten().map(|&p| (p, 0)).collect();
    for (i, v) in index.values_mut().enumerate() {
        *v = i;
    }
    let vertices: Vec<(i64, i64)> = index.keys().copied().collect();
    let mut edges: Vec<(usize, usize)> = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])])
        .map(|(p, q)| {
            let (u, v) = (index[&p], index[&q]);
            (u.min(v), u.max(v))
        })
        .collect();
    edges.sort_unstable();
    let mut vertex_level = vec![m; vertices.len()];
    for k in (0..m).rev() {
        let scale = 1i64 << (m - k);
        for t in corners_of(&unit_cells(k)) {
            for (a, b) in t {
                vertex_level[index[&(a * scale, b * scale)]] = k;
            }
        }
    }
    GasketGraph { level: m, vertices, edges, vertex_level }
}

impl GasketGraph {
    /// `(3^(m+1) + 3) / 2`.
    pub fn expected_vertex_count(m: usize) -> usize {
        (3usize.pow(m as u32 + 1) + 3) / 2
    }

    pub fn expected_edge_count(m: usize) -> usize {
        3usize.pow(m as u32 + 1)
    }

    /// Indices of `q_0, q_1, q_2`.
    pub fn corners(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertex_level[v] == 0).collect()
    }

    /// Cartesian position in the unit-side triangle.
    pub fn position(&self, v: usize) -> (f64, f64) {
        let (a, b) = self.vertices[v];
        let s = (1i64 << self.level) as f64;
        ((a as f64 + 0.5 * b as f64) / s, b as f64 * 3f64.sqrt() / 2.0 / s)
    }

    fn base_graph(&self, boundary: Boundary) -> BaseGraph {
        BaseGraph {
            vertices: (0..self.vertices.len())
                .map(|v| BaseVertex {
                    site: v as i64,
                    x: v as f64,
                    boundary: if self.vertex_level[v] == 0 && boundary == Boundary::Dirichlet {
                        Some(Boundary::Dirichlet)
                    } else {
                        None
                    },
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| BaseEdge { a, b, length: 1.0, weight: 1.0 }).collect(),
        }
    }

    /// Unit-weight mesh; the corners are eliminated in Dirichlet mode.
    pub fn mesh(&self, boundary: Boundary, mass: GraphMass) -> Result<Mesh> {
        let vertices: Vec<(NodeLabel, bool)> = (0..self.vertices.len())
            .map(|v| {
                let pinned = boundary == Boundary::Dirichlet && self.vertex_level[v] == 0;
                (NodeLabel { site: v as i64, word: vec![] }, pinned)
            })
            .collect();
        let edges: Vec<(usize, usize, f64)> = self.edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Mesh::from_graph(&vertices, &edges, mass)
    }
}

/// Full spectrum of the level-`m` graph Laplacian. [`GraphMass::Degree`]
/// gives the probabilistic normalization, [`GraphMass::Unit`] the
/// combinatorial one.
pub fn gasket_graph_spectrum(g: &GasketGraph, boundary: Boundary, mass: GraphMass) -> Result<SpectrumList> {
    let op = assemble(&g.mesh(boundary, mass)?);
    let pairs = eigensolve::solve_dense_all(&op)?;
    let truncation = pairs.values.last().copied().unwrap_or(0.0);
    Ok(cluster(&pairs.values, CLUSTER_TOL)
        .with_origin(Origin::Numeric { level: g.level, pitch: None, extrapolated: false })
        .with_truncation(truncation))
}

/// Values the decimation map cannot produce from the coarser level.
pub const EXCEPTIONAL: [f64; 3] = [2.0, 5.0, 6.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationReport {
    pub tolerance: f64,
    /// `(lambda', lambda'(5 - lambda'), multiplicity)` for explained values.
    pub matched: Vec<(f64, f64, usize)>,
    /// Exceptional values without a coarse partner, with multiplicity.
    pub exceptional: Vec<(f64, usize)>,
    pub unexplained: Vec<(f64, usize)>,
    pub explained_fraction: f64,
    pub passed: bool,
}

/// Checks that every eigenvalue `lambda'` of the finer combinatorial
/// Laplacian maps to a coarse eigenvalue under `lambda'(5 - lambda')`, or is
/// one of [`EXCEPTIONAL`].
pub fn decimation_check(coarse: &SpectrumList, fine: &SpectrumList, tol: f64) -> DecimationReport {
    let near = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
    let mut matched = Vec::new();
    let mut exceptional = Vec::new();
    let mut unexplained = Vec::new();
    let mut explained = 0;
    for e in &fine.entries {
        let image = e.value * (5.0 - e.value);
        if coarse.entries.iter().any(|c| near(c.value, image)) {
            matched.push((e.value, image, e.multiplicity));
            explained += e.multiplicity;
        } else if EXCEPTIONAL.iter().any(|&x| near(x, e.value)) {
            exceptional.push((e.value, e.multiplicity));
            explained += e.multiplicity;
        } else {
            unexplained.push((e.value, e.multiplicity));
        }
    }
    let total = fine.total_multiplicity();
    DecimationReport {
        tolerance: tol,
        matched,
        exceptional,
        passed: unexplained.is_empty(),
        unexplained,
        explained_fraction: if total == 0 { 1.0 } else { explained as f64 / total as f64 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub level: usize,
    pub eigenvalue: f64,
    /// `5^m lambda_m`.
    pub renormalized: f64,
    /// Relative change from the previous level.
    pub relative_change: Option<f64>,
}

/// `5^m lambda_m` along the lowest nonzero branch of the given spectra
/// (consecutive levels, starting at `first_level`).
pub fn lowest_branch(spectra: &[SpectrumList], first_level: usize) -> Vec<BranchPoint> {
    let mut out: Vec<BranchPoint> = Vec::new();
    for (i, s) in spectra.iter().enumerate() {
        let Some(e) = s.entries.iter().find(|e| e.value > 1e-9) else { continue };
        let level = first_level + i;
        let renormalized = 5f64.powi(level as i32) * e.value;
        let relative_change = out.last().map(|p| (renormalized - p.renormalized).abs() / p.renormalized);
        out.push(BranchPoint { level, eigenvalue: e.value, renormalized, relative_change });
    }
    out
}

fn default_boundary() -> Boundary {
    Boundary::Dirichlet
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChouxSpec {
    pub fiber_depth: usize,
    pub gasket_level: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
}

impl ChouxSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gasket_level < self.fiber_depth {
            return Err(Error::ResolutionTooCoarse { gasket_level: self.gasket_level, fiber_depth: self.fiber_depth });
        }
        if self.gasket_level > 10 || self.fiber_depth > 16 {
            return Err(Error::InvalidSpec("Pâte à Choux spec too large".into()));
        }
        Ok(())
    }
}

/// Coordinate `k` collapses over `V_k \ V_{k-1}`.
#[derive(Debug, Clone)]
pub struct ChouxRule {
    pub depth: usize,
    pub vertex_level: Vec<usize>,
}

impl GluingRule for ChouxRule {
    fn depth(&self) -> usize {
        self.depth
    }

    fn fiber_size(&self, _: usize) -> u32 {
        2
    }

    fn collapses(&self, level: usize, locus: Locus, _: &[u32]) -> bool {
        match locus {
            Locus::Vertex(v) => self.vertex_level[v] == level,
            Locus::Edge(_) => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChouxLevels {
    pub spec: ChouxSpec,
    pub gasket: GasketGraph,
    pub base: BaseGraph,
    pub rule: ChouxRule,
    pub levels: Vec<QuotientGraph>,
}

pub fn build_choux(spec: &ChouxSpec) -> Result<ChouxLevels> {
    spec.validate()?;
    let gasket = build_gasket(spec.gasket_level);
    let base = gasket.base_graph(spec.boundary);
    let rule = ChouxRule { depth: spec.fiber_depth, vertex_level: gasket.vertex_level.clone() };
    let levels = (0..=spec.fiber_depth).map(|i| quotient_level(&base, &rule, i)).collect();
    Ok(ChouxLevels { spec: *spec, gasket, base, rule, levels })
}

impl ChouxLevels {
    /// Graph mesh of level `i`: one node per glued point, conductance and
    /// mass from the sheet weights (probabilistic normalization).
    pub fn mesh(&self, i: usize) -> Result<Mesh> {
        let q = &self.levels[i];
        let vertices: Vec<(NodeLabel, bool)> = q
            .vertices
            .iter()
            .map(|v| {
                let pinned = self.base.vertices[v.base].boundary == Some(Boundary::Dirichlet);
                (NodeLabel { site: v.base as i64, word: v.word.clone() }, pinned)
            })
            .collect();
        let edges: Vec<(usize, usize, f64)> = q.edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
        Mesh::from_graph(&vertices, &edges, GraphMass::Degree)
    }

    pub fn tower(&self) -> Result<Tower> {
        let meshes = (0..self.levels.len()).map(|i| self.mesh(i)).collect::<Result<Vec<_>>>()?;
        Tower::new(meshes, &vec![2; self.spec.fiber_depth])
    }
}

/// Tagged spectra of every fiber level up to `lambda_max`.
pub fn choux_level_spectra(spec: &ChouxSpec, lambda_max: f64, tol: f64) -> Result<Vec<TaggedPairs>> {
    tower_spectra(&build_choux(spec)?.tower()?, lambda_max, tol)
}

/// Clustered spectrum of the deepest fiber level.
pub fn choux_numeric_spectrum(spec: &ChouxSpec, target: Target) -> Result<SpectrumList> {
    let levels = build_choux(spec)?;
    let op = assemble(&levels.mesh(spec.fiber_depth)?);
    let pairs = eigensolve::solve(&op, target)?;
    let truncation = match target {
        Target::UpTo(bound) => bound,
        Target::Count(_) => pairs.values.last().copied().unwrap_or(0.0),
    };
    Ok(cluster(&pairs.values, CLUSTER_TOL)
        .with_origin(Origin::Numeric { level: spec.fiber_depth, pitch: None, extrapolated: false })
        .with_truncation(truncation))
}

/// `log 6 / log 2`, independent of the spec.
pub fn hausdorff_dimension() -> f64 {
    6f64.ln() / 2f64.ln()
}

/// Number of points of the level-`m` Pâte à Choux over the level-`m` gasket.
pub fn choux_point_count(m: usize) -> u64 {
    let g = build_gasket(m);
    g.vertex_level.iter().map(|&k| if k >= 1 { 1u64 << (m - 1) } else { 1u64 << m }).sum()
}

/// Least-squares slope of `log N_m` against `m log 2` over the given levels.
pub fn box_count_dimension(levels: std::ops::RangeInclusive<usize>) -> f64 {
    let pts: Vec<(f64, f64)> =
        levels.map(|m| (m as f64 * 2f64.ln(), (choux_point_count(m) as f64).ln())).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    num / den
}

//! Laakso spaces: copies of `[0, 1]` glued by wormholes at the grids
//! `L_N = {i / d_N}`, `d_N = j_1 ... j_N`, built level by level as a
//! projective system with binary fibers.
//!
//! ```
//! use fractal_spectra::laakso::{build_laakso, LaaksoSpec};
//! use fractal_spectra::Boundary;
//!
//! let spec = LaaksoSpec::new(vec![2], 8, Boundary::Neumann);
//! let levels = build_laakso(&spec).unwrap();
//! assert_eq!(levels.graphs[1].vertices.len(), 5);
//! assert_eq!(levels.graphs[1].edges.len(), 4);
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigensolve::{self, cluster, extrapolate, LanczosOptions, tower_spectra, Origin, SpectrumEntry, SpectrumList, Tag, TaggedPairs, Target, CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::metric_graph::quotient::{quotient_level, BaseEdge, BaseGraph, BaseVertex, GluingRule, Locus};
use crate::metric_graph::{assemble, discretize, Boundary, MetricGraph, Tower};

fn default_refine() -> usize {
    8
}

fn default_boundary() -> Boundary {
    Boundary::Neumann
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaaksoSpec {
    pub j: Vec<u32>,
    /// Number of levels; defaults to the length of `j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Mesh steps per grid cell of the finest level.
    #[serde(default = "default_refine")]
    pub refine: usize,
    /// Condition at the endpoints 0 and 1.
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
}

impl LaaksoSpec {
    pub fn new(j: Vec<u32>, refine: usize, boundary: Boundary) -> Self {
        LaaksoSpec { j, depth: None, refine, boundary }
    }

    /// `j_l = j` for `l = 1..=depth`.
    pub fn uniform(j: u32, depth: usize, refine: usize, boundary: Boundary) -> Self {
        LaaksoSpec::new(vec![j; depth], refine, boundary)
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(self.j.len())
    }

    /// The same space cut off after `depth` levels.
    pub fn truncated(&self, depth: usize) -> Self {
        LaaksoSpec { j: self.j[..depth.min(self.j.len())].to_vec(), depth: None, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.depth();
        if n > self.j.len() {
            return Err(Error::InvalidSequence(format!("depth {n} exceeds the {} given entries", self.j.len())));
        }
        if let Some(&base) = self.j.iter().min() {
            if base < 2 {
                return Err(Error::InvalidSequence(format!("entries must be at least 2, got {base}")));
            }
            if let Some(bad) = self.j.iter().find(|&&x| x != base && x != base + 1) {
                return Err(Error::InvalidSequence(format!(
                    "entry {bad} is neither {base} nor {}",
                    base + 1
                )));
            }
        }
        if self.refine < 2 {
            return Err(Error::InvalidSpec(format!("refine must be at least 2, got {}", self.refine)));
        }
        let mut d = 1u64;
        for &x in &self.j[..n] {
            d = d
                .checked_mul(x as u64)
                .filter(|&d| d <= 1 << 40)
                .ok_or_else(|| Error::InvalidSequence("grid too fine".into()))?;
        }
        Ok(())
    }

    /// `d_m = j_1 ... j_m`, `d_0 = 1`.
    pub fn d(&self, m: usize) -> u64 {
        self.j[..m].iter().map(|&x| x as u64).product()
    }

    /// Common pitch `1 / (refine * d_n)` of every level.
    pub fn pitch(&self) -> f64 {
        1.0 / (self.refine as f64 * self.d(self.depth()) as f64)
    }
}

/// Wormhole positions per level, in ticks of `1 / d_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WormholeTable {
    pub d: Vec<u64>,
    /// `ticks[m - 1]` lists `L_m \ L_{m-1}` without the endpoints.
    pub ticks: Vec<Vec<u64>>,
}

impl WormholeTable {
    pub fn new(spec: &LaaksoSpec) -> Self {
        let n = spec.depth();
        let d: Vec<u64> = (0..=n).map(|m| spec.d(m)).collect();
        let ticks = (1..=n)
            .map(|m| {
                let step = d[n] / d[m];
                let coarser = d[n] / d[m - 1];
                (1..d[n]).filter(|t| t % step == 0 && t % coarser != 0).collect()
            })
            .collect();
        WormholeTable { d, ticks }
    }

    pub fn depth(&self) -> usize {
        self.ticks.len()
    }

    /// Level at which the tick becomes a wormhole; `None` for endpoints and
    /// points off every grid.
    pub fn level_of(&self, tick: u64) -> Option<usize> {
        let n = self.depth();
        if tick == 0 || tick >= self.d[n] {
            return None;
        }
        (1..=n).find(|&m| tick.is_multiple_of(self.d[n] / self.d[m]))
    }

    pub fn positions(&self, m: usize) -> Vec<f64> {
        let top = self.d[self.depth()] as f64;
        self.ticks[m - 1].iter().map(|&t| t as f64 / top).collect()
    }
}

/// Coordinate `m` collapses over `L_m \ L_{m-1}`; edge interiors never glue.
#[derive(Debug, Clone)]
pub struct LaaksoRule {
    pub table: WormholeTable,
}

impl GluingRule for LaaksoRule {
    fn depth(&self) -> usize {
        self.table.depth()
    }

    fn fiber_size(&self, _: usize) -> u32 {
        2
    }

    fn collapses(&self, level: usize, locus: Locus, _: &[u32]) -> bool {
        match locus {
            Locus::Vertex(v) => self.table.level_of(v as u64) == Some(level),
            Locus::Edge(_) => false,
        }
    }
}

/// All levels `0..=n` of a Laakso space over the grid `1 / d_n`.
#[derive(Debug, Clone)]
pub struct LaaksoLevels {
    pub spec: LaaksoSpec,
    pub base: BaseGraph,
    pub rule: LaaksoRule,
    pub graphs: Vec<MetricGraph>,
}

pub fn build_laakso(spec: &LaaksoSpec) -> Result<LaaksoLevels> {
    spec.validate()?;
    let n = spec.depth();
    let table = WormholeTable::new(spec);
    let top = table.d[n];
    let end = match spec.boundary {
        Boundary::Neumann => None,
        Boundary::Dirichlet => Some(Boundary::Dirichlet),
    };
    let base = BaseGraph {
        vertices: (0..=top)
            .map(|t| BaseVertex {
                site: t as i64,
                x: t as f64 / top as f64,
                boundary: if t == 0 || t == top { end } else { None },
            })
            .collect(),
        edges: (0..top as usize)
            .map(|t| BaseEdge { a: t, b: t + 1, length: 1.0 / top as f64, weight: 1.0 })
            .collect(),
    };
    let rule = LaaksoRule { table };
    let graphs = (0..=n)
        .map(|level| {
            let g = quotient_level(&base, &rule, level).to_metric_graph(&base);
            g.validate()?;
            Ok(g)
        })
        .collect::<Result<_>>()?;
    Ok(LaaksoLevels { spec: spec.clone(), base, rule, graphs })
}

impl LaaksoLevels {
    /// Meshes of every level at the common pitch, with fiber maps.
    pub fn tower(&self) -> Result<Tower> {
        self.tower_at(self.spec.pitch())
    }

    pub fn tower_at(&self, pitch: f64) -> Result<Tower> {
        let meshes = self.graphs.iter().map(|g| discretize(g, pitch)).collect::<Result<Vec<_>>>()?;
        Tower::new(meshes, &vec![2; self.spec.depth()])
    }
}

/// Families of the closed form, in units of `pi^2`, with `n <= depth`:
/// `F1: k^2 d_n^2`, `F2: 4 k^2 d_n^2 (n >= 2)`, `F3: 4 (2k+1)^2 d_n^2 (n >= 1)`.
pub fn laakso_analytic_keys(spec: &LaaksoSpec, max_key: f64) -> BTreeMap<u64, Vec<String>> {
    let mut keys: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    let mut push = |key: u64, source: String| keys.entry(key).or_default().push(source);
    for n in 0..=spec.depth() {
        let d2 = spec.d(n).pow(2);
        for k in 1u64.. {
            let key = k * k * d2;
            if key as f64 > max_key {
                break;
            }
            push(key, format!("F1:n={n}:k={k}"));
        }
        if n >= 2 {
            for k in 1u64.. {
                let key = 4 * k * k * d2;
                if key as f64 > max_key {
                    break;
                }
                push(key, format!("F2:n={n}:k={k}"));
            }
        }
        if n >= 1 {
            for k in 0u64.. {
                let key = 4 * (2 * k + 1).pow(2) * d2;
                if key as f64 > max_key {
                    break;
                }
                push(key, format!("F3:n={n}:k={k}"));
            }
        }
    }
    keys
}

/// The closed-form eigenvalue set up to `lambda_max`. Only the set is
/// claimed: every entry has multiplicity 1 and lists the `(family, n, k)`
/// terms producing it. In Neumann mode the constant mode at 0 is prepended
/// with tag [`Tag::Trivial`].
pub fn laakso_analytic_spectrum(spec: &LaaksoSpec, lambda_max: f64) -> SpectrumList {
    let pi2 = PI * PI;
    let mut entries = Vec::new();
    if spec.boundary == Boundary::Neumann && lambda_max >= 0.0 {
        entries.push(SpectrumEntry { value: 0.0, multiplicity: 1, tag: Tag::Trivial, sources: vec![] });
    }
    for (key, sources) in laakso_analytic_keys(spec, lambda_max / pi2) {
        let mut families: Vec<&str> = sources.iter().map(|s| &s[..2]).collect();
        families.dedup();
        families.sort_unstable();
        families.dedup();
        entries.push(SpectrumEntry {
            value: key as f64 * pi2,
            multiplicity: 1,
            tag: Tag::Analytic(families.join("+")),
            sources,
        });
    }
    SpectrumList {
        entries,
        origin: Origin::Analytic { formula: "laakso".into() },
        truncation: lambda_max,
        set_only: true,
    }
}

/// Clustered spectrum of the finest level.
pub fn laakso_numeric_spectrum(spec: &LaaksoSpec, target: Target) -> Result<SpectrumList> {
    let levels = build_laakso(spec)?;
    let pitch = spec.pitch();
    let mesh = discretize(levels.graphs.last().expect("level 0 always exists"), pitch)?;
    let pairs = eigensolve::solve(&assemble(&mesh), target)?;
    let truncation = match target {
        Target::UpTo(bound) => bound,
        Target::Count(_) => pairs.values.last().copied().unwrap_or(0.0),
    };
    Ok(cluster(&pairs.values, CLUSTER_TOL)
        .with_origin(Origin::Numeric { level: spec.depth(), pitch: Some(pitch), extrapolated: false })
        .with_truncation(truncation))
}

/// Richardson extrapolation of the finest level over pitches `h` and `h/2`.
pub fn laakso_extrapolated_spectrum(
    spec: &LaaksoSpec,
    lambda_max: f64,
    opts: &LanczosOptions,
) -> Result<(SpectrumList, eigensolve::Extrapolation)> {
    let levels = build_laakso(spec)?;
    let top = levels.graphs.last().expect("level 0 always exists");
    let h = spec.pitch();
    let coarse = assemble(&discretize(top, h)?);
    let fine = assemble(&discretize(top, h / 2.0)?);
    let ex = extrapolate(&coarse, &fine, lambda_max, opts)?;
    let mut values = ex.values.clone();
    values.sort_by(f64::total_cmp);
    let list = cluster(&values, CLUSTER_TOL)
        .with_origin(Origin::Numeric { level: spec.depth(), pitch: Some(h), extrapolated: true })
        .with_truncation(lambda_max);
    Ok((list, ex))
}

/// Tagged spectra of every level at the common pitch.
pub fn laakso_level_spectra(spec: &LaaksoSpec, lambda_max: f64, tol: f64) -> Result<Vec<TaggedPairs>> {
    let tower = build_laakso(spec)?.tower()?;
    tower_spectra(&tower, lambda_max, tol)
}

/// [`SpectrumList`] of one level from [`laakso_level_spectra`].
pub fn level_list(pairs: &TaggedPairs, level: usize, pitch: f64, lambda_max: f64) -> SpectrumList {
    pairs
        .spectrum()
        .with_origin(Origin::Numeric { level, pitch: Some(pitch), extrapolated: false })
        .with_truncation(lambda_max)
}

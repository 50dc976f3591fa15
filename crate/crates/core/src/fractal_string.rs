//! Fractal strings, their Dirichlet spectra, and the stitched connected
//! space with the same spectrum.
//!
//! The stitched space starts from `[0, l_1]` with `m_1` strands glued at both
//! ends. Level `k >= 2` adds `m_k` copies of the segment `[l_1 - l_k, l_1]`
//! of the distinguished sheet (the one whose word is all zeros), glued to it
//! everywhere outside the open segment.
//!
//! ```
//! use fractal_spectra::fractal_string::{string_analytic_spectrum, StringSpec};
//!
//! let spec = StringSpec::new(vec![0.5, 0.25], vec![1, 1]);
//! let pi2 = std::f64::consts::PI.powi(2);
//! let s = string_analytic_spectrum(&spec, 20.0 * pi2).unwrap();
//! let mults: Vec<usize> = s.entries.iter().map(|e| e.multiplicity).collect();
//! assert_eq!(mults, vec![1, 2]);
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{self, cluster, tower_spectra, Origin, SpectrumEntry, SpectrumList, Tag, TaggedPairs, Target, CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::metric_graph::quotient::{quotient_level, BaseEdge, BaseGraph, BaseVertex, GluingRule, Locus};
use crate::metric_graph::{assemble, discretize, Boundary, MetricGraph, Tower};
use crate::rational::{approximate, to_f64, Rational};

fn default_denominator_bound() -> i64 {
    1_000_000
}

fn default_lambda_max() -> f64 {
    1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringSpec {
    pub lengths: Vec<f64>,
    pub mults: Vec<u32>,
    /// Number of lengths used; defaults to all of them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    /// Largest denominator used when rationalizing lengths.
    #[serde(default = "default_denominator_bound")]
    pub denominator_bound: i64,
}

impl StringSpec {
    pub fn new(lengths: Vec<f64>, mults: Vec<u32>) -> Self {
        StringSpec {
            lengths,
            mults,
            depth: None,
            lambda_max: default_lambda_max(),
            denominator_bound: default_denominator_bound(),
        }
    }

    /// `l_i = 3^-i`, `m_i = 2^(i-1)` for `i = 1..=depth`.
    pub fn cantor(depth: usize) -> Self {
        StringSpec::new(
            (1..=depth).map(|i| 3f64.powi(-(i as i32))).collect(),
            (1..=depth).map(|i| 1u32 << (i - 1)).collect(),
        )
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(self.lengths.len())
    }

    pub fn truncated(&self, depth: usize) -> Self {
        StringSpec { depth: Some(depth), ..self.clone() }
    }

    /// Every length multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        StringSpec { lengths: self.lengths.iter().map(|l| l * c).collect(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.len() != self.mults.len() {
            return Err(Error::InvalidString(format!(
                "{} lengths but {} multiplicities",
                self.lengths.len(),
                self.mults.len()
            )));
        }
        if self.depth() == 0 || self.depth() > self.lengths.len() {
            return Err(Error::InvalidString(format!("depth {} out of range", self.depth())));
        }
        if let Some(l) = self.lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidString(format!("length {l} is not positive")));
        }
        if self.mults.contains(&0) {
            return Err(Error::InvalidString("multiplicities must be positive".into()));
        }
        for (index, w) in self.lengths.windows(2).enumerate() {
            if w[1] >= w[0] {
                return Err(Error::InfeasibleNesting { index: index + 1, prev: w[0], next: w[1] });
            }
        }
        if self.denominator_bound < 1 {
            return Err(Error::InvalidString("denominator bound must be positive".into()));
        }
        Ok(())
    }
}

/// `pi^2 k^2 / l_i^2` for `i <= depth`, with multiplicity `m_i`; values
/// from different lengths merge when `k l_1 / l_i` agree as rationals, so
/// the merge pattern does not depend on the overall scale.
pub fn string_analytic_spectrum(spec: &StringSpec, lambda_max: f64) -> Result<SpectrumList> {
    spec.validate()?;
    let mut merged: BTreeMap<Rational, (f64, usize, Vec<String>)> = BTreeMap::new();
    for i in 0..spec.depth() {
        let l = spec.lengths[i];
        let ratio = approximate(l / spec.lengths[0], spec.denominator_bound)
            .filter(|r| *r.numer() > 0)
            .ok_or_else(|| Error::NoCommonPitch(format!("length {l} below l_1/{}", spec.denominator_bound)))?;
        for k in 1i64.. {
            let value = PI * PI * (k * k) as f64 / (l * l);
            if value > lambda_max {
                break;
            }
            let entry = merged.entry(Rational::from_integer(k) / ratio).or_insert((value, 0, Vec::new()));
            entry.1 += spec.mults[i] as usize;
            entry.2.push(format!("i={}:k={k}", i + 1));
        }
    }
    Ok(SpectrumList {
        entries: merged
            .into_values()
            .map(|(value, multiplicity, sources)| SpectrumEntry {
                value,
                multiplicity,
                tag: Tag::Analytic("string".into()),
                sources,
            })
            .collect(),
        origin: Origin::Analytic { formula: "pi^2 k^2 / l_i^2".into() },
        truncation: lambda_max,
        set_only: false,
    })
}

/// Integer grid shared by all lengths after rationalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commensuration {
    /// Grid ticks per unit length.
    pub unit: i64,
    /// `l_i` in ticks.
    pub ticks: Vec<i64>,
    /// Largest `|delta l / l|` introduced by rationalizing.
    pub length_perturbation: f64,
    /// First-order bound `2 |delta l / l|` on the relative eigenvalue shift.
    pub eigenvalue_perturbation: f64,
}

const MAX_TICKS: i64 = 1 << 24;

pub fn commensurate(spec: &StringSpec) -> Result<Commensuration> {
    spec.validate()?;
    let lengths = &spec.lengths[..spec.depth()];
    let mut rationals = Vec::with_capacity(lengths.len());
    let mut length_perturbation = 0.0f64;
    for &l in lengths {
        let r = approximate(l, spec.denominator_bound)
            .filter(|r| *r.numer() > 0)
            .ok_or_else(|| Error::NoCommonPitch(format!("length {l} below 1/{}", spec.denominator_bound)))?;
        length_perturbation = length_perturbation.max((to_f64(&r) - l).abs() / l);
        rationals.push(r);
    }
    let mut unit = 1i64;
    for r in &rationals {
        unit = unit.lcm(r.denom());
        if unit > MAX_TICKS {
            return Err(Error::NoCommonPitch(format!("common denominator exceeds {MAX_TICKS}")));
        }
    }
    let ticks: Vec<i64> = rationals.iter().map(|r| r.numer() * (unit / r.denom())).collect();
    if ticks[0] > MAX_TICKS {
        return Err(Error::NoCommonPitch(format!("{} grid ticks exceed {MAX_TICKS}", ticks[0])));
    }
    let distinct = ticks.windows(2).all(|w| w[1] < w[0]);
    if !distinct {
        return Err(Error::NoCommonPitch("lengths coincide after rationalization".into()));
    }
    Ok(Commensuration { unit, ticks, length_perturbation, eigenvalue_perturbation: 2.0 * length_perturbation })
}

/// Gluing rule of the stitched space, on base ticks.
#[derive(Debug, Clone)]
pub struct StitchedRule {
    pub mults: Vec<u32>,
    /// Tick of the right end `l_1`.
    pub end: i64,
    /// `starts[k - 1]` is the tick of `l_1 - l_k`.
    pub starts: Vec<i64>,
    pub vertex_ticks: Vec<i64>,
    pub edge_ticks: Vec<(i64, i64)>,
}

impl GluingRule for StitchedRule {
    fn depth(&self) -> usize {
        self.mults.len()
    }

    fn fiber_size(&self, level: usize) -> u32 {
        if level == 1 {
            self.mults[0]
        } else {
            self.mults[level - 1] + 1
        }
    }

    fn collapses(&self, level: usize, locus: Locus, prefix: &[u32]) -> bool {
        if level == 1 {
            return match locus {
                Locus::Vertex(v) => self.vertex_ticks[v] == 0 || self.vertex_ticks[v] == self.end,
                Locus::Edge(_) => false,
            };
        }
        let start = self.starts[level - 1];
        let inside = match locus {
            Locus::Vertex(v) => start < self.vertex_ticks[v] && self.vertex_ticks[v] < self.end,
            Locus::Edge(e) => start <= self.edge_ticks[e].0 && self.edge_ticks[e].1 <= self.end,
        };
        !(inside && prefix.iter().all(|&g| g == 0))
    }
}

#[derive(Debug, Clone)]
pub struct StitchedLevels {
    pub spec: StringSpec,
    pub grid: Commensuration,
    pub base: BaseGraph,
    pub rule: StitchedRule,
    /// Levels `0..=N`; level 0 is `[0, l_1]`.
    pub graphs: Vec<MetricGraph>,
}

pub fn build_stitched(spec: &StringSpec) -> Result<StitchedLevels> {
    let grid = commensurate(spec)?;
    let n = spec.depth();
    let end = grid.ticks[0];
    let starts: Vec<i64> = grid.ticks.iter().map(|t| end - t).collect();
    let mut vertex_ticks: Vec<i64> = starts.clone();
    vertex_ticks.push(end);
    vertex_ticks.sort_unstable();
    vertex_ticks.dedup();
    let unit = grid.unit as f64;
    let base = BaseGraph {
        vertices: vertex_ticks
            .iter()
            .map(|&t| BaseVertex {
                site: t,
                x: t as f64 / unit,
                boundary: if t == 0 || t == end { Some(Boundary::Dirichlet) } else { None },
            })
            .collect(),
        edges: vertex_ticks
            .windows(2)
            .enumerate()
            .map(|(i, w)| BaseEdge { a: i, b: i + 1, length: (w[1] - w[0]) as f64 / unit, weight: 1.0 })
            .collect(),
    };
    let edge_ticks = vertex_ticks.windows(2).map(|w| (w[0], w[1])).collect();
    let rule = StitchedRule { mults: spec.mults[..n].to_vec(), end, starts, vertex_ticks, edge_ticks };
    let graphs = (0..=n)
        .map(|level| {
            let g = quotient_level(&base, &rule, level).to_metric_graph(&base);
            g.validate()?;
            Ok(g)
        })
        .collect::<Result<_>>()?;
    Ok(StitchedLevels { spec: spec.clone(), grid, base, rule, graphs })
}

impl StitchedLevels {
    /// Default pitch: a divisor of the grid with at least 256 steps along
    /// `l_1` and 16 along the shortest base segment.
    pub fn default_pitch(&self) -> f64 {
        let shortest = self.base.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
        let l1 = self.grid.ticks[0] as f64 / self.grid.unit as f64;
        let tick = 1.0 / self.grid.unit as f64;
        let want = (l1 / 256.0).min(shortest / 16.0);
        tick / (tick / want).ceil()
    }

    /// Checks that `pitch` divides the grid tick.
    pub fn check_pitch(&self, pitch: f64) -> Result<()> {
        let tick = 1.0 / self.grid.unit as f64;
        let r = tick / pitch;
        if !(pitch > 0.0) || r < 0.5 || (r - r.round()).abs() > 1e-9 * r {
            return Err(Error::NoCommonPitch(format!("pitch {pitch} does not divide the grid step {tick}")));
        }
        Ok(())
    }

    pub fn tower(&self, pitch: f64) -> Result<Tower> {
        self.check_pitch(pitch)?;
        let meshes = self.graphs.iter().map(|g| discretize(g, pitch)).collect::<Result<Vec<_>>>()?;
        let sizes: Vec<usize> = (1..self.graphs.len()).map(|k| self.rule.fiber_size(k) as usize).collect();
        Tower::new(meshes, &sizes)
    }
}

/// Clustered spectrum of the deepest level; `None` picks
/// [`StitchedLevels::default_pitch`].
pub fn stitched_numeric_spectrum(spec: &StringSpec, pitch: Option<f64>, lambda_max: f64) -> Result<SpectrumList> {
    let levels = build_stitched(spec)?;
    let pitch = pitch.unwrap_or_else(|| levels.default_pitch());
    levels.check_pitch(pitch)?;
    let op = assemble(&discretize(levels.graphs.last().expect("level 0 always exists"), pitch)?);
    let pairs = eigensolve::solve(&op, Target::UpTo(lambda_max))?;
    Ok(cluster(&pairs.values, CLUSTER_TOL)
        .with_origin(Origin::Numeric { level: spec.depth(), pitch: Some(pitch), extrapolated: false })
        .with_truncation(lambda_max))
}

/// Tagged spectra of all levels at one pitch.
pub fn stitched_level_spectra(spec: &StringSpec, pitch: Option<f64>, lambda_max: f64, tol: f64) -> Result<Vec<TaggedPairs>> {
    let levels = build_stitched(spec)?;
    let pitch = pitch.unwrap_or_else(|| levels.default_pitch());
    tower_spectra(&levels.tower(pitch)?, lambda_max, tol)
}

/// `sum mult * lambda^-s` over positive entries at or below `lambda_max`.
pub fn zeta_partial(list: &SpectrumList, s: f64, lambda_max: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidSpec(format!("zeta exponent must be positive, got {s}")));
    }
    if lambda_max > list.truncation * (1.0 + 1e-12) {
        return Err(Error::BeyondTruncation { lambda: lambda_max, truncation: list.truncation });
    }
    Ok(list
        .below(lambda_max)
        .filter(|e| e.value > 0.0)
        .map(|e| e.multiplicity as f64 * e.value.powf(-s))
        .sum())
}

/// Secant slope of `log sum_{j <= i} m_j` against `-log l_i` over the two
/// deepest levels: an estimate of the Minkowski dimension of the string
/// (0 for a single length).
pub fn dimension_estimate(spec: &StringSpec) -> f64 {
    let n = spec.depth();
    if n < 2 {
        return 0.0;
    }
    let upper: f64 = spec.mults[..n].iter().map(|&m| m as f64).sum();
    let lower = upper - spec.mults[n - 1] as f64;
    (upper / lower).ln() / (spec.lengths[n - 2] / spec.lengths[n - 1]).ln()
}

/// Estimated abscissa of convergence of the spectral zeta function,
/// `max(1/2, D/2)` with `D` from [`dimension_estimate`].
pub fn abscissa_estimate(spec: &StringSpec) -> f64 {
    (dimension_estimate(spec) / 2.0).max(0.5)
}

/// [`zeta_partial`] that refuses exponents where the full series diverges.
pub fn zeta_converged(spec: &StringSpec, list: &SpectrumList, s: f64, lambda_max: f64) -> Result<f64> {
    let abscissa = abscissa_estimate(spec);
    if s <= abscissa {
        return Err(Error::DivergentRange { exponent: s, abscissa });
    }
    zeta_partial(list, s, lambda_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaRow {
    pub s: f64,
    pub partial_sum: f64,
    pub lambda_max: f64,
}

pub fn zeta_table(list: &SpectrumList, exponents: &[f64], lambda_max: f64) -> Result<Vec<ZetaRow>> {
    exponents
        .iter()
        .map(|&s| Ok(ZetaRow { s, partial_sum: zeta_partial(list, s, lambda_max)?, lambda_max }))
        .collect()
}

/// CSV with header `s,partial_sum,lambda_max`.
pub fn write_zeta_csv<W: std::io::Write>(rows: &[ZetaRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["s", "partial_sum", "lambda_max"])?;
    for r in rows {
        out.write_record([format!("{:.16e}", r.s), format!("{:.16e}", r.partial_sum), format!("{:.16e}", r.lambda_max)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_zeta_csv<R: std::io::Read>(r: R) -> Result<Vec<ZetaRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["s", "partial_sum", "lambda_max"] {
        return Err(Error::Parse("zeta table header must be s,partial_sum,lambda_max".into()));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .filter(|x: &f64| x.is_finite())
                    .ok_or_else(|| Error::Parse(format!("bad zeta row {rec:?}")))
            };
            Ok(ZetaRow { s: num(0)?, partial_sum: num(1)?, lambda_max: num(2)? })
        })
        .collect()
}

use serde::{Deserialize, Serialize};

use super::spectrum::{Origin, SpectrumList};
use crate::error::{Error, Result};

fn scale(x: f64) -> f64 {
    x.abs().max(1.0)
}

/// Outcome of checking `sigma(lower) subset sigma(upper)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    pub tolerance: f64,
    pub truncation: f64,
    pub lower_count: usize,
    pub upper_count: usize,
    /// Lower eigenvalues missing above, with the missing multiplicity.
    pub unmatched: Vec<(f64, usize)>,
    /// Upper eigenvalues not accounted for below: the new part of the spectrum.
    pub surplus: Vec<(f64, usize)>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Checks that every lower entry reappears above with at least the same
/// multiplicity, within `tol * max(|lambda|, 1)`.
pub fn verify_nesting(lower: &SpectrumList, upper: &SpectrumList, tol: f64) -> Result<NestingReport> {
    if let (Origin::Numeric { pitch: Some(a), .. }, Origin::Numeric { pitch: Some(b), .. }) =
        (&lower.origin, &upper.origin)
    {
        if (a - b).abs() > 1e-12 * a.max(*b) {
            return Err(Error::MisalignedMeshes { lower: *a, upper: *b });
        }
    }
    let truncation = lower.truncation.min(upper.truncation);
    let mut used = vec![0usize; upper.len()];
    let mut unmatched = Vec::new();
    let mut max_deviation = 0.0f64;
    for e in lower.below(truncation) {
        let best = upper
            .entries
            .iter()
            .enumerate()
            .map(|(i, u)| (i, (u.value - e.value).abs() / scale(e.value)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, dev)) if dev <= tol => {
                max_deviation = max_deviation.max(dev);
                let have = upper.entries[i].multiplicity - used[i].min(upper.entries[i].multiplicity);
                if have < e.multiplicity {
                    unmatched.push((e.value, e.multiplicity - have));
                }
                used[i] += e.multiplicity;
            }
            _ => unmatched.push((e.value, e.multiplicity)),
        }
    }
    let surplus = upper
        .entries
        .iter()
        .zip(&used)
        .filter(|(u, &k)| u.value <= truncation && u.multiplicity > k)
        .map(|(u, &k)| (u.value, u.multiplicity - k))
        .collect();
    Ok(NestingReport {
        tolerance: tol,
        truncation,
        lower_count: lower.below(truncation).map(|e| e.multiplicity).sum(),
        upper_count: upper.below(truncation).map(|e| e.multiplicity).sum(),
        passed: unmatched.is_empty(),
        unmatched,
        surplus,
        max_deviation,
    })
}

/// Finite-difference error model: relative error `constant * (k pi h)^2`
/// with `k = sqrt(lambda) / pi`, i.e. `constant * lambda * h^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdModel {
    pub pitch: f64,
    pub constant: f64,
}

impl FdModel {
    /// Second-order lumped-mass differences underestimate by about
    /// `lambda^2 h^2 / 12`, so `1/10` covers the raw values.
    pub fn raw(pitch: f64) -> Self {
        FdModel { pitch, constant: 0.1 }
    }

    pub fn relative_tolerance(&self, lambda: f64) -> f64 {
        self.constant * lambda.abs() * self.pitch * self.pitch
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub model: Option<FdModel>,
    /// Fixed relative tolerance, added to the model tolerance.
    pub rel_tol: f64,
    /// Require equal multiplicities (ignored when the analytic list is set-only).
    pub multiplicities: bool,
    /// Accept a numeric 0 without an analytic partner.
    pub trivial_zero: bool,
    /// Analytic entries below `truncation * (1 - margin)` must be attained.
    pub completeness_margin: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { model: None, rel_tol: 1e-9, multiplicities: true, trivial_zero: true, completeness_margin: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub numeric: f64,
    pub analytic: f64,
    pub relative_deviation: f64,
    pub tolerance: f64,
    pub numeric_multiplicity: usize,
    pub analytic_multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub exact: f64,
    pub coarse_error: f64,
    pub fine_error: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub truncation: f64,
    pub matches: Vec<MatchRow>,
    pub unmatched_numeric: Vec<f64>,
    pub missed_analytic: Vec<f64>,
    pub multiplicity_mismatches: Vec<MatchRow>,
    pub max_relative_deviation: f64,
    #[serde(default)]
    pub convergence: Vec<ConvergenceRow>,
    pub passed: bool,
}

/// Matches every numeric entry to the nearest analytic one.
pub fn compare_spectra(numeric: &SpectrumList, analytic: &SpectrumList, opts: &CompareOptions) -> CompareReport {
    let truncation = numeric.truncation.min(analytic.truncation);
    let mut matches = Vec::new();
    let mut unmatched_numeric = Vec::new();
    let mut multiplicity_mismatches = Vec::new();
    let mut hit = vec![false; analytic.len()];
    let mut max_relative_deviation = 0.0f64;
    let zero_floor = 1e-8 * scale(truncation);
    for e in numeric.below(truncation) {
        let tolerance = opts.rel_tol + opts.model.map_or(0.0, |m| m.relative_tolerance(e.value));
        let best = analytic
            .entries
            .iter()
            .enumerate()
            .map(|(i, a)| (i, (e.value - a.value).abs() / scale(a.value)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, dev)) if dev <= tolerance => {
                hit[i] = true;
                max_relative_deviation = max_relative_deviation.max(dev);
                let row = MatchRow {
                    numeric: e.value,
                    analytic: analytic.entries[i].value,
                    relative_deviation: dev,
                    tolerance,
                    numeric_multiplicity: e.multiplicity,
                    analytic_multiplicity: analytic.entries[i].multiplicity,
                };
                if opts.multiplicities && !analytic.set_only && row.numeric_multiplicity != row.analytic_multiplicity {
                    multiplicity_mismatches.push(row.clone());
                }
                matches.push(row);
            }
            _ if opts.trivial_zero && e.value.abs() <= zero_floor => {}
            _ => unmatched_numeric.push(e.value),
        }
    }
    let cutoff = truncation * (1.0 - opts.completeness_margin);
    let missed_analytic: Vec<f64> = analytic
        .entries
        .iter()
        .zip(&hit)
        .filter(|(a, &h)| !h && a.value <= cutoff)
        .map(|(a, _)| a.value)
        .collect();
    CompareReport {
        truncation,
        passed: unmatched_numeric.is_empty() && missed_analytic.is_empty() && multiplicity_mismatches.is_empty(),
        matches,
        unmatched_numeric,
        missed_analytic,
        multiplicity_mismatches,
        max_relative_deviation,
        convergence: Vec::new(),
    }
}

/// Order-2 Richardson extrapolation of index-paired eigenvalues at pitches
/// `h` (coarse) and `h/2` (fine).
pub fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// Error ratios `(coarse - exact) / (fine - exact)`; about 4 for a
/// second-order scheme under pitch halving.
pub fn convergence_ratios(coarse: &[f64], fine: &[f64], exact: &[f64]) -> Vec<ConvergenceRow> {
    coarse
        .iter()
        .zip(fine)
        .zip(exact)
        .map(|((&c, &f), &e)| ConvergenceRow {
            exact: e,
            coarse_error: c - e,
            fine_error: f - e,
            ratio: (c - e) / (f - e),
        })
        .collect()
}

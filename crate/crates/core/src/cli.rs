//! `fracspec`: builds a space from a JSON spec, computes its spectra and
//! writes CSV spectra plus JSON reports into an output directory.
//!
//! Exit codes: 0 ok, 1 failed checks or I/O, 2 bad spec, 3 solver failure,
//! 4 incommensurable lengths.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{
    compare_spectra, convergence_ratios, extrapolate, tower_spectra_with, verify_nesting, CompareOptions, CompareReport,
    FdModel, LanczosOptions, NestingReport, Origin, SpectrumList, Tag, TaggedPairs,
};
use crate::error::{Error, Result};
use crate::fractal_string::{
    build_stitched, read_zeta_csv, string_analytic_spectrum, write_zeta_csv, zeta_table, Commensuration, StringSpec,
};
use crate::laakso::{build_laakso, laakso_analytic_spectrum, LaaksoSpec};
use crate::metric_graph::{assemble, discretize, Boundary, Tower};
use crate::pate_a_choux::{
    box_count_dimension, build_choux, build_gasket, decimation_check, gasket_graph_spectrum, hausdorff_dimension,
    lowest_branch, BranchPoint, ChouxSpec, DecimationReport,
};
use crate::metric_graph::GraphMass;

pub const DEFAULT_SEED: u64 = 0x5eed_1a2c;
/// Eigenvector classification tolerance (relative, mass norm).
pub const SPLIT_TOL: f64 = 1e-8;
pub const NESTING_TOL: f64 = 1e-9;
pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const DECIMATION_TOL: f64 = 1e-8;
/// FD model constant after Richardson extrapolation.
pub const EXTRAPOLATED_CONSTANT: f64 = 10.0;
/// Analytic entries below `(1 - margin) * lambda_max` must be attained.
pub const COMPLETENESS_MARGIN: f64 = 0.25;
const COMMUTATOR_SAMPLES: usize = 100;
const ZETA_EXPONENTS: [f64; 4] = [0.75, 1.0, 1.5, 2.0];

#[derive(Debug, Parser)]
#[command(name = "fracspec", version, about = "Spectra of Laplacians on projective-limit fractals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laakso space: analytic set, level spectra, extrapolation and nesting.
    Laakso(RunArgs),
    /// Sierpinski Pâte à Choux: fiber-level spectra, nesting, decimation.
    Choux(RunArgs),
    /// Stitched fractal string: isospectrality, nesting and zeta table.
    String(RunArgs),
    /// Re-reads a run directory and rechecks every report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub refine: Option<usize>,
    #[arg(long)]
    pub pitch: Option<f64>,
    #[arg(long)]
    pub boundary: Option<Boundary>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Nesting tolerance override.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub dir: PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

/// Everything that determines the outputs of a run; written as `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// The spec after command-line overrides.
    pub spec: serde_json::Value,
    pub lambda_max: f64,
    pub pitch: Option<f64>,
    pub seed: u64,
    pub tol: f64,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingSummary {
    pub tolerance: f64,
    pub levels: Vec<NestingReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberCheck {
    pub level: usize,
    pub pullback: usize,
    pub new: usize,
    pub commutator: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaaksoComparison {
    pub pitch: f64,
    pub raw: CompareReport,
    pub extrapolated: CompareReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationStep {
    pub coarse_level: usize,
    pub fine_level: usize,
    pub report: DecimationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationSummary {
    pub steps: Vec<DecimationStep>,
    pub lowest_branch: Vec<BranchPoint>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub hausdorff: f64,
    pub one_plus_gasket: f64,
    pub box_count_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isospectrality {
    pub pitch: f64,
    pub grid: Commensuration,
    pub report: CompareReport,
    pub passed: bool,
}

/// Result of a command: one line per check.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub checks: Vec<(String, bool)>,
}

impl Outcome {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(outcome) => {
            for (name, ok) in &outcome.checks {
                println!("{} {name}", if *ok { "PASS" } else { "FAIL" });
            }
            match (&cli.command, outcome.passed()) {
                (Command::Verify(_), false) => 1,
                _ => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    let threads = match command {
        Command::Laakso(a) | Command::Choux(a) | Command::String(a) => a.threads,
        Command::Verify(v) => v.threads,
    };
    if threads == 0 {
        return Err(Error::InvalidSpec("--threads must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Laakso(a) => cmd_laakso(a),
        Command::Choux(a) => cmd_choux(a),
        Command::String(a) => cmd_string(a),
        Command::Verify(v) => cmd_verify(&v.dir, v.tol),
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Spec files that cannot be read count as bad specs.
fn read_spec<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(dir.join(name), s)?;
    Ok(())
}

fn write_list(dir: &Path, name: &str, list: &SpectrumList) -> Result<()> {
    list.write_csv(fs::File::create(dir.join(name))?)
}

fn check_positive(name: &str, x: Option<f64>) -> Result<()> {
    match x {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(Error::InvalidSpec(format!("{name} must be positive, got {v}"))),
        _ => Ok(()),
    }
}

fn prepare(args: &RunArgs) -> Result<()> {
    check_positive("--lambda-max", args.lambda_max)?;
    check_positive("--pitch", args.pitch)?;
    check_positive("--tol", args.tol)?;
    fs::create_dir_all(&args.out)?;
    Ok(())
}

fn lanczos_options(seed: u64) -> LanczosOptions {
    LanczosOptions { seed, ..LanczosOptions::default() }
}

fn level_list(pairs: &TaggedPairs, level: usize, pitch: Option<f64>, lambda_max: f64) -> SpectrumList {
    pairs
        .spectrum()
        .with_origin(Origin::Numeric { level, pitch, extrapolated: false })
        .with_truncation(lambda_max)
}

/// Writes `level_i.csv`, `numeric.csv`, `nesting.json` and `fibers.json`.
fn tower_outputs(
    out: &Path,
    tower: &Tower,
    pitch: Option<f64>,
    lambda_max: f64,
    tol: f64,
    seed: u64,
    outcome: &mut Outcome,
) -> Result<Vec<SpectrumList>> {
    let tagged = tower_spectra_with(tower, lambda_max, SPLIT_TOL, &lanczos_options(seed))?;
    let lists: Vec<SpectrumList> =
        tagged.iter().enumerate().map(|(i, t)| level_list(t, i, pitch, lambda_max)).collect();
    for (i, list) in lists.iter().enumerate() {
        write_list(out, &format!("level_{i}.csv"), list)?;
    }
    write_list(out, "numeric.csv", lists.last().expect("level 0 always exists"))?;
    let nesting = nesting_summary(&lists, tol)?;
    outcome.check(format!("nesting across {} levels (tol {tol:e})", lists.len()), nesting.passed);
    write_json(out, "nesting.json", &nesting)?;
    let mut fibers = Vec::new();
    for (i, fs) in tower.fibers.iter().enumerate() {
        let level = i + 1;
        let commutator = fs.max_commutator(&tower.operators[level], COMMUTATOR_SAMPLES, seed.wrapping_add(level as u64))?;
        let t = &tagged[level];
        let pullback = t.count(&Tag::Pullback);
        let new = t.count(&Tag::New(level));
        fibers.push(FiberCheck {
            level,
            pullback,
            new,
            commutator,
            passed: commutator <= COMMUTATOR_TOL && pullback + new == t.tags.len(),
        });
    }
    outcome.check("fiber decomposition and commutators", fibers.iter().all(|f| f.passed));
    write_json(out, "fibers.json", &fibers)?;
    Ok(lists)
}

fn nesting_summary(lists: &[SpectrumList], tol: f64) -> Result<NestingSummary> {
    let levels = lists.windows(2).map(|w| verify_nesting(&w[0], &w[1], tol)).collect::<Result<Vec<_>>>()?;
    let passed = levels.iter().all(|r| r.passed && r.max_deviation <= tol);
    Ok(NestingSummary { tolerance: tol, levels, passed })
}

fn cmd_laakso(args: &RunArgs) -> Result<Outcome> {
    prepare(args)?;
    let mut spec: LaaksoSpec = read_spec(&args.spec)?;
    if let Some(r) = args.refine {
        spec.refine = r;
    }
    if let Some(b) = args.boundary {
        spec.boundary = b;
    }
    spec.validate()?;
    if let Some(h) = args.pitch {
        let r = 1.0 / (h * spec.d(spec.depth()) as f64);
        if (r - r.round()).abs() > 1e-9 * r || r.round() < 2.0 {
            return Err(Error::InvalidSpec(format!("pitch {h} is not 1/(r d_n) with integer r >= 2")));
        }
        spec.refine = r.round() as usize;
    }
    let lambda_max = args.lambda_max.unwrap_or(200.0);
    let tol = args.tol.unwrap_or(NESTING_TOL);
    let pitch = spec.pitch();
    let config = RunConfig {
        command: "laakso".into(),
        spec: serde_json::to_value(&spec)?,
        lambda_max,
        pitch: Some(pitch),
        seed: args.seed,
        tol,
        levels: spec.depth() + 1,
    };
    let levels = build_laakso(&spec)?;
    let tower = levels.tower()?;
    let mut outcome = Outcome::default();
    let lists = tower_outputs(&args.out, &tower, Some(pitch), lambda_max, tol, args.seed, &mut outcome)?;

    let analytic = laakso_analytic_spectrum(&spec, lambda_max);
    write_list(&args.out, "analytic.csv", &analytic)?;
    let top = lists.last().expect("level 0 always exists");
    let raw = compare_spectra(
        top,
        &analytic,
        &CompareOptions {
            model: Some(FdModel::raw(pitch)),
            completeness_margin: COMPLETENESS_MARGIN,
            ..CompareOptions::default()
        },
    );

    let fine = assemble(&discretize(levels.graphs.last().expect("level 0 always exists"), pitch / 2.0)?);
    let ex = extrapolate(&tower.operators[spec.depth()], &fine, lambda_max, &lanczos_options(args.seed))?;
    let mut values = ex.values.clone();
    values.sort_by(f64::total_cmp);
    let extrapolated = crate::eigensolve::cluster(&values, crate::eigensolve::CLUSTER_TOL)
        .with_origin(Origin::Numeric { level: spec.depth(), pitch: Some(pitch), extrapolated: true })
        .with_truncation(lambda_max);
    write_list(&args.out, "extrapolated.csv", &extrapolated)?;
    let mut ex_report = compare_spectra(&extrapolated, &analytic, &extrapolated_options(pitch));
    ex_report.convergence = convergence_table(&ex, &analytic);
    let comparison = LaaksoComparison { pitch, passed: raw.passed && ex_report.passed, raw, extrapolated: ex_report };
    outcome.check("raw spectrum within FD tolerance of the closed-form set", comparison.raw.passed);
    outcome.check("extrapolated spectrum matches and attains the closed-form set", comparison.extrapolated.passed);
    write_json(&args.out, "compare.json", &comparison)?;
    write_json(&args.out, "run.json", &config)?;
    Ok(outcome)
}

fn extrapolated_options(pitch: f64) -> CompareOptions {
    CompareOptions {
        model: Some(FdModel { pitch, constant: EXTRAPOLATED_CONSTANT }),
        completeness_margin: COMPLETENESS_MARGIN,
        ..CompareOptions::default()
    }
}

/// Error ratios of the paired coarse and fine values against the nearest
/// analytic entry, one row per distinct nonzero value.
fn convergence_table(ex: &crate::eigensolve::Extrapolation, analytic: &SpectrumList) -> Vec<crate::eigensolve::ConvergenceRow> {
    let mut coarse = Vec::new();
    let mut fine = Vec::new();
    let mut exact = Vec::new();
    for i in 0..ex.values.len() {
        let v = ex.values[i];
        if v.abs() < 1e-6 || (i > 0 && (v - ex.values[i - 1]).abs() <= 1e-7 * v.abs()) {
            continue;
        }
        let Some(a) = analytic
            .entries
            .iter()
            .map(|e| e.value)
            .min_by(|a, b| (a - v).abs().total_cmp(&(b - v).abs()))
        else {
            continue;
        };
        if a > 0.0 {
            coarse.push(ex.coarse[i]);
            fine.push(ex.fine[i]);
            exact.push(a);
        }
    }
    convergence_ratios(&coarse, &fine, &exact)
}

fn cmd_choux(args: &RunArgs) -> Result<Outcome> {
    prepare(args)?;
    let mut spec: ChouxSpec = read_spec(&args.spec)?;
    if let Some(b) = args.boundary {
        spec.boundary = b;
    }
    spec.validate()?;
    if args.pitch.is_some() || args.refine.is_some() {
        return Err(Error::InvalidSpec("gasket graphs take no pitch or refinement".into()));
    }
    let lambda_max = args.lambda_max.unwrap_or(2.5);
    let tol = args.tol.unwrap_or(NESTING_TOL);
    let config = RunConfig {
        command: "choux".into(),
        spec: serde_json::to_value(spec)?,
        lambda_max,
        pitch: None,
        seed: args.seed,
        tol,
        levels: spec.fiber_depth + 1,
    };
    let tower = build_choux(&spec)?.tower()?;
    let mut outcome = Outcome::default();
    tower_outputs(&args.out, &tower, None, lambda_max, tol, args.seed, &mut outcome)?;

    let mut spectra = Vec::new();
    for m in 1..=spec.gasket_level {
        let s = gasket_graph_spectrum(&build_gasket(m), Boundary::Dirichlet, GraphMass::Unit)?;
        write_list(&args.out, &format!("gasket_{m}.csv"), &s)?;
        spectra.push(s);
    }
    let decimation = decimation_summary(&spectra, DECIMATION_TOL);
    outcome.check("gasket decimation explains every eigenvalue", decimation.passed);
    write_json(&args.out, "decimation.json", &decimation)?;
    let dimension = DimensionReport {
        hausdorff: hausdorff_dimension(),
        one_plus_gasket: 1.0 + 3f64.ln() / 2f64.ln(),
        box_count_slope: box_count_dimension(3..=8),
    };
    write_json(&args.out, "dimension.json", &dimension)?;
    write_json(&args.out, "run.json", &config)?;
    Ok(outcome)
}

/// Decimation between consecutive combinatorial Dirichlet spectra
/// `gasket_1, gasket_2, ...`.
fn decimation_summary(spectra: &[SpectrumList], tol: f64) -> DecimationSummary {
    let steps: Vec<DecimationStep> = spectra
        .windows(2)
        .enumerate()
        .map(|(i, w)| DecimationStep { coarse_level: i + 1, fine_level: i + 2, report: decimation_check(&w[0], &w[1], tol) })
        .collect();
    DecimationSummary { passed: steps.iter().all(|s| s.report.passed), steps, lowest_branch: lowest_branch(spectra, 1) }
}

fn cmd_string(args: &RunArgs) -> Result<Outcome> {
    prepare(args)?;
    let spec: StringSpec = read_spec(&args.spec)?;
    spec.validate()?;
    if args.boundary.is_some_and(|b| b != Boundary::Dirichlet) {
        return Err(Error::InvalidSpec("stitched strings carry Dirichlet ends only".into()));
    }
    let lambda_max = args.lambda_max.unwrap_or(spec.lambda_max);
    check_positive("lambda_max", Some(lambda_max))?;
    let tol = args.tol.unwrap_or(NESTING_TOL);
    let levels = build_stitched(&spec)?;
    let pitch = match (args.pitch, args.refine) {
        (Some(h), _) => h,
        (None, Some(r)) => 1.0 / (levels.grid.unit as f64 * r as f64),
        (None, None) => levels.default_pitch(),
    };
    levels.check_pitch(pitch)?;
    let config = RunConfig {
        command: "string".into(),
        spec: serde_json::to_value(&spec)?,
        lambda_max,
        pitch: Some(pitch),
        seed: args.seed,
        tol,
        levels: spec.depth() + 1,
    };
    let tower = levels.tower(pitch)?;
    let mut outcome = Outcome::default();
    let lists = tower_outputs(&args.out, &tower, Some(pitch), lambda_max, tol, args.seed, &mut outcome)?;
    let analytic = string_analytic_spectrum(&spec, lambda_max)?;
    write_list(&args.out, "analytic.csv", &analytic)?;
    let report = isospectrality(lists.last().expect("level 0 always exists"), &analytic, pitch);
    outcome.check("numeric spectrum and multiplicities match the string", report.passed);
    write_json(&args.out, "isospectrality.json", &Isospectrality { pitch, grid: levels.grid.clone(), passed: report.passed, report })?;
    let rows = zeta_table(&analytic, &ZETA_EXPONENTS, lambda_max)?;
    write_zeta_csv(&rows, fs::File::create(args.out.join("zeta.csv"))?)?;
    write_json(&args.out, "run.json", &config)?;
    Ok(outcome)
}

/// Compares below `lambda_max / 2` so that clusters straddling the cut do
/// not count as multiplicity errors.
fn isospectrality(numeric: &SpectrumList, analytic: &SpectrumList, pitch: f64) -> CompareReport {
    let half = numeric.clone().with_truncation(numeric.truncation / 2.0);
    compare_spectra(&half, analytic, &CompareOptions { model: Some(FdModel::raw(pitch)), ..CompareOptions::default() })
}

fn read_list(dir: &Path, name: &str, origin: Origin, truncation: f64) -> Result<SpectrumList> {
    let path = dir.join(name);
    let file = fs::File::open(&path)?;
    SpectrumList::read_csv(file, origin, truncation).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn cmd_verify(dir: &Path, tol: Option<f64>) -> Result<Outcome> {
    check_positive("--tol", tol)?;
    let config: RunConfig = read_json(&dir.join("run.json"))?;
    let tol = tol.unwrap_or(config.tol);
    let numeric = |level: usize| Origin::Numeric { level, pitch: config.pitch, extrapolated: false };
    let lists = (0..config.levels)
        .map(|i| read_list(dir, &format!("level_{i}.csv"), numeric(i), config.lambda_max))
        .collect::<Result<Vec<_>>>()?;
    let top = read_list(dir, "numeric.csv", numeric(config.levels - 1), config.lambda_max)?;
    let mut outcome = Outcome::default();
    outcome.check("numeric.csv equals the deepest level", top == lists[config.levels - 1]);
    outcome.check(format!("nesting across {} levels (tol {tol:e})", lists.len()), nesting_summary(&lists, tol)?.passed);
    let fibers: Vec<FiberCheck> = read_json(&dir.join("fibers.json"))?;
    outcome.check("fiber decomposition and commutators", fibers.iter().all(|f| f.passed));
    let analytic_origin = |formula: &str| Origin::Analytic { formula: formula.into() };
    match config.command.as_str() {
        "laakso" => {
            let pitch = config.pitch.ok_or_else(|| Error::Parse("laakso run without pitch".into()))?;
            let mut analytic = read_list(dir, "analytic.csv", analytic_origin("laakso"), config.lambda_max)?;
            analytic.set_only = true;
            let origin = Origin::Numeric { level: config.levels - 1, pitch: config.pitch, extrapolated: true };
            let ex = read_list(dir, "extrapolated.csv", origin, config.lambda_max)?;
            let report = compare_spectra(&ex, &analytic, &extrapolated_options(pitch));
            outcome.check("extrapolated spectrum matches and attains the closed-form set", report.passed);
            let stored: LaaksoComparison = read_json(&dir.join("compare.json"))?;
            outcome.check("compare.json agrees", stored.extrapolated.passed == report.passed);
        }
        "choux" => {
            let spec: ChouxSpec = serde_json::from_value(config.spec.clone())?;
            let spectra = (1..=spec.gasket_level)
                .map(|m| {
                    let origin = Origin::Numeric { level: m, pitch: None, extrapolated: false };
                    let mut s = read_list(dir, &format!("gasket_{m}.csv"), origin, f64::INFINITY)?;
                    s.truncation = s.entries.last().map_or(0.0, |e| e.value);
                    Ok(s)
                })
                .collect::<Result<Vec<_>>>()?;
            outcome.check("gasket decimation explains every eigenvalue", decimation_summary(&spectra, DECIMATION_TOL).passed);
            let dim: DimensionReport = read_json(&dir.join("dimension.json"))?;
            outcome.check("dimension constant", dim.hausdorff == hausdorff_dimension());
        }
        "string" => {
            let pitch = config.pitch.ok_or_else(|| Error::Parse("string run without pitch".into()))?;
            let analytic = read_list(dir, "analytic.csv", analytic_origin("pi^2 k^2 / l_i^2"), config.lambda_max)?;
            outcome.check("numeric spectrum and multiplicities match the string", isospectrality(&top, &analytic, pitch).passed);
            let rows = read_zeta_csv(fs::File::open(dir.join("zeta.csv"))?)?;
            let again = zeta_table(&analytic, &rows.iter().map(|r| r.s).collect::<Vec<_>>(), config.lambda_max)?;
            let close = rows.iter().zip(&again).all(|(a, b)| (a.partial_sum - b.partial_sum).abs() <= 1e-12 * b.partial_sum.abs());
            outcome.check("zeta table reproduces from analytic.csv", close && rows.len() == again.len());
        }
        other => return Err(Error::Parse(format!("unknown command `{other}` in run.json"))),
    }
    Ok(outcome)
}

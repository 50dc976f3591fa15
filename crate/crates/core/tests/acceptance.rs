//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fractal_spectra::eigensolve::{
    compare_spectra, solve_dense, verify_nesting, CompareOptions, FdModel, LanczosOptions, TaggedPairs,
};
use fractal_spectra::fractal_string::{
    build_stitched, stitched_level_spectra, stitched_numeric_spectrum, string_analytic_spectrum, zeta_partial,
    StringSpec,
};
use fractal_spectra::laakso::{laakso_analytic_spectrum, laakso_extrapolated_spectrum, laakso_level_spectra, LaaksoSpec};
use fractal_spectra::metric_graph::{assemble, discretize, GraphMass};
use fractal_spectra::pate_a_choux::{
    build_choux, build_gasket, choux_level_spectra, decimation_check, gasket_graph_spectrum, hausdorff_dimension,
    ChouxSpec, GasketGraph,
};
use fractal_spectra::{Boundary, Error, MetricGraph, SpectrumList, Tower};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

type Outcome = fractal_spectra::Result<Verdict>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn interval_spectrum(h: f64, k: usize) -> fractal_spectra::Result<Vec<f64>> {
    let g = MetricGraph::interval(1.0, Boundary::Dirichlet, Boundary::Dirichlet);
    Ok(solve_dense(&assemble(&discretize(&g, h)?), k)?.values)
}

fn interval_oracle() -> Outcome {
    let t = Instant::now();
    let h = 1.0 / 128.0;
    let coarse = interval_spectrum(h, 20)?;
    let fine = interval_spectrum(h / 2.0, 20)?;
    let elapsed = t.elapsed();
    let mut worst_discrete = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for k in 1..=20 {
        let kf = k as f64;
        let discrete = 2.0 / (h * h) * (1.0 - (kf * PI * h).cos());
        worst_discrete = worst_discrete.max((coarse[k - 1] - discrete).abs() / discrete);
        let exact = kf * kf * PI * PI;
        let ratio = (exact - coarse[k - 1]) / (exact - fine[k - 1]);
        worst_ratio = worst_ratio.max((ratio / 4.0 - 1.0).abs());
    }
    Ok(verdict(
        worst_discrete <= 1e-10 && worst_ratio <= 0.1 && elapsed < Duration::from_secs(1),
        format!(
            "max rel. dev. from (2/h^2)(1-cos k pi h) {worst_discrete:.1e}, max |ratio/4 - 1| {worst_ratio:.3}, {elapsed:.2?}"
        ),
    ))
}

/// Perfect squares `m^2 pi^2 <= lambda_max`, plus 0 under Neumann ends.
fn squares(lambda_max: f64, neumann: bool) -> Vec<f64> {
    let mut out: Vec<f64> = (1..).map(|m: u64| (m * m) as f64 * PI * PI).take_while(|&v| v <= lambda_max).collect();
    if neumann {
        out.insert(0, 0.0);
    }
    out
}

fn laakso_set() -> Outcome {
    let lambda_max = 200.0;
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut passed = true;
    for depth in 1..=3 {
        let spec = LaaksoSpec::new(vec![2; depth], 32, Boundary::Neumann);
        let analytic = laakso_analytic_spectrum(&spec, lambda_max);
        let oracle = squares(lambda_max, true);
        let same_set = analytic.values().len() == oracle.len()
            && analytic.values().iter().zip(&oracle).all(|(a, b)| (a - b).abs() <= 1e-12 * b.max(1.0));
        let (numeric, _) = laakso_extrapolated_spectrum(&spec, lambda_max, &LanczosOptions::default())?;
        let opts = CompareOptions {
            model: Some(FdModel { pitch: spec.pitch(), constant: 10.0 }),
            completeness_margin: 0.25,
            ..CompareOptions::default()
        };
        let report = compare_spectra(&numeric, &analytic, &opts);
        let attained = oracle
            .iter()
            .filter(|&&v| v <= 150.0)
            .all(|&v| numeric.entries.iter().any(|e| (e.value - v).abs() <= 1e-3 * v.max(1.0)));
        passed &= same_set && report.passed && report.unmatched_numeric.is_empty() && attained;
        notes.push(format!(
            "depth {depth}: {} values, max rel. dev. {:.1e}",
            numeric.len(),
            report.max_relative_deviation
        ));
    }
    let elapsed = t.elapsed();
    notes.push(format!("{elapsed:.2?}"));
    Ok(verdict(passed && elapsed < Duration::from_secs(60), notes.join("; ")))
}

fn lists(spectra: &[TaggedPairs], lambda_max: f64) -> Vec<SpectrumList> {
    spectra.iter().map(|t| t.spectrum().with_truncation(lambda_max)).collect()
}

fn check_nesting(name: &str, lists: &[SpectrumList], notes: &mut Vec<String>) -> fractal_spectra::Result<bool> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for w in lists.windows(2) {
        let r = verify_nesting(&w[0], &w[1], 1e-9)?;
        ok &= r.passed && r.unmatched.is_empty() && r.max_deviation <= 1e-9;
        worst = worst.max(r.max_deviation);
    }
    notes.push(format!("{name} levels 0-{}: {worst:.1e}", lists.len() - 1));
    Ok(ok)
}

struct Case {
    name: &'static str,
    tower: Tower,
    spectra: Vec<TaggedPairs>,
    lambda_max: f64,
}

fn cases() -> fractal_spectra::Result<Vec<Case>> {
    let mut out = Vec::new();
    for j in [vec![2, 2, 2], vec![3, 3, 2]] {
        let spec = LaaksoSpec::new(j, 8, Boundary::Neumann);
        out.push(Case {
            name: if spec.j[0] == 2 { "laakso j=2,2,2" } else { "laakso j=3,3,2" },
            tower: fractal_spectra::laakso::build_laakso(&spec)?.tower()?,
            spectra: laakso_level_spectra(&spec, 400.0, 1e-8)?,
            lambda_max: 400.0,
        });
    }
    let choux = ChouxSpec { fiber_depth: 2, gasket_level: 4, boundary: Boundary::Dirichlet };
    out.push(Case {
        name: "choux m=4",
        tower: build_choux(&choux)?.tower()?,
        spectra: choux_level_spectra(&choux, 2.5, 1e-8)?,
        lambda_max: 2.5,
    });
    let string = StringSpec::new(vec![0.5, 0.25, 0.125], vec![1, 2, 1]);
    let levels = build_stitched(&string)?;
    let pitch = levels.default_pitch();
    out.push(Case {
        name: "string N=3",
        tower: levels.tower(pitch)?,
        spectra: stitched_level_spectra(&string, Some(pitch), 2000.0, 1e-8)?,
        lambda_max: 2000.0,
    });
    Ok(out)
}

fn exact_nesting(cases: &[Case]) -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for c in cases {
        passed &= check_nesting(c.name, &lists(&c.spectra, c.lambda_max), &mut notes)?;
    }
    Ok(verdict(passed, format!("max deviation {}", notes.join(", "))))
}

fn fiber_decomposition(cases: &[Case]) -> Outcome {
    let mut worst_split = 0.0f64;
    let mut worst_commutator = 0.0f64;
    let mut vectors = 0;
    for c in cases {
        for (i, fs) in c.tower.fibers.iter().enumerate() {
            let level = i + 1;
            let op = &c.tower.operators[level];
            for v in &c.spectra[level].pairs.vectors {
                let pv = fs.project(v)?;
                let rest: Vec<f64> = v.iter().zip(&pv).map(|(a, b)| a - b).collect();
                let norm = op.mass_norm(v);
                worst_split = worst_split.max(op.mass_norm(&rest).min(op.mass_norm(&pv)) / norm);
                vectors += 1;
            }
            worst_commutator = worst_commutator.max(fs.max_commutator(op, 100, 0x5eed + level as u64)?);
        }
    }
    Ok(verdict(
        worst_split <= 1e-8 && worst_commutator <= 1e-10,
        format!(
            "{vectors} vectors, max min(|Pv - v|, |Pv|) {worst_split:.1e}, max commutator {worst_commutator:.1e}"
        ),
    ))
}

/// Values `pi^2 k^2 / l^2` merged in floating point, as `(value, multiplicity)`.
fn string_oracle(lengths: &[f64], mults: &[u32], lambda_max: f64) -> Vec<(f64, usize)> {
    let mut raw = Vec::new();
    for (l, &m) in lengths.iter().zip(mults) {
        for k in 1.. {
            let v = PI * PI * (k * k) as f64 / (l * l);
            if v > lambda_max {
                break;
            }
            raw.push((v, m as usize));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (v, m) in raw {
        match out.last_mut() {
            Some(last) if (last.0 - v).abs() <= 1e-9 * v => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

fn string_isospectrality() -> Outcome {
    let t = Instant::now();
    let lambda_max = 140.0 * PI * PI;
    let mut notes = Vec::new();
    let mut passed = true;
    for (lengths, mults) in [(vec![0.5, 0.25], vec![1, 1]), (vec![0.5], vec![3])] {
        let spec = StringSpec::new(lengths.clone(), mults.clone());
        let pitch = build_stitched(&spec)?.default_pitch();
        let analytic = string_analytic_spectrum(&spec, lambda_max)?;
        let oracle = string_oracle(&lengths, &mults, lambda_max);
        let same = analytic.len() == oracle.len()
            && analytic
                .entries
                .iter()
                .zip(&oracle)
                .all(|(e, o)| e.multiplicity == o.1 && (e.value - o.0).abs() <= 1e-12 * o.0);
        let numeric = stitched_numeric_spectrum(&spec, Some(pitch), lambda_max)?.with_truncation(lambda_max / 2.0);
        let report = compare_spectra(
            &numeric,
            &analytic,
            &CompareOptions { model: Some(FdModel::raw(pitch)), ..CompareOptions::default() },
        );
        let mult_at = |k2: f64| numeric.entries.iter().find(|e| (e.value / (PI * PI) / k2 - 1.0).abs() < 1e-3).map(|e| e.multiplicity);
        let expected = if mults == [3] {
            numeric.entries.iter().all(|e| e.multiplicity == 3)
        } else {
            mult_at(16.0) == Some(2) && mult_at(64.0) == Some(2)
        };
        passed &= same && report.passed && expected;
        notes.push(format!(
            "l={lengths:?} m={mults:?}: {} values, max rel. dev. {:.1e}",
            numeric.len(),
            report.max_relative_deviation
        ));
    }
    let elapsed = t.elapsed();
    notes.push(format!("{elapsed:.2?}"));
    Ok(verdict(passed && elapsed < Duration::from_secs(10), notes.join("; ")))
}

fn zeta() -> Outcome {
    let unit = StringSpec::new(vec![1.0], vec![1]);
    let cut = (1e4 * PI).powi(2) * (1.0 + 1e-12);
    let list = string_analytic_spectrum(&unit, cut)?;
    let sum = zeta_partial(&list, 1.0, cut)?;
    let terms = list.total_multiplicity();

    let mut homogeneous = true;
    let cantor = StringSpec::cantor(5);
    let lambda_max = 1e6;
    let base = string_analytic_spectrum(&cantor, lambda_max)?;
    for c in [0.5, 2.0, 1.0 / 3.0, 0.7] {
        let scaled = string_analytic_spectrum(&cantor.scaled(c), lambda_max / (c * c))?;
        homogeneous &= scaled.len() == base.len()
            && base.entries.iter().zip(&scaled.entries).all(|(a, b)| {
                a.multiplicity == b.multiplicity && a.sources == b.sources && (b.value * c * c - a.value).abs() <= 4.0 * f64::EPSILON * a.value
            });
        for s in [0.75, 1.0, 2.0] {
            let z = zeta_partial(&base, s, lambda_max)?;
            let zc = zeta_partial(&scaled, s, lambda_max / (c * c))?;
            homogeneous &= (zc - c.powf(2.0 * s) * z).abs() <= 1e-12 * zc;
        }
    }
    Ok(verdict(
        terms == 10_000 && (sum - 1.0 / 6.0).abs() <= 1e-3 && homogeneous,
        format!("{terms} terms: sum {sum:.8} (1/6 - sum = {:.1e}); homogeneity {homogeneous}", 1.0 / 6.0 - sum),
    ))
}

/// Fraction of `fine` (with multiplicity) that is a preimage of `coarse`
/// under `x (5 - x)` or lies in {2, 5, 6}.
fn preimage_fraction(coarse: &SpectrumList, fine: &SpectrumList) -> f64 {
    let coarse = coarse.values();
    let mut explained = 0;
    for e in &fine.entries {
        let image = e.value * (5.0 - e.value);
        let hit = coarse.iter().any(|&c| (c - image).abs() <= 1e-8 * c.abs().max(1.0))
            || [2.0, 5.0, 6.0].iter().any(|&x: &f64| (e.value - x).abs() <= 1e-8 * x);
        if hit {
            explained += e.multiplicity;
        }
    }
    explained as f64 / fine.total_multiplicity() as f64
}

fn gasket() -> Outcome {
    let spectra = (1..=4)
        .map(|m| gasket_graph_spectrum(&build_gasket(m), Boundary::Dirichlet, GraphMass::Unit))
        .collect::<fractal_spectra::Result<Vec<_>>>()?;
    let mut fractions = Vec::new();
    let mut passed = true;
    for w in spectra.windows(2) {
        let lib = decimation_check(&w[0], &w[1], 1e-8);
        let oracle = preimage_fraction(&w[0], &w[1]);
        passed &= lib.passed && lib.explained_fraction == 1.0 && oracle == 1.0;
        fractions.push(format!("{:.0}%", 100.0 * oracle));
    }
    let mut previous = 3usize;
    for m in 1..=6 {
        let g = build_gasket(m);
        let recursive = 3 * previous - 3;
        passed &= g.vertices.len() == recursive
            && g.vertices.len() == GasketGraph::expected_vertex_count(m)
            && g.vertices.len() == (3usize.pow(m as u32 + 1) + 3) / 2
            && g.edges.len() == 3usize.pow(m as u32 + 1)
            && g.edges.len() == GasketGraph::expected_edge_count(m);
        previous = recursive;
    }
    let d = hausdorff_dimension();
    let exact = 6f64.ln() / 2f64.ln();
    passed &= (d - exact).abs() <= f64::EPSILON * exact;
    Ok(verdict(
        passed,
        format!("explained m=1..3: {}; counts m<=6 ok; dimension {d:.15}", fractions.join(", ")),
    ))
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let p = e.expect("entry").path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).expect("readable"))
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new()?;
    let mut notes = Vec::new();
    let mut passed = true;
    for (cmd, spec) in [
        ("laakso", r#"{"j":[2,2],"refine":32}"#),
        ("choux", r#"{"fiber_depth":2,"gasket_level":4}"#),
        ("string", r#"{"lengths":[0.5,0.25,0.125],"mults":[1,2,1]}"#),
    ] {
        let spec_path = tmp.path().join(format!("{cmd}.json"));
        fs::write(&spec_path, spec)?;
        let mut outputs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "1"), (2, "4")] {
            let out = tmp.path().join(format!("{cmd}_{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_fracspec"))
                .args([cmd, "--spec", spec_path.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .args(["--seed", "12345", "--threads", threads])
                .output()?
                .status;
            passed &= status.success();
            outputs.push(dir_bytes(&out));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        passed &= same;
        notes.push(format!("{cmd}: {} files {}", outputs[0].len(), if same { "identical" } else { "differ" }));
    }
    Ok(verdict(passed, notes.join(", ")))
}

fn main() {
    let shared = cases();
    let criteria: Vec<(&str, Check)> = vec![
        ("1 interval oracle", Box::new(interval_oracle)),
        ("2 Laakso set reproduction", Box::new(laakso_set)),
        ("3 exact nesting", Box::new(|| exact_nesting(shared.as_ref().map_err(|e| Error::Parse(e.to_string()))?))),
        ("4 fiber decomposition", Box::new(|| fiber_decomposition(shared.as_ref().map_err(|e| Error::Parse(e.to_string()))?))),
        ("5 string isospectrality", Box::new(string_isospectrality)),
        ("6 string zeta", Box::new(zeta)),
        ("7 gasket decimation", Box::new(gasket)),
        ("8 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let v = check().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        println!("{} criterion {name}: {} [{:.2?}]", if v.passed { "PASS" } else { "FAIL" }, v.detail, t.elapsed());
        failed += !v.passed as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! Closed-form Laakso spectrum against Richardson-extrapolated finite
//! differences, plus the per-level tagged spectra.
//!
//! `cargo run --example laakso_spectrum -- 2,2,2 32`

use std::time::Instant;

use fractal_spectra::eigensolve::{compare_spectra, CompareOptions, FdModel, LanczosOptions, Tag};
use fractal_spectra::laakso::{laakso_analytic_spectrum, laakso_extrapolated_spectrum, laakso_level_spectra, LaaksoSpec};
use fractal_spectra::metric_graph::Boundary;

fn main() -> fractal_spectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let j: Vec<u32> = args
        .next()
        .unwrap_or_else(|| "2,2".into())
        .split(',')
        .map(|s| s.trim().parse().expect("j entries are integers"))
        .collect();
    let refine: usize = args.next().map_or(32, |s| s.parse().expect("refine is an integer"));
    let lambda_max = 200.0;
    let spec = LaaksoSpec::new(j, refine, Boundary::Neumann);

    let analytic = laakso_analytic_spectrum(&spec, lambda_max);
    let t = Instant::now();
    let (numeric, ex) = laakso_extrapolated_spectrum(&spec, lambda_max, &LanczosOptions::default())?;
    println!("extrapolation at h = {:.3e}: {:.2?}", spec.pitch(), t.elapsed());
    let opts = CompareOptions {
        model: Some(FdModel { pitch: spec.pitch(), constant: 10.0 }),
        completeness_margin: 0.25,
        ..CompareOptions::default()
    };
    let report = compare_spectra(&numeric, &analytic, &opts);
    println!("{:>14} {:>14} {:>14} {:>5}", "analytic", "coarse", "extrapolated", "mult");
    for m in &report.matches {
        let i = ex.values.iter().position(|v| (v - m.numeric).abs() < 1e-6 * m.numeric.max(1.0)).unwrap_or(0);
        println!("{:>14.8} {:>14.8} {:>14.8} {:>5}", m.analytic, ex.coarse[i], m.numeric, m.numeric_multiplicity);
    }
    println!("matched: {}", report.passed);

    let t = Instant::now();
    let levels = laakso_level_spectra(&spec, lambda_max, 1e-8)?;
    println!("level spectra: {:.2?}", t.elapsed());
    for (i, l) in levels.iter().enumerate() {
        println!("level {i}: {} eigenvalues, {} pulled back, {} new", l.tags.len(), l.count(&Tag::Pullback), l.count(&Tag::New(i)));
    }
    Ok(())
}

//! A fractal string realized as a stitched metric graph: level `k` glues
//! `m_k` strands of length `l_k` onto `[0, l_1]`. The graph spectrum equals
//! the string spectrum `{k^2 pi^2 / l_i^2}` with multiplicities.

use std::f64::consts::PI;

use fractal_spectra::eigensolve::{compare_spectra, CompareOptions, FdModel};
use fractal_spectra::fractal_string::{build_stitched, stitched_numeric_spectrum, string_analytic_spectrum, StringSpec};

fn show(spec: StringSpec) -> fractal_spectra::Result<()> {
    let lambda_max = 70.0 * PI * PI;
    let levels = build_stitched(&spec)?;
    let pitch = levels.default_pitch();
    let top = levels.graphs.last().expect("level 0 always exists");
    println!(
        "lengths {:?} mults {:?}: {} vertices, {} edges, pitch {pitch:e}",
        spec.lengths,
        spec.mults,
        top.vertices.len(),
        top.edges.len()
    );
    let analytic = string_analytic_spectrum(&spec, lambda_max)?;
    let numeric = stitched_numeric_spectrum(&spec, Some(pitch), lambda_max)?;
    for e in numeric.below(lambda_max / 2.0) {
        println!("    {:>10.5} pi^2  x{}", e.value / (PI * PI), e.multiplicity);
    }
    let half = numeric.with_truncation(lambda_max / 2.0);
    let opts = CompareOptions { model: Some(FdModel::raw(pitch)), ..CompareOptions::default() };
    let r = compare_spectra(&half, &analytic, &opts);
    println!("    isospectral: {} (max deviation {:.2e})", r.passed, r.max_relative_deviation);
    Ok(())
}

fn main() -> fractal_spectra::Result<()> {
    show(StringSpec::new(vec![0.5, 0.25], vec![1, 1]))?;
    show(StringSpec::new(vec![0.5], vec![3]))?;
    Ok(())
}

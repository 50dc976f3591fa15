//! Finite differences on the Dirichlet unit interval against the two
//! closed forms: the discrete one `(2/h^2)(1 - cos k pi h)` and the
//! continuum one `k^2 pi^2`.

use std::f64::consts::PI;

use fractal_spectra::eigensolve::solve_dense;
use fractal_spectra::metric_graph::{assemble, discretize};
use fractal_spectra::{Boundary, MetricGraph};

fn spectrum(h: f64, k: usize) -> fractal_spectra::Result<Vec<f64>> {
    let g = MetricGraph::interval(1.0, Boundary::Dirichlet, Boundary::Dirichlet);
    Ok(solve_dense(&assemble(&discretize(&g, h)?), k)?.values)
}

fn main() -> fractal_spectra::Result<()> {
    let k = 10;
    let h = 1.0 / 128.0;
    let coarse = spectrum(h, k)?;
    let fine = spectrum(h / 2.0, k)?;
    println!("{:>3} {:>22} {:>12} {:>12} {:>8}", "k", "lambda_h", "vs discrete", "vs k^2pi^2", "ratio");
    for (i, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        let n = (i + 1) as f64;
        let discrete = 2.0 / (h * h) * (1.0 - (n * PI * h).cos());
        let exact = n * n * PI * PI;
        println!(
            "{:>3} {:>22.15} {:>12.2e} {:>12.2e} {:>8.4}",
            i + 1,
            c,
            (c - discrete).abs() / discrete,
            (exact - c) / exact,
            (exact - c) / (exact - f)
        );
    }
    Ok(())
}

//! Partial sums of the spectral zeta function `sum lambda^-s` for the unit
//! interval and a truncated Cantor string.

use std::f64::consts::PI;

use fractal_spectra::fractal_string::{
    abscissa_estimate, dimension_estimate, string_analytic_spectrum, zeta_partial, zeta_table, StringSpec,
};

fn main() -> fractal_spectra::Result<()> {
    let unit = StringSpec::new(vec![1.0], vec![1]);
    for terms in [10u32, 100, 1000, 10_000] {
        let cut = (terms as f64 * PI).powi(2) * (1.0 + 1e-12);
        let list = string_analytic_spectrum(&unit, cut)?;
        let sum = zeta_partial(&list, 1.0, cut)?;
        println!("unit interval, {terms:>5} terms: {sum:.10}, 1/6 - sum = {:.3e}", 1.0 / 6.0 - sum);
    }

    let cantor = StringSpec::cantor(6);
    let d = dimension_estimate(&cantor);
    println!("Cantor string: dimension estimate {d:.4} (log 2 / log 3 = {:.4})", 2f64.ln() / 3f64.ln());
    println!("abscissa estimate {:.4}", abscissa_estimate(&cantor));
    let lambda_max = 1e7;
    let list = string_analytic_spectrum(&cantor, lambda_max)?;
    for row in zeta_table(&list, &[0.75, 1.0, 1.5, 2.0], lambda_max)? {
        println!("s = {:<5} partial sum {:.12e}", row.s, row.partial_sum);
    }
    Ok(())
}

//! Shift-invert Lanczos against the dense solver on a Laakso level, then
//! Lanczos alone on a mesh too large for the dense path.

use std::time::Instant;

use fractal_spectra::eigensolve::{lanczos, solve_dense_all, LanczosOptions};
use fractal_spectra::laakso::{build_laakso, LaaksoSpec};
use fractal_spectra::metric_graph::{assemble, discretize};
use fractal_spectra::{Boundary, Target};

fn main() -> fractal_spectra::Result<()> {
    let spec = LaaksoSpec::new(vec![2, 2], 64, Boundary::Neumann);
    let graph = build_laakso(&spec)?.graphs.pop().expect("level 0 always exists");
    let op = assemble(&discretize(&graph, spec.pitch())?);
    println!("{} nodes", op.dim());

    let t = Instant::now();
    let dense = solve_dense_all(&op)?;
    println!("dense: {:.2?}", t.elapsed());
    let t = Instant::now();
    let sparse = lanczos(&op, Target::UpTo(400.0), &LanczosOptions::default())?;
    println!("lanczos: {} pairs in {:.2?}", sparse.len(), t.elapsed());
    let worst = sparse
        .values
        .iter()
        .zip(&dense.values)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    println!("max relative difference {worst:.2e}, residual {:.2e}", sparse.max_relative_residual(&op));

    let fine = assemble(&discretize(&graph, spec.pitch() / 16.0)?);
    let t = Instant::now();
    let big = lanczos(&fine, Target::Count(12), &LanczosOptions::default())?;
    println!("{} nodes: 12 pairs in {:.2?}, orthogonality defect {:.1e}", fine.dim(), t.elapsed(), big.max_orthogonality_defect(&fine));
    Ok(())
}

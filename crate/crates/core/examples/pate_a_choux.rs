//! Fiber-level spectra of the Sierpinski Pâte à Choux: gasket sheets with
//! binary fibers over `V_k \ V_{k-1}`.
//!
//! `cargo run --example pate_a_choux -- 2 4`

use fractal_spectra::eigensolve::verify_nesting;
use fractal_spectra::pate_a_choux::{build_choux, choux_level_spectra, choux_point_count, hausdorff_dimension, ChouxSpec};
use fractal_spectra::{Boundary, Tag};

fn main() -> fractal_spectra::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let depth = args.next().unwrap_or(2);
    let m = args.next().unwrap_or(4);
    let spec = ChouxSpec { fiber_depth: depth, gasket_level: m, boundary: Boundary::Dirichlet };
    let levels = build_choux(&spec)?;
    for (i, q) in levels.levels.iter().enumerate() {
        println!("F_{i}: {} vertices, {} edges", q.vertices.len(), q.edges.len());
    }
    let lambda_max = 2.5;
    let spectra = choux_level_spectra(&spec, lambda_max, 1e-8)?;
    let lists: Vec<_> = spectra.iter().map(|t| t.spectrum()).collect();
    for (i, t) in spectra.iter().enumerate() {
        println!(
            "level {i}: {} eigenvalues below {lambda_max}, {} pulled back, {} new",
            t.tags.len(),
            t.count(&Tag::Pullback),
            t.count(&Tag::New(i))
        );
        for e in &lists[i].entries {
            println!("    {:.12} x{} {}", e.value, e.multiplicity, e.tag);
        }
    }
    for (i, w) in lists.windows(2).enumerate() {
        let r = verify_nesting(&w[0], &w[1], 1e-9)?;
        println!("level {i} in level {}: max deviation {:.1e}", i + 1, r.max_deviation);
    }
    println!("points at m = {m}: {}", choux_point_count(m));
    println!("dimension log 6 / log 2 = {:.12}", hausdorff_dimension());
    Ok(())
}

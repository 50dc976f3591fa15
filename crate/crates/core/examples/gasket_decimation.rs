//! Spectral decimation on Sierpinski gasket graphs: every Dirichlet
//! eigenvalue at level `m + 1` maps under `l (5 - l)` onto level `m`, or
//! lies in the exceptional set {2, 5, 6}.

use fractal_spectra::metric_graph::GraphMass;
use fractal_spectra::pate_a_choux::{build_gasket, GasketGraph, decimation_check, gasket_graph_spectrum, lowest_branch};
use fractal_spectra::Boundary;

fn main() -> fractal_spectra::Result<()> {
    let mut spectra = Vec::new();
    for m in 1..=5 {
        let g = build_gasket(m);
        println!(
            "V_{m}: {} vertices (expected {}), {} edges (expected {})",
            g.vertices.len(),
            GasketGraph::expected_vertex_count(m),
            g.edges.len(),
            GasketGraph::expected_edge_count(m)
        );
        spectra.push(gasket_graph_spectrum(&g, Boundary::Dirichlet, GraphMass::Unit)?);
    }
    for (m, w) in spectra.windows(2).enumerate() {
        let r = decimation_check(&w[0], &w[1], 1e-8);
        println!(
            "level {} -> {}: {} explained, {} exceptional, {} unexplained ({:.0}%)",
            m + 2,
            m + 1,
            r.matched.len(),
            r.exceptional.len(),
            r.unexplained.len(),
            100.0 * r.explained_fraction
        );
    }
    for b in lowest_branch(&spectra, 1) {
        println!("m = {}: lowest {:.12}, 5^m lambda = {:.10}", b.level, b.eigenvalue, b.renormalized);
    }
    Ok(())
}

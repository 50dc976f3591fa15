//! The fiber average `P` on a Laakso tower: idempotent, self-adjoint in the
//! mass inner product, commuting with `M^-1 A`, and splitting each level
//! spectrum into pullbacks and new vectors.

use fractal_spectra::eigensolve::tower_spectra;
use fractal_spectra::laakso::{build_laakso, LaaksoSpec};
use fractal_spectra::{Boundary, Tag};

fn main() -> fractal_spectra::Result<()> {
    let spec = LaaksoSpec::new(vec![2, 3], 8, Boundary::Neumann);
    let tower = build_laakso(&spec)?.tower()?;
    for (i, fs) in tower.fibers.iter().enumerate() {
        let op = &tower.operators[i + 1];
        let n = fs.upper_len();
        let v: Vec<f64> = (0..n).map(|x| ((x * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let pv = fs.project(&v)?;
        let ppv = fs.project(&pv)?;
        let idem = pv.iter().zip(&ppv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let u: Vec<f64> = (0..n).map(|x| ((x * 104_729) % 97) as f64 / 48.0 - 1.0).collect();
        let sym = (op.inner(&pv, &u) - op.inner(&v, &fs.project(&u)?)).abs();
        println!(
            "P_{}: {} -> {} nodes, |PPv - Pv| = {idem:.1e}, |<Pv,u> - <v,Pu>| = {sym:.1e}, commutator {:.1e}",
            i + 1,
            fs.upper_len(),
            fs.lower_len(),
            fs.max_commutator(op, 100, 7)?
        );
    }
    for (i, t) in tower_spectra(&tower, 400.0, 1e-8)?.iter().enumerate() {
        println!("level {i}: {} eigenpairs, {} pulled back, {} new", t.tags.len(), t.count(&Tag::Pullback), t.count(&Tag::New(i)));
    }
    Ok(())
}

use fractal_spectra::eigensolve::{
    cluster, counting_function, lanczos, solve_dense, solve_dense_all, tower_spectra, verify_nesting, LanczosOptions,
};
use fractal_spectra::fractal_string::{build_stitched, string_analytic_spectrum, StringSpec};
use fractal_spectra::laakso::{build_laakso, LaaksoSpec};
use fractal_spectra::metric_graph::{assemble, dirichlet_energy, discretize};
use fractal_spectra::pate_a_choux::{build_choux, ChouxSpec};
use fractal_spectra::sparse::CsrMatrix;
use fractal_spectra::{approximate, Boundary, DiscreteOperator, Rational, SpectrumList, Target, Tower};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn laakso_spec() -> impl Strategy<Value = LaaksoSpec> {
    (2u32..=3, prop::collection::vec(any::<bool>(), 1..=2), 2usize..=5, any::<bool>()).prop_map(
        |(base, bumps, refine, neumann)| {
            let j = bumps.into_iter().map(|b| base + b as u32).collect();
            let boundary = if neumann { Boundary::Neumann } else { Boundary::Dirichlet };
            LaaksoSpec::new(j, refine, boundary)
        },
    )
}

fn string_spec() -> impl Strategy<Value = StringSpec> {
    (1usize..=3, prop::collection::vec(1u32..=3, 3)).prop_map(|(n, mults)| {
        let lengths = (0..n).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
        StringSpec::new(lengths, mults[..n].to_vec())
    })
}

fn towers() -> impl Strategy<Value = Tower> {
    prop_oneof![
        laakso_spec().prop_map(|s| build_laakso(&s).unwrap().tower().unwrap()),
        (0usize..=2, 0usize..=1, any::<bool>()).prop_map(|(i, extra, dirichlet)| {
            let boundary = if dirichlet { Boundary::Dirichlet } else { Boundary::Neumann };
            let spec = ChouxSpec { fiber_depth: i, gasket_level: (i + extra).max(1), boundary };
            build_choux(&spec).unwrap().tower().unwrap()
        }),
        string_spec().prop_map(|s| {
            let levels = build_stitched(&s).unwrap();
            levels.tower(1.0 / (8.0 * levels.grid.unit as f64)).unwrap()
        }),
    ]
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn fiber_projection_is_an_orthogonal_projector(tower in towers(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (i, fs) in tower.fibers.iter().enumerate() {
            let op = &tower.operators[i + 1];
            let n = fs.upper_len();
            let v = random_vec(&mut rng, n);
            let u = random_vec(&mut rng, n);
            let pv = fs.project(&v).unwrap();
            let ppv = fs.project(&pv).unwrap();
            let scale = op.mass_norm(&v).max(1e-300);
            for (a, b) in pv.iter().zip(&ppv) {
                prop_assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
            }
            let pu = fs.project(&u).unwrap();
            prop_assert!((op.inner(&pv, &u) - op.inner(&v, &pu)).abs() <= 1e-12 * scale * op.mass_norm(&u));
            let w = fs.complement(&v).unwrap();
            prop_assert!(op.inner(&pv, &w).abs() <= 1e-12 * scale * scale);
            for k in 0..n {
                prop_assert!((pv[k] + w[k] - v[k]).abs() <= 1e-14 * (1.0 + v[k].abs()));
            }
            prop_assert!(fs.commutator(op, &v).unwrap() <= 1e-10 * scale);
        }
    }

    #[test]
    fn lift_is_an_isometric_intertwiner(tower in towers(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (i, fs) in tower.fibers.iter().enumerate() {
            let (lower, upper) = (&tower.operators[i], &tower.operators[i + 1]);
            let u = random_vec(&mut rng, fs.lower_len());
            let lifted = fs.lift(&u).unwrap();
            prop_assert!((upper.mass_norm(&lifted) - lower.mass_norm(&u)).abs() <= 1e-12 * lower.mass_norm(&u));
            let lu = fs.lift(&lower.laplacian(&u)).unwrap();
            let ul = upper.laplacian(&lifted);
            let diff: Vec<f64> = lu.iter().zip(&ul).map(|(a, b)| a - b).collect();
            let scale = upper.mass_norm(&ul).max(1.0);
            prop_assert!(upper.mass_norm(&diff) <= 1e-10 * scale);
            prop_assert_eq!(fs.project_down(&lifted).unwrap().len(), u.len());
        }
    }

    #[test]
    fn lifted_eigenpairs_stay_eigenpairs(tower in towers()) {
        for (i, fs) in tower.fibers.iter().enumerate() {
            let (lower, upper) = (&tower.operators[i], &tower.operators[i + 1]);
            let pairs = solve_dense(lower, 6.min(lower.dim())).unwrap();
            for (lambda, u) in pairs.values.iter().zip(&pairs.vectors) {
                let r = upper.residual(*lambda, &fs.lift(u).unwrap());
                prop_assert!(r <= 1e-10 * lambda.max(1.0) * lower.mass_norm(u), "{r}");
            }
        }
    }

    #[test]
    fn level_spectra_nest(tower in towers()) {
        let spectra = tower_spectra(&tower, 200.0, 1e-8).unwrap();
        let lists: Vec<SpectrumList> = spectra.iter().map(|t| t.spectrum().with_truncation(200.0)).collect();
        for w in lists.windows(2) {
            let r = verify_nesting(&w[0], &w[1], 1e-9).unwrap();
            prop_assert!(r.passed && r.unmatched.is_empty(), "{:?}", r);
        }
    }

    #[test]
    fn energy_is_markov(spec in laakso_spec(), seed in any::<u64>()) {
        let graph = build_laakso(&spec).unwrap().graphs.pop().unwrap();
        let op = assemble(&discretize(&graph, spec.pitch()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..op.dim()).map(|_| rng.random_range(-0.5..1.5)).collect();
        let clipped: Vec<f64> = v.iter().map(|x| x.clamp(0.0, 1.0)).collect();
        prop_assert!(dirichlet_energy(&op, &clipped).unwrap() <= dirichlet_energy(&op, &v).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn mass_equals_measure(spec in laakso_spec()) {
        for g in &build_laakso(&spec).unwrap().graphs {
            let mesh = discretize(g, spec.pitch()).unwrap();
            prop_assert!((mesh.total_mass() - g.total_measure()).abs() <= 1e-12);
        }
    }

    #[test]
    fn clustering_preserves_counts(raw in prop::collection::vec(0.0f64..100.0, 0..40), dup in prop::collection::vec(0usize..4, 40)) {
        let mut eigs = Vec::new();
        for (x, d) in raw.iter().zip(&dup) {
            for _ in 0..=*d {
                eigs.push(*x);
            }
        }
        eigs.sort_by(f64::total_cmp);
        let list = cluster(&eigs, 1e-7).with_truncation(100.0);
        prop_assert_eq!(list.total_multiplicity(), eigs.len());
        prop_assert_eq!(counting_function(&list, 100.0).unwrap(), eigs.len());
        let mut last = 0;
        for lambda in [0.0, 1.0, 10.0, 50.0, 99.0] {
            let n = counting_function(&list, lambda).unwrap();
            prop_assert!(n >= last);
            prop_assert_eq!(n, eigs.iter().filter(|&&e| e <= lambda).count());
            last = n;
        }
        let text = list.to_csv_string().unwrap();
        let back = SpectrumList::read_csv(text.as_bytes(), list.origin.clone(), list.truncation).unwrap();
        prop_assert_eq!(back, list);
    }

    #[test]
    fn string_multiplicities_add_up(spec in string_spec(), c in 0.25f64..4.0) {
        let lambda_max = 2000.0;
        let list = string_analytic_spectrum(&spec, lambda_max).unwrap();
        let expected: usize = spec
            .lengths
            .iter()
            .zip(&spec.mults)
            .map(|(l, &m)| m as usize * (lambda_max.sqrt() * l / std::f64::consts::PI).floor() as usize)
            .sum();
        prop_assert_eq!(list.total_multiplicity(), expected);
        let scaled = string_analytic_spectrum(&spec.scaled(c), lambda_max / (c * c)).unwrap();
        prop_assert_eq!(scaled.len(), list.len());
        for (a, b) in list.entries.iter().zip(&scaled.entries) {
            prop_assert_eq!(a.multiplicity, b.multiplicity);
            prop_assert!((b.value * c * c - a.value).abs() <= 1e-12 * a.value);
        }
    }

    #[test]
    fn rationals_are_recovered(p in 1i64..1000, q in 1i64..1000) {
        let r = Rational::new(p, q);
        let x = *r.numer() as f64 / *r.denom() as f64;
        prop_assert_eq!(approximate(x, 1000), Some(r));
    }
}

/// Random sparse SPD pencil: weighted graph Laplacian plus a positive
/// diagonal, with positive masses.
fn random_pencil(rng: &mut ChaCha8Rng, n: usize) -> DiscreteOperator {
    let mut triplets = Vec::new();
    for i in 0..n {
        triplets.push((i, i, rng.random_range(0.01..1.0)));
        for _ in 0..3 {
            let j = rng.random_range(0..n);
            if j != i {
                let w = rng.random_range(0.1..10.0);
                triplets.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
            }
        }
    }
    let mass = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
    DiscreteOperator { stiffness: CsrMatrix::from_triplets(n, triplets), mass }
}

#[test]
fn lanczos_agrees_with_dense_on_random_pencils() {
    for trial in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let n = rng.random_range(20..=500);
        let op = random_pencil(&mut rng, n);
        let dense = solve_dense_all(&op).unwrap();
        let opts = LanczosOptions { seed: trial, ..LanczosOptions::default() };
        let sparse = lanczos(&op, Target::Count(10), &opts).unwrap();
        assert_eq!(sparse.len(), 10);
        for (a, b) in sparse.values.iter().zip(&dense.values) {
            assert!((a - b).abs() <= 1e-8 * b.abs(), "trial {trial}: {a} vs {b}");
        }
        assert!(sparse.max_relative_residual(&op) < 1e-8, "trial {trial}");
        assert!(sparse.max_orthogonality_defect(&op) < 1e-8, "trial {trial}");
    }
}

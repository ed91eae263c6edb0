use num_complex::Complex64;
use proptest::prelude::*;
use qdp_core::analysis;
use qdp_core::field::{rank_weight, transpose_layout};
use qdp_core::noise::{haar_vector, GibbsNoise};
use qdp_core::pgm;
use qdp_core::sampler;
use qdp_core::spectral::{dft_dense, idft_dense, AmplitudeFn};
use qdp_core::{seed, Caps, FieldSpec, LinearCode, RepresentativeRule};

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![(2u32, 1u32), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2)])
        .prop_map(|(p, s)| FieldSpec::new(p, s).unwrap())
}

fn small_instance() -> impl Strategy<Value = (FieldSpec, usize, usize, u64)> {
    prop::sample::select(vec![(2usize, 8usize), (3, 5), (4, 4), (5, 3)]).prop_flat_map(|(q, nmax)| {
        (2..=nmax).prop_flat_map(move |n| {
            (Just(FieldSpec::with_order(q).unwrap()), Just(n), 1..n, any::<u64>())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_operations_are_consistent(f in field_strategy(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = f.q() as u32;
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        prop_assert!((f.character(a, b) - f.character(b, a)).norm() < 1e-12);
        let chi = f.character(a, f.add(b, c));
        prop_assert!((chi - f.character(a, b) * f.character(a, c)).norm() < 1e-12);
    }

    #[test]
    fn vector_index_round_trip(f in field_strategy(), n in 1usize..6, seed in any::<u64>()) {
        let total = f.q().pow(n as u32);
        let idx = (seed % total as u64) as usize;
        let v = f.vector_at(idx, n);
        prop_assert_eq!(f.index_of(&v), idx);
    }

    #[test]
    fn rank_weight_is_transpose_invariant(a in 1usize..5, b in 1usize..5, seed in any::<u64>()) {
        use rand::Rng;
        let f = FieldSpec::new(3, 1).unwrap();
        let mut rng = seed::rng(seed);
        let x: Vec<u32> = (0..a * b).map(|_| rng.gen_range(0..3)).collect();
        prop_assert_eq!(
            rank_weight(&f, &x, a, b).unwrap(),
            rank_weight(&f, &transpose_layout(&x, a, b), b, a).unwrap()
        );
    }

    #[test]
    fn parseval_and_inverse(f in prop::sample::select(vec![2usize, 3, 4]), n in 1usize..6, seed in any::<u64>()) {
        let field = FieldSpec::with_order(f).unwrap();
        let mut rng = seed::rng(seed);
        let v = haar_vector::<f64, _>(f.pow(n as u32), &mut rng);
        let vh = dft_dense(&field, n, &v).unwrap();
        let norm: f64 = vh.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let back = idft_dense(&field, n, &vh).unwrap();
        for (x, y) in back.iter().zip(&v) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn code_dimensions_and_syndromes((f, n, k, s) in small_instance()) {
        let code = LinearCode::random(&f, n, k, s).unwrap();
        prop_assert_eq!(code.size() * code.dual_size(), f.q().pow(n as u32));
        prop_assert!(code.rank() <= k);
        let table = code.syndrome_table();
        for (idx, &syn) in table.iter().enumerate() {
            let y = f.vector_at(idx, n);
            prop_assert_eq!(code.syndrome_index(&y), syn as usize);
            prop_assert_eq!(syn == 0, code.dual_contains(&y));
        }
        for sidx in 0..code.syndrome_count() {
            let u = code.coset_representative(sidx).unwrap();
            prop_assert_eq!(code.syndrome_index(u.entries()), sidx);
        }
    }

    #[test]
    fn pgm_bounds_and_unit_mass((f, n, k, s) in small_instance(), seed in any::<u64>()) {
        let caps = Caps::default();
        let mut rng = seed::rng(seed);
        let a = AmplitudeFn::<f64>::product(&f, haar_vector(f.q(), &mut rng), n).unwrap();
        let code = LinearCode::random(&f, n, k, s).unwrap();
        let r = pgm::pgm_success(&code, &a, &caps).unwrap();
        prop_assert!((r.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(r.p_pgm <= 1.0 + 1e-12);
        prop_assert!(r.p_pgm >= 1.0 / code.size() as f64 - 1e-12);
    }

    #[test]
    fn coset_masses_ignore_representatives((f, n, k, s) in small_instance()) {
        let caps = Caps::default();
        let a = AmplitudeFn::<f64>::product(&f, qdp_core::noise::bernoulli_g(&f, 0.2).unwrap(), n).unwrap();
        let code = LinearCode::random(&f, n, k, s).unwrap();
        let shifted = code.clone().with_rule(RepresentativeRule::Shifted);
        let spec = pgm::spectrum(&a, &caps).unwrap();
        for sidx in 0..code.syndrome_count() {
            let direct: f64 = shifted
                .enumerate_coset(sidx)
                .unwrap()
                .iter()
                .map(|y| spec[y.index(&f)])
                .sum();
            let z = pgm::coset_masses_from_spectrum(&code, &spec)[sidx];
            prop_assert!((z * z - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_law_is_normalized_and_phase_free((f, n, k, s) in small_instance(), theta in 0.0f64..std::f64::consts::TAU) {
        let caps = Caps::default();
        let a = AmplitudeFn::<f64>::product(&f, qdp_core::noise::bernoulli_g(&f, 0.15).unwrap(), n).unwrap();
        let code = LinearCode::random(&f, n, k, s).unwrap();
        let Ok(m) = sampler::dual_distribution(&code, &a, &caps) else { return Ok(()); };
        let total: f64 = m.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let rotated = a.with_phase(Complex64::from_polar(1.0, theta), &caps).unwrap();
        let m2 = sampler::dual_distribution(&code, &rotated, &caps).unwrap();
        for (x, y) in m.probabilities().iter().zip(m2.probabilities()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!(m.p_zero_branch() >= m.success_floor() - 1e-12);
    }

    #[test]
    fn sampling_is_seed_deterministic(seed in any::<u64>()) {
        let f = FieldSpec::new(2, 1).unwrap();
        let caps = Caps::default();
        let a = AmplitudeFn::<f64>::product(&f, qdp_core::noise::bernoulli_g(&f, 0.1).unwrap(), 8).unwrap();
        let code = LinearCode::random(&f, 8, 3, 1).unwrap();
        let m = sampler::dual_distribution(&code, &a, &caps).unwrap();
        prop_assert_eq!(sampler::sample_dual(&m, 200, seed), sampler::sample_dual(&m, 200, seed));
    }

    #[test]
    fn hirschman_holds(q in prop::sample::select(vec![2usize, 3, 4, 5, 7]), seed in any::<u64>()) {
        let f = FieldSpec::with_order(q).unwrap();
        let mut rng = seed::rng(seed);
        let g = haar_vector::<f64, _>(q, &mut rng);
        prop_assert!(analysis::hirschman_check(&f, &g).unwrap().holds);
    }

    #[test]
    fn entropy_within_range(q in 2usize..6, seed in any::<u64>()) {
        let mut rng = seed::rng(seed);
        let v = haar_vector::<f64, _>(q, &mut rng);
        let p: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
        let h = analysis::entropy_q(&p, q).unwrap();
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&h));
    }

    #[test]
    fn product_typical_set_sandwich(p in 0.05f64..0.45, n in 4usize..40, eps in 0.05f64..0.5) {
        let t = analysis::typical_set_product(&[1.0 - p, p], 2, n, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&t.defect));
        for c in t.sandwich_checks().iter().chain(t.cardinality_checks().iter()) {
            if c.name == "cardinality_lower" && t.cardinality_f64() == 0.0 {
                continue;
            }
            prop_assert!(c.pass, "{:?}", c);
        }
    }

    #[test]
    fn gibbs_law_decreasing_in_weight(lambda in 0.1f64..4.0, q in prop::sample::select(vec![2usize, 3, 5])) {
        let f = FieldSpec::with_order(q).unwrap();
        let g = GibbsNoise::<f64>::hamming(&f, lambda).unwrap();
        prop_assert!(g.r[0] > g.r[1]);
        let total: f64 = g.r.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

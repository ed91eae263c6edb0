//! Acceptance criteria, one line each.

use qdp_core::analysis::{self, FamilyConstants};
use qdp_core::code::kernel_intersection_moments;
use qdp_core::noise::{bernoulli_g, haar_vector, point_mass_g, uniform_g, GibbsNoise, WeightKind};
use qdp_core::pgm::{self, EnsembleMode};
use qdp_core::sampler::{self, MinWeightConfig};
use qdp_core::spectral::AmplitudeFn;
use qdp_core::{seed, verify, Caps, Elem, FieldSpec, LinearCode, RankNoiseParams};
use rand::Rng;
use std::process::Command;
use std::time::{Duration, Instant};

const MASTER: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = fn() -> Outcome;

fn within(elapsed: Duration, limit: Option<Duration>) -> bool {
    limit.is_none_or(|l| elapsed <= l)
}

fn c1_pgm_oracle() -> Outcome {
    let caps = Caps::default();
    let mut worst = 0f64;
    let mut count = 0;
    let mut failures = Vec::new();
    for i in 0..60 {
        let (code, f, label) = verify::oracle_instance(i, MASTER).expect("instance");
        let closed = pgm::pgm_success(&code, &f, &caps).expect("closed form").p_pgm;
        let dense = pgm::pgm_dense_oracle(&code, &f, &caps).expect("dense oracle").mean;
        let d = (closed - dense).abs();
        worst = worst.max(d);
        count += 1;
        if d > 1e-9 {
            failures.push(label);
        }
    }
    outcome(failures.is_empty(), format!("{count} instances, max |closed - dense| = {worst:.2e}, failing {failures:?}"))
}

fn c2_boundaries() -> Outcome {
    let caps = Caps::default();
    let mut worst = 0f64;
    let mut count = 0;
    for q in [2usize, 3] {
        let f = FieldSpec::with_order(q).unwrap();
        for n in 2..=10 {
            for k in 1..=4.min(n - 1) {
                for trial in 0..2u64 {
                    let s = seed::derive_seed(MASTER, seed::STREAM_CODE, (q * 1000 + n * 10 + k) as u64 * 2 + trial);
                    let code = LinearCode::random(&f, n, k, s).unwrap();
                    let d = pgm::pgm_success(&code, &AmplitudeFn::<f64>::delta(&f, n), &caps).unwrap().p_pgm;
                    let u = pgm::pgm_success(&code, &AmplitudeFn::<f64>::uniform(&f, n), &caps).unwrap().p_pgm;
                    let expect = (q as f64).powi(-(code.rank() as i32));
                    worst = worst.max((d - 1.0).abs()).max((u - expect).abs());
                    count += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("{count} codes, max deviation {worst:.2e}"))
}

fn c3_hirschman() -> Outcome {
    let mut min_sum = f64::INFINITY;
    let mut eq_worst = 0f64;
    for q in [2usize, 3, 5] {
        let f = FieldSpec::with_order(q).unwrap();
        let mut rng = seed::derived_rng(MASTER, seed::STREAM_MONTE_CARLO, q as u64);
        for _ in 0..1000 {
            let g = haar_vector::<f64, _>(q, &mut rng);
            min_sum = min_sum.min(analysis::hirschman_check(&f, &g).unwrap().sum);
        }
        for g in [point_mass_g::<f64>(&f), uniform_g::<f64>(&f)] {
            let s = analysis::hirschman_check(&f, &g).unwrap().sum;
            eq_worst = eq_worst.max((s - 1.0).abs());
        }
    }
    let pass = min_sum >= 1.0 - 1e-12 && eq_worst <= 1e-12;
    outcome(pass, format!("min sum over 3000 random g = {min_sum:.6}, equality deviation {eq_worst:.2e}"))
}

fn c4_rank_duality() -> Outcome {
    let caps = Caps::default();
    let mut worst = 0f64;
    for (q, a, b, t) in verify::RANK_DUALITY_CASES {
        worst = worst.max(verify::rank_duality_residual(q, a, b, t, &caps).unwrap());
    }
    let f = FieldSpec::new(2, 1).unwrap();
    let params = RankNoiseParams::new(&f, 2, 2, 1).unwrap();
    let closed = params.materialize::<f64>(&caps).unwrap();
    let oracle = params.subspace_oracle::<f64>().unwrap();
    let sub = closed.iter().zip(&oracle).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    outcome(worst <= 1e-10 && sub <= 1e-10, format!("max duality residual {worst:.2e}, subspace oracle residual {sub:.2e}"))
}

fn c5_ensemble() -> Outcome {
    let f = FieldSpec::new(2, 1).unwrap();
    let mut worst = 0f64;
    let mut configs = 0;
    for n in 2..=5usize {
        for k in 1..=3.min(n - 1) {
            let t = analysis::typical_set_product(&[0.8, 0.2], 2, n, 0.3).unwrap();
            let c = FamilyConstants { h: t.rate, alpha: 0.3, beta: 0.3, k1: 1.0, k2: 1.0 };
            for s_idx in [0usize, 1, (1 << n) - 1] {
                let s = f.vector_at(s_idx, n);
                let m = pgm::ztilde_moments(&f, k, &t, c, &s, EnsembleMode::Exhaustive).unwrap();
                assert_eq!(m.samples, 1 << (k * n));
                worst = worst.max((m.mean - m.exact_mean).abs());
                configs += 1;
            }
        }
    }
    let mut rng = seed::derived_rng(MASTER, seed::STREAM_MONTE_CARLO, 50);
    let mut bound_failures = 0;
    for set_idx in 0..20 {
        let (n, k) = if set_idx % 2 == 0 { (4, 2) } else { (5, 2) };
        let set: Vec<Vec<Elem>> =
            (0..1usize << n).filter(|_| rng.gen_bool(0.35)).map(|i| f.vector_at(i, n)).collect();
        let (mean, var) = kernel_intersection_moments(&f, n, k, &set).unwrap();
        let e = set.len() as f64;
        let scale = 2f64.powi(-((n - k) as i32));
        let ok = mean >= e * scale - 1e-12 && mean <= (e - 1.0).max(0.0) * scale + 1.0 + 1e-12 && var <= mean + 1e-12;
        if !ok {
            bound_failures += 1;
        }
    }
    let pass = worst <= 1e-12 && bound_failures == 0;
    outcome(pass, format!("{configs} exhaustive ensembles, max |mean - exact| = {worst:.2e}; 20 sets, {bound_failures} bound failures"))
}

fn c6_defect() -> Outcome {
    let f = FieldSpec::new(2, 1).unwrap();
    let r = [0.9, 0.1];
    let mut failures = Vec::new();
    let mut cells = Vec::new();
    for eps in [0.05, 0.1, 0.2] {
        for n in [8usize, 16, 32, 64] {
            let t = analysis::typical_set_product(&r, 2, n, eps).unwrap();
            let bound = analysis::hoeffding_bound(&r, 2, n, eps);
            cells.push(format!("({eps},{n}) {:.4}<={:.4}", t.defect, bound));
            if t.defect > bound {
                failures.push(format!("eps={eps} n={n}: delta {:.6} > bound {:.6}", t.defect, bound));
            }
        }
    }
    let mut mc = Vec::new();
    for (i, eps) in [0.05, 0.1, 0.2].into_iter().enumerate() {
        let t = analysis::typical_set_product(&r, 2, 16, eps).unwrap();
        let (est, sigma) =
            analysis::defect_monte_carlo(&t, &f, 100_000, seed::derive_seed(MASTER, seed::STREAM_MONTE_CARLO, 60 + i as u64))
                .unwrap();
        let sigma = sigma.max(1e-5);
        mc.push(format!("eps={eps}: mc {est:.5} exact {:.5}", t.defect));
        if (est - t.defect).abs() > 4.0 * sigma {
            failures.push(format!("monte carlo eps={eps}: {est} vs {} (sigma {sigma})", t.defect));
        }
    }
    outcome(failures.is_empty(), format!("failing {failures:?}; cells {cells:?}; {mc:?}"))
}

fn c7_sampler() -> Outcome {
    let caps = Caps::default();
    let f = FieldSpec::new(2, 1).unwrap();
    let mut rng = seed::derived_rng(MASTER, seed::STREAM_NOISE, 70);
    let mut cond = 0f64;
    let mut gram = 0f64;
    let mut instances = 0;
    for n in 3..=6usize {
        for k in 1..n {
            let g = match (n + k) % 3 {
                0 => bernoulli_g(&f, rng.gen_range(0.02..0.3)).unwrap(),
                1 => haar_vector(2, &mut rng),
                _ => GibbsNoise::<f64>::hamming(&f, rng.gen_range(0.3..2.0)).unwrap().g(&f).unwrap(),
            };
            let a = AmplitudeFn::<f64>::product(&f, g, n).unwrap();
            let code = LinearCode::random(&f, n, k, seed::derive_seed(MASTER, seed::STREAM_CODE, 700 + (n * 10 + k) as u64)).unwrap();
            let Ok(model) = sampler::dual_distribution(&code, &a, &caps) else { continue };
            let o = sampler::regev_pipeline_oracle(&code, &a, &caps).unwrap();
            let d = o.conditional.iter().zip(model.probabilities()).map(|(x, y)| (x - y).abs()).fold(o.off_support, f64::max);
            cond = cond.max(d);
            gram = gram.max(o.gram_residual);
            instances += 1;
        }
    }
    let code = LinearCode::random(&f, 6, 3, seed::derive_seed(MASTER, seed::STREAM_CODE, 777)).unwrap();
    let a = AmplitudeFn::<f64>::product(&f, bernoulli_g(&f, 0.1).unwrap(), 6).unwrap();
    let model = sampler::dual_distribution::<f64>(&code, &a, &caps).unwrap();
    let draws = 100_000;
    let mut hist = vec![0usize; model.support().len()];
    for i in sampler::sample_indices(&model, draws, seed::derive_seed(MASTER, seed::STREAM_SAMPLE, 7)) {
        hist[i] += 1;
    }
    let mut worst_z = 0f64;
    for (&h, &p) in hist.iter().zip(model.probabilities()) {
        let sigma = (p * (1.0 - p) / draws as f64).sqrt().max(1.0 / draws as f64);
        worst_z = worst_z.max((h as f64 / draws as f64 - p).abs() / sigma);
    }
    let pass = cond <= 1e-10 && gram <= 1e-10 && worst_z <= 4.0;
    outcome(
        pass,
        format!("{instances} pipelines, max conditional deviation {cond:.2e}, gram residual {gram:.2e}; {} bins, worst z = {worst_z:.2}", hist.len()),
    )
}

fn c8_threshold() -> Outcome {
    let caps = Caps::default();
    let f = FieldSpec::new(2, 1).unwrap();
    let a = AmplitudeFn::<f64>::product(&f, bernoulli_g(&f, 0.1).unwrap(), 14).unwrap();
    let points = pgm::pgm_sweep(&a, 100, 1, &caps).unwrap();
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let monotone = means.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let gap = means[1] - means[11];
    let mut converse_checked = 0;
    let mut converse_fail = 0;
    for eps in [0.1, 0.2, 0.3] {
        let t = analysis::typical_set_product(&[0.8, 0.2], 2, 14, eps).unwrap();
        for k in 1..14 {
            for trial in 0..10u64 {
                let s = seed::derive_seed(MASTER, seed::STREAM_CODE, 800 + k as u64 * 16 + trial);
                let code = LinearCode::random(&f, 14, k, s).unwrap();
                let p = pgm::pgm_success(&code, &a, &caps).unwrap().p_pgm;
                converse_checked += 1;
                if p > pgm::converse_bound(&code, &t) + 1e-10 {
                    converse_fail += 1;
                }
            }
        }
    }
    let pass = monotone && gap >= 0.3 && converse_fail == 0;
    outcome(
        pass,
        format!(
            "monotone {monotone}, P(2) - P(12) = {:.4} - {:.4} = {gap:.4}, converse violations {converse_fail}/{converse_checked}",
            means[1], means[11]
        ),
    )
}

fn strictly_decreasing(params: &RankNoiseParams) -> bool {
    let law = params.dual();
    (1..=params.a().min(params.b())).all(|u| law.prob_at_rank(u) < law.prob_at_rank(u - 1))
}

fn c9_min_weight() -> Outcome {
    let caps = Caps::default();
    let f = FieldSpec::new(2, 1).unwrap();
    let mut cases: Vec<(String, AmplitudeFn<f64>, WeightKind, usize)> = vec![
        ("bernoulli:0.1 n=12".into(), AmplitudeFn::<f64>::product(&f, bernoulli_g(&f, 0.1).unwrap(), 12).unwrap(), WeightKind::Hamming, 6),
        ("bernoulli:0.2 n=10".into(), AmplitudeFn::<f64>::product(&f, bernoulli_g(&f, 0.2).unwrap(), 10).unwrap(), WeightKind::Hamming, 4),
    ];
    let gibbs = GibbsNoise::<f64>::hamming(&f, 1.2).unwrap();
    cases.push((
        "gibbs:1.2 n=12".into(),
        AmplitudeFn::<f64>::product(&f, gibbs.g(&f).unwrap(), 12).unwrap(),
        WeightKind::Additive(gibbs.weights.clone()),
        5,
    ));
    let mut excluded = Vec::new();
    for (a, b, t) in [(2usize, 3usize, 1usize), (3, 3, 1), (3, 3, 2), (2, 4, 1), (3, 4, 1), (3, 4, 2)] {
        let params = RankNoiseParams::new(&f, a, b, t).unwrap();
        if !strictly_decreasing(&params) {
            excluded.push(format!("rank:{a}:{b}:{t}"));
            continue;
        }
        cases.push((format!("rank:{a}:{b}:{t}"), AmplitudeFn::rank(params), WeightKind::Rank { rows: a, cols: b }, a * b / 2));
    }
    let mut checked = 0;
    let mut bad = Vec::new();
    let cases_run = cases.len();
    for (i, (label, amp, weight, k)) in cases.into_iter().enumerate() {
        let cfg = MinWeightConfig {
            k,
            trials: 50,
            samples_per_seed: 100,
            master_seed: seed::derive_seed(MASTER, seed::STREAM_CODE, 900 + i as u64),
            margin: 0.0,
            weight,
        };
        for row in sampler::min_weight_experiment(&amp, &cfg, None, &caps).unwrap() {
            if row.zero_dual_mass || row.d_min.is_nan() {
                continue;
            }
            checked += 1;
            if !row.argmax_is_min_weight {
                bad.push(format!("{label} seed {}", row.seed));
            }
        }
    }
    let a16 = AmplitudeFn::<f64>::product(&f, bernoulli_g(&f, 0.1).unwrap(), 16).unwrap();
    let scan = sampler::max_prob_dual_scan(&a16, 0.5, 0.15, 1000, seed::derive_seed(MASTER, seed::STREAM_CODE, 990), &caps).unwrap();
    let gate = 4.0 * scan.envelope;
    let pass = bad.is_empty() && checked >= 50 && scan.fraction <= gate;
    outcome(
        pass,
        format!(
            "argmax at minimum weight on {}/{checked} codes over {cases_run} instances, failing {bad:?}, not strictly decreasing {excluded:?}; heavy-dual fraction {:.4} <= {:.4}",
            checked - bad.len(),
            scan.fraction,
            gate
        ),
    )
}

fn run_cli(workers: usize, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_qdp-lab"))
        .arg("--workers")
        .arg(workers.to_string())
        .args(args)
        .output()
        .expect("spawn qdp-lab");
    assert!(out.status.success(), "qdp-lab {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c10_reproducible() -> Outcome {
    let invocations: [&[&str]; 5] = [
        &["pgm-sweep", "--n", "12", "--trials", "40", "--seed", "7"],
        &["sample-dual", "--n", "12", "--k", "5", "--trials", "24", "--samples", "2000", "--seed", "7"],
        &["sample-dual", "--noise", "preset:rank:3:3:1", "--k", "4", "--trials", "12", "--samples", "500", "--seed", "3"],
        &["capacity", "--noise", "preset:gibbs:0.7", "--q", "5"],
        &["rank-lab", "--noise", "preset:rank:2:3:1"],
    ];
    let mut mismatched = Vec::new();
    for args in invocations {
        let a = run_cli(1, args);
        let b = run_cli(8, args);
        let c = run_cli(8, args);
        if a != b || b != c || a.is_empty() {
            mismatched.push(args[0]);
        }
    }
    outcome(mismatched.is_empty(), format!("{} invocations at 1 and 8 workers, mismatched {mismatched:?}", invocations.len()))
}

fn main() {
    let criteria: [(u32, &str, Check, Option<u64>); 10] = [
        (1, "PGM oracle equivalence", c1_pgm_oracle, Some(120)),
        (2, "exact boundary cases", c2_boundaries, None),
        (3, "Hirschman inequality", c3_hirschman, Some(10)),
        (4, "rank Fourier duality", c4_rank_duality, Some(60)),
        (5, "exhaustive-ensemble identities", c5_ensemble, Some(300)),
        (6, "exact typical-set defect", c6_defect, None),
        (7, "sampler correctness", c7_sampler, None),
        (8, "threshold trend", c8_threshold, None),
        (9, "minimum-weight sampling", c9_min_weight, None),
        (10, "reproducibility", c10_reproducible, None),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (id, name, check, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let pass = o.pass && within(elapsed, limit.map(Duration::from_secs));
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2} s{}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            limit.map_or(String::new(), |l| format!(", limit {l} s"))
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}

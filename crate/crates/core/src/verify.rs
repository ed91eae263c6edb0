//! Invariant suites run by `qdp-lab verify`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::analysis::{self, hirschman_check, holevo_capacity};
use crate::caps::Caps;
use crate::code::{kernel_intersection_moments, LinearCode, RepresentativeRule};
use crate::error::{QdpError, Result};
use crate::field::{rank_weight, transpose_layout, Elem, FieldSpec};
use crate::noise::{bernoulli_g, haar_vector, point_mass_g, uniform_g, GibbsNoise, WeightKind};
use crate::pgm::{self, EnsembleMode};
use crate::rank::RankNoiseParams;
use crate::report::{all_pass, CheckRecord};
use crate::sampler;
use crate::seed;
use crate::spectral::{self, dft_dense, idft_dense, AmplitudeFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Field,
    Codes,
    Spectral,
    Noise,
    Analysis,
    Pgm,
    Sampler,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Field, Suite::Codes, Suite::Spectral, Suite::Noise, Suite::Analysis, Suite::Pgm, Suite::Sampler];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Field => "field",
            Suite::Codes => "codes",
            Suite::Spectral => "spectral",
            Suite::Noise => "noise",
            Suite::Analysis => "analysis",
            Suite::Pgm => "pgm",
            Suite::Sampler => "sampler",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = QdpError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| QdpError::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

/// Multiplies one character-table entry of `F_{p^s}` by `exp(i·angle)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacterFault {
    pub p: u32,
    pub s: u32,
    pub y: Elem,
    pub x: Elem,
    pub angle: f64,
}

impl Default for CharacterFault {
    fn default() -> Self {
        Self { p: 3, s: 1, y: 1, x: 1, angle: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suites: Vec<Suite>,
    pub fault: Option<CharacterFault>,
    pub seed: u64,
    pub caps: Caps,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { suites: Suite::ALL.to_vec(), fault: None, seed: 1, caps: Caps::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

pub fn run(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    opts.suites
        .iter()
        .map(|&suite| {
            let checks = match suite {
                Suite::Field => field_suite(opts.fault)?,
                Suite::Codes => codes_suite(opts.seed)?,
                Suite::Spectral => spectral_suite(opts.seed, &opts.caps)?,
                Suite::Noise => noise_suite(&opts.caps)?,
                Suite::Analysis => analysis_suite(opts.seed)?,
                Suite::Pgm => pgm_suite(opts.seed, &opts.caps)?,
                Suite::Sampler => sampler_suite(opts.seed, &opts.caps)?,
            };
            Ok(SuiteReport { suite, pass: all_pass(&checks), checks })
        })
        .collect()
}

fn max_abs_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

const FIELDS: [(u32, u32); 8] = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4)];

pub fn field_suite(fault: Option<CharacterFault>) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (p, s) in FIELDS {
        let mut f = FieldSpec::new(p, s)?;
        if let Some(fl) = fault.filter(|fl| fl.p == p && fl.s == s) {
            f = f.with_character_fault(fl.y, fl.x, fl.angle);
        }
        let q = f.q() as Elem;
        let inst = format!("q={}", f.q());
        let mut orth: f64 = 0.0;
        let mut sym: f64 = 0.0;
        for d in 0..q {
            let sum: Complex<f64> = (0..q).map(|a| f.character(a, d)).sum();
            let target = if d == 0 { q as f64 } else { 0.0 };
            orth = orth.max((sum - target).norm());
            for y in 0..q {
                sym = sym.max((f.character(y, d) - f.character(d, y)).norm());
            }
        }
        out.push(CheckRecord::at_most("character_orthogonality", inst.clone(), orth, 0.0, 1e-12));
        out.push(CheckRecord::at_most("character_symmetry", inst.clone(), sym, 0.0, 1e-12));
        let mut failures = 0usize;
        for a in 0..q {
            if f.add(a, f.neg(a)) != 0 {
                failures += 1;
            }
            if a != 0 && f.mul(a, f.inv(a)) != 1 {
                failures += 1;
            }
            for b in 0..q {
                if f.trace(f.add(a, b)) != (f.trace(a) + f.trace(b)) % p {
                    failures += 1;
                }
                for c in 0..q {
                    if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                        failures += 1;
                    }
                }
            }
        }
        out.push(CheckRecord::at_most("field_axioms", inst, failures as f64, 0.0, 0.0));
    }
    let f = FieldSpec::new(2, 1)?;
    let mut rng = seed::rng(17);
    let mut mismatches = 0usize;
    for (a, b) in [(2, 3), (3, 3), (4, 2)] {
        for _ in 0..50 {
            let x: Vec<Elem> = (0..a * b).map(|_| rng.gen_range(0..2)).collect();
            if rank_weight(&f, &x, a, b)? != rank_weight(&f, &transpose_layout(&x, a, b), b, a)? {
                mismatches += 1;
            }
        }
    }
    out.push(CheckRecord::at_most("rank_transpose_invariance", "q=2", mismatches as f64, 0.0, 0.0));
    Ok(out)
}

pub fn codes_suite(master: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (i, (q, n, k)) in [(2usize, 6usize, 3usize), (3, 4, 2), (4, 3, 1), (2, 5, 4)].into_iter().enumerate() {
        let f = FieldSpec::with_order(q)?;
        for t in 0..3u64 {
            let code = LinearCode::random(&f, n, k, seed::derive_seed(master, seed::STREAM_CODE, (i as u64) << 8 | t))?;
            let inst = format!("q={q} n={n} k={k} trial={t}");
            let bad_dots = code
                .generator()
                .iter()
                .flat_map(|g| code.parity_check().iter().map(move |h| (g, h)))
                .filter(|(g, h)| f.dot(g, h) != 0)
                .count();
            out.push(CheckRecord::at_most("generator_parity_orthogonal", inst.clone(), bad_dots as f64, 0.0, 0.0));
            out.push(CheckRecord::close(
                "size_times_dual_size",
                inst.clone(),
                (code.size() * code.dual_size()) as f64,
                q.pow(n as u32) as f64,
                0.0,
            ));
            let mut mismatch = 0usize;
            for idx in 0..code.space_size() {
                let y = f.vector_at(idx, n);
                if code.dual_contains(&y) != code.dual_contains_by_characters(&y) {
                    mismatch += 1;
                }
            }
            out.push(CheckRecord::at_most("dual_membership_by_characters", inst.clone(), mismatch as f64, 0.0, 0.0));
            let mut counts = vec![0usize; code.syndrome_count()];
            for s in code.syndrome_table() {
                counts[s as usize] += 1;
            }
            let uneven = counts.iter().filter(|&&c| c != code.dual_size()).count();
            out.push(CheckRecord::at_most("coset_sizes", inst.clone(), uneven as f64, 0.0, 0.0));
            let dd = code.dual()?.dual()?;
            let missing = code.codewords().iter().filter(|c| !dd.contains(c)).count() + dd.size().abs_diff(code.size());
            out.push(CheckRecord::at_most("double_dual", inst, missing as f64, 0.0, 0.0));
        }
    }
    let f = FieldSpec::new(2, 1)?;
    let (n, k) = (4, 2);
    let y = [1, 0, 1, 1];
    let s = [0, 1, 0, 0];
    let d = f.sub_vec(&y, &s);
    let total = 1usize << (n * k);
    let hits = (0..total)
        .filter(|&idx| {
            let code_g: Vec<Vec<Elem>> = f.vector_at(idx, n * k).chunks(n).map(<[Elem]>::to_vec).collect();
            crate::linalg::times_col(&f, &code_g, &d).iter().all(|&a| a == 0)
        })
        .count();
    out.push(CheckRecord::close("coset_membership_probability", "q=2 n=4 k=2", hits as f64 / total as f64, 0.25, 1e-15));
    let mut rng = seed::derived_rng(master, seed::STREAM_MONTE_CARLO, 0);
    for t in 0..4 {
        let set: Vec<Vec<Elem>> = (0..16).filter(|_| rng.gen_bool(0.4)).map(|i| f.vector_at(i, n)).collect();
        let (mean, var) = kernel_intersection_moments(&f, n, k, &set)?;
        let e = set.len() as f64;
        let scale = 4f64.recip();
        let inst = format!("q=2 n=4 k=2 |E|={} set={t}", set.len());
        out.push(CheckRecord::at_least("intersection_mean_lower", inst.clone(), mean, e * scale, 1e-12));
        out.push(CheckRecord::at_most("intersection_mean_upper", inst.clone(), mean, (e - 1.0).max(0.0) * scale + 1.0, 1e-12));
        out.push(CheckRecord::at_most("intersection_variance", inst, var, mean, 1e-12));
    }
    Ok(out)
}

fn product_fn(f: &FieldSpec, g: Vec<Complex<f64>>, n: usize) -> Result<AmplitudeFn<f64>> {
    AmplitudeFn::product(f, g, n)
}

pub fn spectral_suite(master: u64, caps: &Caps) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mut rng = seed::derived_rng(master, seed::STREAM_NOISE, 100);
    for (q, n) in [(2usize, 4usize), (2, 8), (3, 4), (4, 3)] {
        let f = FieldSpec::with_order(q)?;
        let inst = format!("q={q} n={n}");
        let v = haar_vector::<f64, _>(q.pow(n as u32), &mut rng);
        let vh = dft_dense(&f, n, &v)?;
        let norm = crate::scalar::norm_sqr(&vh).sqrt();
        out.push(CheckRecord::close("parseval", inst.clone(), norm, 1.0, 1e-12));
        let back = idft_dense(&f, n, &vh)?;
        out.push(CheckRecord::at_most("inverse_roundtrip", inst.clone(), max_abs_diff(&back, &v), 0.0, 1e-10));
        let g = haar_vector::<f64, _>(q, &mut rng);
        let prod = product_fn(&f, g.clone(), n)?;
        let via_product = prod.dft(caps)?.materialize(caps)?.to_vec();
        let via_dense = dft_dense(&f, n, &spectral::tensor_power(&g, n))?;
        out.push(CheckRecord::at_most("product_vs_dense_transform", inst, max_abs_diff(&via_product, &via_dense), 0.0, 1e-10));
    }
    let f = FieldSpec::new(2, 1)?;
    let fa = product_fn(&f, bernoulli_g(&f, 0.15)?, 6)?;
    let code = LinearCode::random(&f, 6, 2, seed::derive_seed(master, seed::STREAM_CODE, 100))?;
    let fhat = fa.dft(caps)?;
    let (w, _) = pgm::normalized_coset_states(&code, fhat.materialize(caps)?)?;
    let mut overlap: f64 = 0.0;
    for a in 0..w.len() {
        for b in a + 1..w.len() {
            overlap = overlap.max(crate::scalar::inner(&w[a], &w[b]).norm());
        }
    }
    out.push(CheckRecord::at_most("coset_states_orthogonal", "q=2 n=6 k=2", overlap, 0.0, 1e-12));
    let mut periodic = vec![Complex::new(0.0, 0.0); 64];
    for c in code.codewords() {
        let st = spectral::shifted_state(&c, &fa, caps)?;
        for (p, a) in periodic.iter_mut().zip(st.amplitudes()) {
            *p += a;
        }
    }
    let norm = crate::scalar::norm_sqr(&periodic).sqrt();
    let periodic: Vec<_> = periodic.iter().map(|a| a / norm).collect();
    let ph = dft_dense(&f, 6, &periodic)?;
    let off = (0..64)
        .filter(|&i| !code.dual_contains(&f.vector_at(i, 6)))
        .map(|i| ph[i].norm())
        .fold(0.0, f64::max);
    out.push(CheckRecord::at_most("periodic_state_support", "q=2 n=6 k=2", off, 0.0, 1e-10));
    let f3 = FieldSpec::new(3, 1)?;
    let fa3 = product_fn(&f3, haar_vector(3, &mut rng), 4)?;
    let c = vec![1, 2, 0, 1];
    let dense = spectral::shifted_state(&c, &fa3, caps)?.dft();
    let closed = spectral::qft_shifted_closed_form(&c, &fa3, caps)?;
    out.push(CheckRecord::at_most(
        "shifted_state_transform",
        "q=3 n=4",
        max_abs_diff(dense.amplitudes(), closed.amplitudes()),
        0.0,
        1e-10,
    ));
    Ok(out)
}

/// `(q, a, b, t)` instances of the rank duality check.
pub const RANK_DUALITY_CASES: [(usize, usize, usize, usize); 5] =
    [(2, 2, 2, 0), (2, 2, 2, 1), (2, 2, 2, 2), (2, 3, 2, 1), (3, 2, 2, 1)];

/// `max |dft(f_t) − f_{b−t}|`.
pub fn rank_duality_residual(q: usize, a: usize, b: usize, t: usize, caps: &Caps) -> Result<f64> {
    let f = FieldSpec::with_order(q)?;
    let params = RankNoiseParams::new(&f, a, b, t)?;
    let dual = params.dual();
    let lhs = AmplitudeFn::<f64>::rank(params).dft(caps)?.materialize(caps)?.to_vec();
    let rhs = AmplitudeFn::<f64>::rank(dual).materialize(caps)?.to_vec();
    Ok(max_abs_diff(&lhs, &rhs))
}

pub fn noise_suite(caps: &Caps) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (q, a, b, t) in RANK_DUALITY_CASES {
        let inst = format!("q={q} a={a} b={b} t={t}");
        out.push(CheckRecord::at_most("rank_duality", inst, rank_duality_residual(q, a, b, t, caps)?, 0.0, 1e-10));
    }
    let f2 = FieldSpec::new(2, 1)?;
    let params = RankNoiseParams::new(&f2, 2, 2, 1)?;
    let oracle = params.subspace_oracle::<f64>()?;
    let closed = params.materialize::<f64>(caps)?;
    out.push(CheckRecord::at_most("rank_subspace_oracle", "q=2 a=b=2 t=1", max_abs_diff(&oracle, &closed), 0.0, 1e-10));
    for (q, a, b, t) in [(2usize, 4usize, 4usize, 1usize), (3, 3, 3, 1), (2, 6, 5, 2)] {
        let f = FieldSpec::with_order(q)?;
        let p = RankNoiseParams::new(&f, a, b, t)?;
        let inst = format!("q={q} a={a} b={b} t={t}");
        let total: f64 = p.dual().shell_masses().iter().sum();
        out.push(CheckRecord::close("rank_shell_total", inst.clone(), total, 1.0, 1e-12));
        let amp_total: f64 = (0..=p.b())
            .map(|u| crate::rank::big_ratio(&p.sphere_sizes()[u], &num_bigint::BigUint::from(1u8)) * p.prob_at_rank(u))
            .sum();
        out.push(CheckRecord::close("rank_unit_norm", inst, amp_total, 1.0, 1e-12));
    }
    for (q, n) in [(2usize, 8usize), (3, 6)] {
        let f = FieldSpec::with_order(q)?;
        for lambda in [0.5, 1.0, 2.0] {
            let gibbs = GibbsNoise::<f64>::hamming(&f, lambda)?;
            let inst = format!("q={q} n={n} lambda={lambda}");
            let g = gibbs.g(&f)?;
            let ghat = spectral::dft_product(&f, &g)?;
            let resid = ghat
                .iter()
                .zip(&gibbs.r)
                .map(|(a, r)| (a.norm_sqr() - r).abs())
                .fold(0.0, f64::max);
            out.push(CheckRecord::at_most("gibbs_fourier_law", inst.clone(), resid, 0.0, 1e-12));
            let mut by_weight = vec![(f64::INFINITY, f64::NEG_INFINITY); n + 1];
            let mut x = vec![0; n];
            for idx in 0..q.pow(n as u32) {
                f.fill_vector(idx, &mut x);
                let p: f64 = x.iter().map(|&a| gibbs.r[a as usize]).product();
                let w = FieldSpec::hamming_weight(&x);
                by_weight[w].0 = by_weight[w].0.min(p);
                by_weight[w].1 = by_weight[w].1.max(p);
            }
            let violations = by_weight.windows(2).filter(|w| w[1].1 >= w[0].0).count();
            out.push(CheckRecord::at_most("gibbs_strictly_decreasing", inst, violations as f64, 0.0, 0.0));
        }
    }
    Ok(out)
}

pub fn analysis_suite(master: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mut rng = seed::derived_rng(master, seed::STREAM_NOISE, 200);
    for q in [2usize, 3, 5] {
        let f = FieldSpec::with_order(q)?;
        let mut min_sum = f64::INFINITY;
        for _ in 0..200 {
            let g = haar_vector::<f64, _>(q, &mut rng);
            min_sum = min_sum.min(hirschman_check(&f, &g)?.sum);
        }
        out.push(CheckRecord::at_least("hirschman", format!("q={q} random"), min_sum, 1.0, 1e-12));
        for (label, g) in [("delta", point_mass_g::<f64>(&f)), ("uniform", uniform_g::<f64>(&f))] {
            let sum = hirschman_check(&f, &g)?.sum;
            out.push(CheckRecord::close("hirschman_equality", format!("q={q} {label}"), sum, 1.0, 1e-12));
        }
        let g = haar_vector::<f64, _>(q, &mut rng);
        let base = holevo_capacity(&f, &g)?;
        let shifted: Vec<Complex<f64>> = (0..q as Elem).map(|a| g[f.sub(a, 1) as usize]).collect();
        let phased: Vec<Complex<f64>> = g.iter().map(|a| a * Complex::from_polar(1.0, 0.9)).collect();
        out.push(CheckRecord::close("capacity_shift_invariance", format!("q={q}"), holevo_capacity(&f, &shifted)?, base, 1e-12));
        out.push(CheckRecord::close("capacity_phase_invariance", format!("q={q}"), holevo_capacity(&f, &phased)?, base, 1e-12));
    }
    let r = [0.9, 0.1];
    for (n, eps) in [(16usize, 0.1), (32, 0.1), (32, 0.2), (64, 0.2)] {
        let t = analysis::typical_set_product(&r, 2, n, eps)?;
        let inst = format!("r=(0.9,0.1) n={n} eps={eps}");
        out.push(CheckRecord::at_most("hoeffding_defect", inst, t.defect, analysis::hoeffding_bound(&r, 2, n, eps), 1e-12));
        out.extend(t.sandwich_checks());
        out.extend(t.cardinality_checks());
    }
    let f2 = FieldSpec::new(2, 1)?;
    for (a, b, t, eps) in [(4usize, 4usize, 1usize, 0.3), (5, 4, 1, 0.5), (6, 6, 2, 0.3)] {
        let ts = analysis::typical_set_rank(&RankNoiseParams::new(&f2, a, b, t)?, eps)?;
        out.extend(ts.sandwich_checks());
        out.extend(ts.cardinality_checks());
    }
    out.push(CheckRecord::close("rank_entropy_closed", "a=b=2 t=1", analysis::rank_entropy_closed(2, 2, 1), 0.75, 1e-15));
    Ok(out)
}

/// Deterministic mixed-noise instance for the oracle comparison.
///
/// Cycles through Bernoulli, random table, Gibbs and rank noise; `q ∈ {2, 3}`,
/// `n ≤ 6` (`n ≤ 5` for `q = 3`), `k ≤ 3`.
pub fn oracle_instance(index: usize, master: u64) -> Result<(LinearCode, AmplitudeFn<f64>, String)> {
    let mut rng = seed::derived_rng(master, seed::STREAM_NOISE, index as u64);
    let q = if (index / 4) % 2 == 0 { 2 } else { 3 };
    let f = FieldSpec::with_order(q)?;
    let kind = index % 4;
    let n = if kind == 3 { 4 } else if q == 2 { rng.gen_range(2..=6) } else { rng.gen_range(2..=5) };
    let k = rng.gen_range(1..=3.min(n - 1));
    let (amp, label) = match kind {
        0 => {
            let p = rng.gen_range(0.02..0.3);
            (AmplitudeFn::product(&f, bernoulli_g(&f, p)?, n)?, format!("bernoulli:{p:.4}"))
        }
        1 => (AmplitudeFn::product(&f, haar_vector(q, &mut rng), n)?, "table".to_string()),
        2 => {
            let lambda = rng.gen_range(0.3..2.0);
            let g = GibbsNoise::<f64>::hamming(&f, lambda)?.g(&f)?;
            (AmplitudeFn::product(&f, g, n)?, format!("gibbs:{lambda:.4}"))
        }
        _ => {
            let t = rng.gen_range(0..=2);
            (AmplitudeFn::rank(RankNoiseParams::new(&f, 2, 2, t)?), format!("rank:2:2:{t}"))
        }
    };
    let code = LinearCode::random(&f, n, k, seed::derive_seed(master, seed::STREAM_CODE, index as u64))?;
    Ok((code, amp, format!("i={index} q={q} n={n} k={k} noise={label}")))
}

pub fn pgm_suite(master: u64, caps: &Caps) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for i in 0..12 {
        let (code, f, inst) = oracle_instance(i, master)?;
        let closed = pgm::pgm_success(&code, &f, caps)?.p_pgm;
        let dense = pgm::pgm_dense_oracle(&code, &f, caps)?;
        out.push(CheckRecord::close("closed_form_vs_dense", inst.clone(), closed, dense.mean, 1e-9));
        let hi = dense.per_codeword.iter().copied().fold(f64::MIN, f64::max);
        let lo = dense.per_codeword.iter().copied().fold(f64::MAX, f64::min);
        out.push(CheckRecord::at_most("geometric_uniformity", inst.clone(), hi - lo, 0.0, 1e-9));
        let pivot = pgm::pgm_success_via_basis(&code, &f, caps)?;
        let shifted = pgm::pgm_success_via_basis(&code.clone().with_rule(RepresentativeRule::Shifted), &f, caps)?;
        let spread = pivot.iter().zip(&shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.push(CheckRecord::at_most("representative_invariance", inst.clone(), spread, 0.0, 1e-12));
        out.push(CheckRecord::close("basis_route_vs_closed_form", inst, pivot[0], closed, 1e-9));
    }
    for q in [2usize, 3] {
        let f = FieldSpec::with_order(q)?;
        for (n, k) in [(4usize, 1usize), (6, 3), (8, 4)] {
            let code = LinearCode::random(&f, n, k, seed::derive_seed(master, seed::STREAM_CODE, 300 + n as u64))?;
            let inst = format!("q={q} n={n} k={k}");
            let d = pgm::pgm_success(&code, &AmplitudeFn::<f64>::delta(&f, n), caps)?.p_pgm;
            let u = pgm::pgm_success(&code, &AmplitudeFn::<f64>::uniform(&f, n), caps)?.p_pgm;
            out.push(CheckRecord::close("noiseless_boundary", inst.clone(), d, 1.0, 1e-12));
            out.push(CheckRecord::close("uniform_boundary", inst, u, 1.0 / code.size() as f64, 1e-12));
        }
    }
    let f2 = FieldSpec::new(2, 1)?;
    let r = [0.8, 0.2];
    let fa = AmplitudeFn::product(&f2, bernoulli_g(&f2, 0.1)?, 12)?;
    let t = analysis::typical_set_product(&r, 2, 12, 0.2)?;
    for trial in 0..3 {
        let code = LinearCode::random(&f2, 12, 6, seed::derive_seed(master, seed::STREAM_CODE, 400 + trial))?;
        let p = pgm::pgm_success(&code, &fa, caps)?.p_pgm;
        out.push(CheckRecord::at_most("converse_bound", format!("n=12 k=6 trial={trial}"), p, pgm::converse_bound(&code, &t), 1e-10));
    }
    let t4 = analysis::typical_set_product(&r, 2, 4, 0.3)?;
    let fam = analysis::FamilyConstants { h: t4.rate, alpha: 0.3, beta: 0.3, k1: 1.0, k2: 1.0 };
    let m = pgm::ztilde_moments(&f2, 2, &t4, fam, &[1, 0, 0, 0], EnsembleMode::Exhaustive)?;
    out.push(CheckRecord::close("ztilde_exact_mean", "q=2 n=4 k=2", m.mean, m.exact_mean, 1e-12));
    Ok(out)
}

pub fn sampler_suite(master: u64, caps: &Caps) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (q, n, k) in [(2usize, 4usize, 2usize), (2, 5, 2), (2, 6, 3), (3, 3, 1)] {
        let f = FieldSpec::with_order(q)?;
        let fa = AmplitudeFn::product(&f, bernoulli_g(&f, 0.1)?, n)?;
        let code = LinearCode::random(&f, n, k, seed::derive_seed(master, seed::STREAM_CODE, 500 + n as u64))?;
        let inst = format!("q={q} n={n} k={k}");
        let model = match sampler::dual_distribution(&code, &fa, caps) {
            Ok(m) => m,
            Err(QdpError::ZeroDualMass) => continue,
            Err(e) => return Err(e),
        };
        let o = sampler::regev_pipeline_oracle(&code, &fa, caps)?;
        let resid = o
            .conditional
            .iter()
            .zip(model.probabilities())
            .map(|(a, b): (&f64, &f64)| (a - b).abs())
            .fold(0.0, f64::max);
        out.push(CheckRecord::at_most("pipeline_conditional", inst.clone(), resid, 0.0, 1e-10));
        out.push(CheckRecord::at_most("tweaked_gram", inst.clone(), o.gram_residual, 0.0, 1e-10));
        out.push(CheckRecord::at_most("measurement_complete", inst.clone(), o.completeness_residual, 0.0, 1e-10));
        out.push(CheckRecord::at_least("success_floor", inst.clone(), o.p_zero_branch, model.success_floor(), 1e-10));
        out.push(CheckRecord::close("p_zero_closed_form", inst.clone(), o.p_zero_branch, model.p_zero_branch(), 1e-10));
        out.push(CheckRecord::close("untweaked_p_zero", inst.clone(), o.untweaked_p_zero, model.p_pgm(), 1e-10));
        let rotated = fa.with_phase(Complex::from_polar(1.0, 0.7), caps)?;
        let m2 = sampler::dual_distribution(&code, &rotated, caps)?;
        let diff = m2
            .probabilities()
            .iter()
            .zip(model.probabilities())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.push(CheckRecord::at_most("global_phase_invariance", inst, diff, 0.0, 1e-12));
    }
    let f2 = FieldSpec::new(2, 1)?;
    let fa = AmplitudeFn::<f64>::product(&f2, bernoulli_g(&f2, 0.1)?, 10)?;
    let cfg = sampler::MinWeightConfig {
        k: 4,
        trials: 8,
        samples_per_seed: 2000,
        master_seed: master,
        margin: 2.0,
        weight: WeightKind::Hamming,
    };
    for row in sampler::min_weight_experiment(&fa, &cfg, None, caps)? {
        if row.zero_dual_mass {
            continue;
        }
        let inst = format!("q=2 n=10 k=4 trial={}", row.seed);
        out.push(CheckRecord::new("argmax_min_weight", inst.clone(), f64::from(u8::from(row.argmax_is_min_weight)), 1.0, 0.0, row.argmax_is_min_weight));
        let sigma = (row.exact_within_margin * (1.0 - row.exact_within_margin) / 2000.0).sqrt().max(1.0 / 2000.0);
        out.push(CheckRecord::close("margin_fraction", inst, row.frac_within_margin, row.exact_within_margin, 4.0 * sigma));
    }
    Ok(out)
}

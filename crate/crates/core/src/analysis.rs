//! Entropies, capacities, typical sets and rank-metric analytics.
//!
//! All entropies are in base `q`.

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{QdpError, Result};
use crate::field::{rank_weight, Elem, FieldSpec};
use crate::rank::RankNoiseParams;
use crate::report::CheckRecord;
use crate::scalar::Real;
use crate::seed;
use crate::spectral::dft_product;

/// Slack on the membership threshold of product typical sets, per symbol.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// `−Σ p log_q p` with `0 log 0 = 0`.
pub fn entropy_q<T: Real>(dist: &[T], q: usize) -> Result<T> {
    let mut total = T::zero();
    for &p in dist {
        if !(p >= T::zero()) || !p.is_finite() {
            return Err(QdpError::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        total = total + p;
    }
    if (total - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) {
        return Err(QdpError::InvalidDistribution(format!("sums to {total}")));
    }
    let ln_q = T::lit(q as f64).ln();
    Ok(dist
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.ln() / ln_q)
        .sum())
}

fn squared<T: Real>(g: &[Complex<T>]) -> Vec<T> {
    g.iter().map(|z| z.norm_sqr()).collect()
}

/// `H_q(|ĝ|²)`.
pub fn holevo_capacity<T: Real>(field: &FieldSpec, g: &[Complex<T>]) -> Result<T> {
    entropy_q(&squared(&dft_product(field, g)?), field.q())
}

/// `1 − H_q(|g|²)`.
pub fn shannon_capacity<T: Real>(field: &FieldSpec, g: &[Complex<T>]) -> Result<T> {
    // Same length and norm validation as the Holevo side.
    crate::spectral::dft_product(field, g)?;
    Ok(T::one() - entropy_q(&squared(g), field.q())?)
}

/// Entropic uncertainty sum for a per-symbol amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HirschmanReport<T> {
    /// `H_q(|g|²) + H_q(|ĝ|²)`.
    pub sum: T,
    /// `sum ≥ 1 − 1e-12`.
    pub holds: bool,
    /// Whether the reversed inequality `sum ≤ 1 + 1e-12` also holds.
    pub reverse_holds: bool,
}

pub fn hirschman_check<T: Real>(field: &FieldSpec, g: &[Complex<T>]) -> Result<HirschmanReport<T>> {
    let q = field.q();
    let sum = entropy_q(&squared(g), q)? + entropy_q(&squared(&dft_product(field, g)?), q)?;
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    Ok(HirschmanReport { sum, holds: sum >= T::one() - tol, reverse_holds: sum <= T::one() + tol })
}

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for k in 1..=n {
        out.push(out[k - 1] + (k as f64).ln());
    }
    out
}

/// Membership rule of a typical set.
#[derive(Debug, Clone)]
pub enum Membership {
    /// `|Σ_i −log_q r(y_i) − nH| ≤ nε`, zero-probability symbols excluded.
    Product { neglog: Vec<Option<f64>>, center: f64, radius: f64 },
    /// `lo ≤ |y|_rk ≤ hi`.
    Rank { rows: usize, cols: usize, lo: usize, hi: usize },
}

/// The law `p` a typical set is taken with respect to.
#[derive(Debug, Clone)]
pub enum Law {
    /// `r^{⊗n}`.
    Product(Vec<f64>),
    /// `|f_t|²` for the given parameters.
    Rank(RankNoiseParams),
}

/// A typical set with exact defect and cardinality.
#[derive(Debug, Clone)]
pub struct TypicalSetSpec {
    pub q: usize,
    pub n: usize,
    pub eps: f64,
    /// Lower bounding value `A(ε)`.
    pub a_bound: f64,
    /// Upper bounding value `B(ε)`.
    pub b_bound: f64,
    /// `δ = 1 − p(T)`.
    pub defect: f64,
    pub cardinality: BigUint,
    /// Entropy rate `H` used to define the bounds.
    pub rate: f64,
    /// Exact `H_q(p)` over the whole space.
    pub entropy: f64,
    pub membership: Membership,
    pub law: Law,
}

impl TypicalSetSpec {
    pub fn contains(&self, field: &FieldSpec, y: &[Elem]) -> bool {
        match &self.membership {
            Membership::Product { neglog, center, radius } => {
                let mut s = 0.0;
                for &a in y {
                    match neglog[a as usize] {
                        Some(v) => s += v,
                        None => return false,
                    }
                }
                (s - center).abs() <= radius + MEMBERSHIP_SLACK * self.n as f64
            }
            Membership::Rank { rows, cols, lo, hi } => {
                let u = rank_weight(field, y, *rows, *cols).expect("shape matches");
                (*lo..=*hi).contains(&u)
            }
        }
    }

    /// `p(y)`.
    pub fn prob(&self, _field: &FieldSpec, y: &[Elem]) -> f64 {
        match &self.law {
            Law::Product(r) => y.iter().map(|&a| r[a as usize]).product(),
            Law::Rank(params) => params.prob_at_rank(params.rank_of(y).expect("shape")),
        }
    }

    pub fn cardinality_f64(&self) -> f64 {
        self.cardinality.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Cardinality bounds `(1−δ)/B ≤ |T| ≤ 1/A`.
    pub fn cardinality_checks(&self) -> Vec<CheckRecord> {
        let inst = format!("n={} eps={}", self.n, self.eps);
        let card = self.cardinality_f64();
        let rel = 1e-9;
        let lower = (1.0 - self.defect) / self.b_bound;
        let mut out = vec![CheckRecord::at_least("cardinality_lower", inst.clone(), card, lower, rel * lower)];
        if self.a_bound > 0.0 {
            let upper = 1.0 / self.a_bound;
            out.push(CheckRecord::at_most("cardinality_upper", inst, card, upper, rel * upper));
        }
        out
    }

    /// `−(1−δ) log_q B ≤ H_q(p) ≤ −(1−δ) log_q A + δ n`.
    pub fn sandwich_checks(&self) -> Vec<CheckRecord> {
        let inst = format!("n={} eps={}", self.n, self.eps);
        let lq = (self.q as f64).ln();
        let lower = -(1.0 - self.defect) * self.b_bound.ln() / lq;
        let upper = -(1.0 - self.defect) * self.a_bound.ln() / lq + self.defect * self.n as f64;
        vec![
            CheckRecord::at_least("sandwich_lower", inst.clone(), self.entropy, lower, 1e-9),
            CheckRecord::at_most("sandwich_upper", inst, self.entropy, upper, 1e-9),
        ]
    }
}

fn compositions(n: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rest: usize, slot: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if slot + 1 == buf.len() {
            buf[slot] = rest;
            f(buf);
            return;
        }
        for k in 0..=rest {
            buf[slot] = k;
            rec(rest - k, slot + 1, buf, f);
        }
    }
    if parts == 0 {
        return;
    }
    let mut buf = vec![0; parts];
    rec(n, 0, &mut buf, f);
}

fn binomial_count(n: usize, k: usize) -> f64 {
    let lf = ln_factorials(n);
    (lf[n] - lf[k] - lf[n - k]).exp()
}

/// Typical set of `r^{⊗n}` with `A = q^{−n(H+ε)}`, `B = q^{−n(H−ε)}`, `H = H_q(r)`.
///
/// `δ` and `|T|` are exact sums over symbol-count types.
pub fn typical_set_product(r: &[f64], q: usize, n: usize, eps: f64) -> Result<TypicalSetSpec> {
    if r.len() != q {
        return Err(QdpError::LengthMismatch { expected: q, got: r.len() });
    }
    let h = entropy_q(r, q)?;
    let lq = (q as f64).ln();
    // Symbols with equal probability share a class.
    let mut classes: Vec<(f64, usize)> = Vec::new();
    for &p in r.iter().filter(|&&p| p > 0.0) {
        match classes.iter_mut().find(|(v, _)| *v == p) {
            Some((_, m)) => *m += 1,
            None => classes.push((p, 1)),
        }
    }
    let parts = classes.len();
    let types = binomial_count(n + parts - 1, parts - 1);
    if types > 5e7 {
        return Err(QdpError::CapExceeded { what: "type enumeration", size: types as u128, cap: 50_000_000 });
    }
    let lf = ln_factorials(n);
    let fact: Vec<BigUint> = {
        let mut v = vec![BigUint::one()];
        for k in 1..=n {
            let next = &v[k - 1] * BigUint::from(k);
            v.push(next);
        }
        v
    };
    let center = n as f64 * h;
    let radius = n as f64 * eps;
    let slack = MEMBERSHIP_SLACK * n as f64;
    let mut outside = 0.0f64;
    let mut card = BigUint::zero();
    compositions(n, parts, &mut |counts| {
        let mut ln_mass = lf[n];
        let mut neglog = 0.0;
        for (&k, &(p, m)) in counts.iter().zip(&classes) {
            ln_mass += -lf[k] + k as f64 * ((m as f64).ln() + p.ln());
            neglog += k as f64 * (-p.ln() / lq);
        }
        if (neglog - center).abs() <= radius + slack {
            let mut c = fact[n].clone();
            for (&k, &(_, m)) in counts.iter().zip(&classes) {
                c /= &fact[k];
                c *= BigUint::from(m).pow(k as u32);
            }
            card += c;
        } else {
            outside += ln_mass.exp();
        }
    });
    let neglog = r.iter().map(|&p| (p > 0.0).then(|| -p.ln() / lq)).collect();
    Ok(TypicalSetSpec {
        q,
        n,
        eps,
        a_bound: (q as f64).powf(-(n as f64) * (h + eps)),
        b_bound: (q as f64).powf(-(n as f64) * (h - eps)),
        defect: (outside + 0.0).clamp(0.0, 1.0),
        cardinality: card,
        rate: h,
        entropy: n as f64 * h,
        membership: Membership::Product { neglog, center, radius },
        law: Law::Product(r.to_vec()),
    })
}

/// `e^{−2nε²/K²}` with `K = max −log_q r` over the support.
pub fn hoeffding_bound(r: &[f64], q: usize, n: usize, eps: f64) -> f64 {
    let lq = (q as f64).ln();
    let k = r
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p.ln() / lq)
        .fold(0.0f64, f64::max);
    if k == 0.0 {
        return 0.0;
    }
    (-2.0 * n as f64 * eps * eps / (k * k)).exp()
}

/// Monte Carlo estimate of `δ` and its standard error.
pub fn defect_monte_carlo(spec: &TypicalSetSpec, field: &FieldSpec, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let Law::Product(r) = &spec.law else {
        return Err(QdpError::InvalidParameter("Monte Carlo defect needs a product law".into()));
    };
    let mut cdf = Vec::with_capacity(r.len());
    let mut acc = 0.0;
    for &p in r {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seed::rng(seed);
    let mut y = vec![0; spec.n];
    let mut miss = 0usize;
    for _ in 0..samples {
        for slot in y.iter_mut() {
            let u: f64 = rng.gen::<f64>() * acc;
            *slot = cdf.partition_point(|&c| c <= u).min(r.len() - 1) as Elem;
        }
        if !spec.contains(field, &y) {
            miss += 1;
        }
    }
    let d = miss as f64 / samples as f64;
    Ok((d, (d * (1.0 - d) / samples as f64).sqrt()))
}

/// `(1 + t/a)(1 − t/b)`.
pub fn rank_entropy_closed(a: usize, b: usize, t: usize) -> f64 {
    (1.0 + t as f64 / a as f64) * (1.0 - t as f64 / b as f64)
}

/// `H_q(|f_t|²)` in total (not per symbol), by shells.
pub fn rank_law_entropy(params: &RankNoiseParams) -> f64 {
    let lq = (params.field().q() as f64).ln();
    params
        .shell_masses()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(u, &m)| -m * params.ln_prob_at_rank(u) / lq)
        .sum()
}

/// `(H_closed, H_q(|f̂_t|²)/(ab))`, using `f̂_t = f_{b−t}`.
pub fn rank_entropy_per_symbol(params: &RankNoiseParams) -> (f64, f64) {
    let closed = rank_entropy_closed(params.a(), params.b(), params.t());
    let exact = rank_law_entropy(&params.dual()) / params.n() as f64;
    (closed, exact)
}

/// Typical set of `p = |f̂_t|²`: ranks in `[⌈b(1−ε) − t⌉, b − t]`.
///
/// `A` and `B` are the exact extreme values of `p` on the window.
pub fn typical_set_rank(params: &RankNoiseParams, eps: f64) -> Result<TypicalSetSpec> {
    if !(eps > 0.0) {
        return Err(QdpError::InvalidParameter("eps must be positive".into()));
    }
    let (a, b, t) = (params.a(), params.b(), params.t());
    let law = params.dual();
    let hi = b - t;
    let lo_real = b as f64 * (1.0 - eps) - t as f64;
    let lo = if lo_real <= 0.0 { 0 } else { (lo_real - 1e-9).ceil() as usize };
    let masses = law.shell_masses();
    let defect: f64 = masses[..lo.min(masses.len())].iter().sum();
    let (a_bound, b_bound, cardinality) = if lo > hi {
        (0.0, 0.0, BigUint::zero())
    } else {
        let card = law.sphere_sizes()[lo..=hi].iter().sum();
        (law.prob_at_rank(hi), law.prob_at_rank(lo), card)
    };
    let (rows, cols) = params.shape();
    Ok(TypicalSetSpec {
        q: params.field().q(),
        n: a * b,
        eps,
        a_bound,
        b_bound,
        defect: (defect + 0.0).clamp(0.0, 1.0),
        cardinality,
        rate: rank_entropy_closed(a, b, t),
        entropy: rank_law_entropy(&law),
        membership: Membership::Rank { rows, cols, lo, hi },
        law: Law::Rank(law),
    })
}

/// Mass of `|f̂_t|²` on ranks `< (1−ε)b − t`.
pub fn rank_tail_mass(params: &RankNoiseParams, eps: f64) -> f64 {
    let cut = (1.0 - eps) * params.b() as f64 - params.t() as f64;
    params
        .dual()
        .shell_masses()
        .iter()
        .enumerate()
        .filter(|(u, _)| (*u as f64) < cut - 1e-12)
        .map(|(_, m)| m)
        .sum()
}

/// Largest `t ∈ 1..=b` with `R·a·b > a·t + t(b − t)`, or `0`.
pub fn rank_gv_distance(a: usize, b: usize, rate: f64) -> usize {
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let budget = rate * (a * b) as f64;
    (1..=b)
        .filter(|&t| budget > (a * t + t * (b - t)) as f64)
        .max()
        .unwrap_or(0)
}

/// Constants of a declared nice family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyConstants {
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k1: f64,
    pub k2: f64,
}

/// Result of [`nice_family_check`].
#[derive(Debug, Clone)]
pub struct NiceFamilyReport {
    pub records: Vec<CheckRecord>,
    /// Index of the first member violating a condition.
    pub first_violation: Option<usize>,
}

impl NiceFamilyReport {
    pub fn pass(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks the bounding-value conditions, non-vacuity `A ≤ B`, a
/// non-increasing defect along the family, and the entropy sandwich.
pub fn nice_family_check(family: &[TypicalSetSpec], c: FamilyConstants) -> NiceFamilyReport {
    let mut records = Vec::new();
    let mut first_violation = None;
    let mut prev_defect = f64::INFINITY;
    for (i, t) in family.iter().enumerate() {
        let q = t.q as f64;
        let n = t.n as f64;
        let inst = format!("i={i} n={} eps={}", t.n, t.eps);
        let lower_env = c.k1 * q.powf(-n * (c.h + c.alpha));
        let upper_env = c.k2 * q.powf(-n * (c.h - c.beta));
        let mut recs = vec![
            CheckRecord::at_least("family_A", inst.clone(), t.a_bound, lower_env, 1e-12 * lower_env),
            CheckRecord::at_most("family_B", inst.clone(), t.b_bound, upper_env, 1e-12 * upper_env),
            CheckRecord::at_most("family_nonvacuous", inst.clone(), t.a_bound, t.b_bound, 0.0),
            CheckRecord::at_most("family_defect_monotone", inst, t.defect, prev_defect, 1e-12),
        ];
        recs.extend(t.sandwich_checks());
        if first_violation.is_none() && recs.iter().any(|r| !r.pass) {
            first_violation = Some(i);
        }
        prev_defect = t.defect;
        records.extend(recs);
    }
    NiceFamilyReport { records, first_violation }
}

//! Output statistics of the dual-codeword sampler built from the PGM.
//!
//! Conditioned on the first register returning to `0`, the sampler outputs a
//! nonzero dual codeword `y` with probability `q(y) = |f̂(y)|² / M`, where
//! `M = Σ_{z ∈ (C⊥)*} |f̂(z)|²`.

use num_complex::Complex;
use num_traits::Float;
use rand::Rng;
use rayon::prelude::*;

use crate::analysis::TypicalSetSpec;
use crate::caps::{space_size, Caps};
use crate::code::LinearCode;
use crate::error::{QdpError, Result};
use crate::field::{Elem, FieldSpec, FqVector};
use crate::noise::WeightKind;
use crate::pgm::{self, normalized_coset_states, phased_sum};
use crate::scalar::{inner, norm_sqr, Real};
use crate::seed;
use crate::spectral::AmplitudeFn;

#[derive(Debug, Clone)]
pub struct DualSamplerModel<T: Real> {
    code: LinearCode,
    /// `(C⊥)*` in dual message-index order.
    support: Vec<Vec<Elem>>,
    probs: Vec<T>,
    cdf: Vec<f64>,
    dual_mass: T,
    p_pgm: T,
    success_floor: T,
    p_zero_branch: T,
}

impl<T: Real> DualSamplerModel<T> {
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn support(&self) -> &[Vec<Elem>] {
        &self.support
    }

    /// `q(y)` aligned with [`support`](Self::support).
    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    /// `M`.
    pub fn dual_mass(&self) -> T {
        self.dual_mass
    }

    pub fn p_pgm(&self) -> T {
        self.p_pgm
    }

    /// `(√P_PGM − |C|^{−1/2})²` clamped to `[0, 1]`.
    pub fn success_floor(&self) -> T {
        self.success_floor
    }

    /// `|C|^{−1} (√M + Σ_{s≠0} Z_s)²`, the probability that the first register reads `0`.
    pub fn p_zero_branch(&self) -> T {
        self.p_zero_branch
    }

    /// `q(y)` for an arbitrary vector (0 off the support).
    pub fn prob_of(&self, y: &[Elem]) -> T {
        self.support
            .iter()
            .position(|s| s.as_slice() == y)
            .map_or(T::zero(), |i| self.probs[i])
    }

    /// Indices of the support maximizing `q`, to relative tolerance `1e-12`.
    pub fn argmax(&self) -> Vec<usize> {
        let best = self.probs.iter().copied().fold(T::zero(), Float::max);
        let cut = best * (T::one() - T::lit(1e-12));
        (0..self.probs.len()).filter(|&i| self.probs[i] >= cut).collect()
    }
}

/// Builds the model from `|f̂|²` indexed by vector.
pub fn model_from_spectrum<T: Real>(code: &LinearCode, spec: &[T]) -> Result<DualSamplerModel<T>> {
    let field = code.field();
    let support: Vec<Vec<Elem>> = code.dual_codewords().into_iter().filter(|y| y.iter().any(|&a| a != 0)).collect();
    let raw: Vec<T> = support.iter().map(|y| spec[field.index_of(y)]).collect();
    let dual_mass: T = raw.iter().copied().sum();
    let tol = crate::spectral::norm_tolerance::<T>();
    if dual_mass <= tol * tol {
        return Err(QdpError::ZeroDualMass);
    }
    let probs: Vec<T> = raw.iter().map(|&p| p / dual_mass).collect();
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p.as_f64();
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    let z = pgm::coset_masses_from_spectrum(code, spec);
    let size = code.size();
    let p_pgm = pgm::p_pgm_from_masses(&z, size);
    let scale = T::from_count(size).sqrt().recip();
    let floor = Float::max(p_pgm.sqrt() - scale, T::zero());
    let success_floor = Float::min(floor * floor, T::one());
    let rest: T = z.iter().skip(1).copied().sum();
    let amp = (dual_mass.sqrt() + rest) * scale;
    Ok(DualSamplerModel {
        code: code.clone(),
        support,
        probs,
        cdf,
        dual_mass,
        p_pgm,
        success_floor,
        p_zero_branch: amp * amp,
    })
}

pub fn dual_distribution<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<DualSamplerModel<T>> {
    if code.n() != f.n() {
        return Err(QdpError::LengthMismatch { expected: code.n(), got: f.n() });
    }
    model_from_spectrum(code, &pgm::spectrum(f, caps)?)
}

/// `(√P_PGM − q^{−k_eff/2})²` clamped to `[0, 1]`.
pub fn success_floor<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<T> {
    let p = pgm::pgm_success(code, f, caps)?.p_pgm;
    let d = Float::max(p.sqrt() - T::from_count(code.size()).sqrt().recip(), T::zero());
    Ok(Float::min(d * d, T::one()))
}

/// Support indices of `count` i.i.d. draws by inverse CDF.
pub fn sample_indices<T: Real>(model: &DualSamplerModel<T>, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let last = model.cdf.len() - 1;
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            model.cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect()
}

pub fn sample_dual<T: Real>(model: &DualSamplerModel<T>, count: usize, seed: u64) -> Vec<FqVector> {
    sample_indices(model, count, seed)
        .into_iter()
        .map(|i| FqVector::from_raw(model.support[i].clone()))
        .collect()
}

/// Dense simulation of the sampler in the tweaked `{|Z_c⟩} ∪ {|0⟩}` basis.
#[derive(Debug, Clone)]
pub struct PipelineOracle<T> {
    /// Probability that the first register reads `0`.
    pub p_zero_branch: T,
    /// Conditional outcome law on `(C⊥)*`, aligned with the model support.
    pub conditional: Vec<T>,
    /// Conditional mass outside `(C⊥)*`.
    pub off_support: T,
    /// `max |⟨Z_a|Z_b⟩ − δ_ab|`.
    pub gram_residual: T,
    /// `max_c |Σ_{c'} |⟨Z_{c'}|ψ̂_c⟩|² − 1|`.
    pub completeness_residual: T,
    /// First-register-zero probability with the untweaked basis.
    pub untweaked_p_zero: T,
    /// Probability that the untweaked sampler outputs the zero vector.
    pub untweaked_zero_outcome: T,
}

fn scaled<T: Real>(v: &[Complex<T>], s: T) -> Vec<Complex<T>> {
    v.iter().map(|&a| a * s).collect()
}

/// Runs the coherent measure-and-uncompute step on `|C|^{−1/2} Σ_c |c⟩|ψ̂_c⟩`.
///
/// Outcome `c'` of the measurement maps the first register `c ↦ c − c'`; the
/// extra outcome `|0⟩` never maps to `0` because it is not a codeword label.
pub fn regev_pipeline_oracle<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<PipelineOracle<T>> {
    let field = code.field();
    let q = field.q();
    let n = code.n();
    Caps::check("pipeline oracle q^n", space_size(q, n), caps.dense)?;
    let size = code.size();
    Caps::check("pipeline oracle work |C|^2 q^n", (size as u128).pow(2) * space_size(q, n), 1 << 32)?;
    let states = pgm::fourier_codeword_states(code, f, caps)?;
    let fhat_fn = f.dft(caps)?;
    let fhat = fhat_fn.materialize(caps)?;
    let dim = fhat.len();
    let zero = Complex::new(T::zero(), T::zero());
    let (mut w, _) = normalized_coset_states(code, fhat)?;
    let untweaked_w0 = w[0].clone();

    // U_0: W_0 with the |0⟩ component removed.
    let mut u0 = fhat_fn_coset_zero(code, fhat);
    u0[0] = zero;
    let m = norm_sqr(&u0).sqrt();
    if m > T::zero() {
        u0 = scaled(&u0, m.recip());
    } else {
        let y = code
            .dual_codewords()
            .into_iter()
            .find(|y| y.iter().any(|&a| a != 0))
            .ok_or(QdpError::TrivialCode)?;
        u0 = vec![zero; dim];
        u0[field.index_of(&y)] = Complex::new(T::one(), T::zero());
    }
    w[0] = u0;

    let scale = T::from_count(size).sqrt().recip();
    let codewords = code.codewords();
    let mut basis: Vec<Vec<Complex<T>>> = codewords
        .iter()
        .map(|c| Ok(scaled(&phased_sum(code, c, &w, false)?, scale)))
        .collect::<Result<_>>()?;
    let mut extra = vec![zero; dim];
    extra[0] = Complex::new(T::one(), T::zero());
    basis.push(extra);

    let mut gram_residual = T::zero();
    for (a, za) in basis.iter().enumerate() {
        for (b, zb) in basis.iter().enumerate() {
            let target = if a == b { Complex::new(T::one(), T::zero()) } else { zero };
            gram_residual = Float::max(gram_residual, (inner(za, zb) - target).norm());
        }
    }

    // First-register-zero branch: |C|^{-1/2} Σ_c |Z_c⟩⟨Z_c|ψ̂_c⟩.
    let mut branch = vec![zero; dim];
    let mut completeness_residual = T::zero();
    for (i, psi) in states.iter().enumerate() {
        let overlaps: Vec<Complex<T>> = basis.iter().map(|z| inner(z, psi)).collect();
        let total: T = overlaps.iter().map(|a| a.norm_sqr()).sum();
        completeness_residual = Float::max(completeness_residual, (total - T::one()).abs());
        for (b, &zc) in branch.iter_mut().zip(&basis[i]) {
            *b = *b + zc * overlaps[i] * scale;
        }
    }
    let p_zero = norm_sqr(&branch);
    let conditional_full: Vec<T> = branch.iter().map(|a| a.norm_sqr() / p_zero).collect();
    let model_support: Vec<Vec<Elem>> =
        code.dual_codewords().into_iter().filter(|y| y.iter().any(|&a| a != 0)).collect();
    let conditional: Vec<T> = model_support.iter().map(|y| conditional_full[field.index_of(y)]).collect();
    let on_support: T = conditional.iter().copied().sum();

    // Untweaked: Y_c keeps W̃_0 including |0⟩.
    w[0] = untweaked_w0;
    let mut ubranch = vec![zero; dim];
    for (c, psi) in codewords.iter().zip(&states) {
        let y = scaled(&phased_sum(code, c, &w, false)?, scale);
        let ov = inner(&y, psi) * scale;
        for (b, &a) in ubranch.iter_mut().zip(&y) {
            *b = *b + a * ov;
        }
    }
    let untweaked_p_zero = norm_sqr(&ubranch);
    let untweaked_zero_outcome = ubranch[0].norm_sqr() / untweaked_p_zero;

    Ok(PipelineOracle {
        p_zero_branch: p_zero,
        conditional,
        off_support: Float::max(T::one() - on_support, T::zero()),
        gram_residual,
        completeness_residual,
        untweaked_p_zero,
        untweaked_zero_outcome,
    })
}

fn fhat_fn_coset_zero<T: Real>(code: &LinearCode, fhat: &[Complex<T>]) -> Vec<Complex<T>> {
    let table = code.syndrome_table();
    fhat.iter()
        .zip(&table)
        .map(|(&a, &s)| if s == 0 { a } else { Complex::new(T::zero(), T::zero()) })
        .collect()
}

/// Mass of the sampler output inside a typical set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Typicality {
    /// `q(T ∩ (C⊥)*)`.
    pub mass: f64,
    /// `X = Σ_{T∩(C⊥)*} p`.
    pub x: f64,
    /// `Y = Σ_{(C⊥)*} p`.
    pub y: f64,
}

impl Typicality {
    pub fn ratio(&self) -> f64 {
        if self.y > 0.0 {
            self.x / self.y
        } else {
            0.0
        }
    }
}

pub fn typicality_of_samples<T: Real>(model: &DualSamplerModel<T>, t: &TypicalSetSpec) -> Result<Typicality> {
    let field = model.code.field();
    if t.n != model.code.n() || t.q != field.q() {
        return Err(QdpError::LengthMismatch { expected: model.code.n(), got: t.n });
    }
    let mut out = Typicality { mass: 0.0, x: 0.0, y: 0.0 };
    for (y, p) in model.support.iter().zip(&model.probs) {
        let law = t.prob(field, y);
        out.y += law;
        if t.contains(field, y) {
            out.mass += p.as_f64();
            out.x += law;
        }
    }
    Ok(out)
}

/// Outcome of [`max_prob_dual_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxProbScan {
    pub k: usize,
    /// Fraction of codes with some `y ∈ (C⊥)*` and `p(y) > q^{−n(R−ε)}`.
    pub fraction: f64,
    /// Markov envelope `q^{n(R−ε) − k}`.
    pub envelope: f64,
    /// Exact expected number of violating dual codewords, `Σ_{y≠0, p(y)>thr} q^{−k}`.
    pub expected_violators: f64,
}

/// Scans random codes of dimension `⌊Rn⌋` for heavy nonzero dual codewords under `p = |f̂|²`.
pub fn max_prob_dual_scan<T: Real>(
    f: &AmplitudeFn<T>,
    rate: f64,
    eps: f64,
    trials: usize,
    master: u64,
    caps: &Caps,
) -> Result<MaxProbScan> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(QdpError::InvalidParameter(format!("rate {rate} must lie in (0, 1)")));
    }
    let field = f.field().clone();
    let n = f.n();
    let q = field.q() as f64;
    let k = (rate * n as f64 + 1e-9).floor() as usize;
    if k == 0 || trials == 0 {
        return Err(QdpError::InvalidParameter("need floor(Rn) >= 1 and trials >= 1".into()));
    }
    let spec = pgm::spectrum(f, caps)?;
    let thr = q.powf(-(n as f64) * (rate - eps));
    let heavy: Vec<bool> = spec.iter().map(|p| p.as_f64() > thr).collect();
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let code = LinearCode::random_with_caps(&field, n, k, seed::derive_seed(master, seed::STREAM_CODE, i as u64), caps)?;
            let hit = (1..code.dual_size()).any(|m| heavy[field.index_of(&code.dual_codeword(m))]);
            Ok(usize::from(hit))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let expected = heavy.iter().skip(1).filter(|&&h| h).count() as f64 / q.powi(k as i32);
    Ok(MaxProbScan {
        k,
        fraction: hits as f64 / trials as f64,
        envelope: q.powf(n as f64 * (rate - eps) - k as f64),
        expected_violators: expected,
    })
}

/// Exact law of `w(y)` under `q`, as `(weight, mass)` sorted by weight.
pub fn weight_marginal<T: Real>(model: &DualSamplerModel<T>, weight: &WeightKind) -> Vec<(f64, f64)> {
    let field = model.code.field();
    let mut pairs: Vec<(f64, f64)> =
        model.support.iter().zip(&model.probs).map(|(y, p)| (weight.eval(field, y), p.as_f64())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (w, p) in pairs {
        match out.last_mut() {
            Some(last) if (last.0 - w).abs() <= 1e-9 => last.1 += p,
            _ => out.push((w, p)),
        }
    }
    out
}

/// One row of the minimum-weight experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MinWeightRow {
    /// Trial index feeding the seed derivation.
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    /// Minimum weight over `(C⊥)*` by exhaustive search.
    pub d_min: f64,
    pub expected_weight: f64,
    /// Empirical fraction of samples with `w ≤ d_min + margin`.
    pub frac_within_margin: f64,
    /// Exact `q(w ≤ d_min + margin)`.
    pub exact_within_margin: f64,
    pub success_floor: f64,
    pub p_zero_branch: f64,
    /// Every maximizer of `q` has weight `d_min`.
    pub argmax_is_min_weight: bool,
    /// Mass of `q` inside the typical set, when one was supplied.
    pub typical_mass: Option<f64>,
    /// Set when `M = 0` and the row carries no sampling data.
    pub zero_dual_mass: bool,
}

impl MinWeightRow {
    /// `|empirical − exact| ≤ 4σ` with `σ² = p(1−p)/samples`, floored at `1/samples`.
    pub fn within_four_sigma(&self, samples: usize) -> bool {
        let p = self.exact_within_margin;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt().max(1.0 / samples as f64);
        (self.frac_within_margin - p).abs() <= 4.0 * sigma
    }
}

/// Settings for [`min_weight_experiment`].
#[derive(Debug, Clone)]
pub struct MinWeightConfig {
    pub k: usize,
    pub trials: usize,
    pub samples_per_seed: usize,
    pub master_seed: u64,
    pub margin: f64,
    pub weight: WeightKind,
}

/// Per-trial minimum-weight statistics over random `[n, k]` codes.
///
/// Trial `i` uses the code from `derive_seed(master, code, i)` and samples
/// from `derive_seed(master, sample, i)`.
pub fn min_weight_experiment<T: Real>(
    f: &AmplitudeFn<T>,
    cfg: &MinWeightConfig,
    typical: Option<&TypicalSetSpec>,
    caps: &Caps,
) -> Result<Vec<MinWeightRow>> {
    let field: FieldSpec = f.field().clone();
    let n = f.n();
    let spec = pgm::spectrum(f, caps)?;
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let code = LinearCode::random_with_caps(
                &field,
                n,
                cfg.k,
                seed::derive_seed(cfg.master_seed, seed::STREAM_CODE, i),
                caps,
            )?;
            let dual = code.dual()?;
            let d_min = match dual.min_weight_codeword(|y| cfg.weight.eval(&field, y)) {
                Ok((_, w)) => w,
                Err(QdpError::TrivialCode) => f64::NAN,
                Err(e) => return Err(e),
            };
            let mut row = MinWeightRow {
                seed: i,
                n,
                k: cfg.k,
                d_min,
                expected_weight: f64::NAN,
                frac_within_margin: f64::NAN,
                exact_within_margin: f64::NAN,
                success_floor: f64::NAN,
                p_zero_branch: f64::NAN,
                argmax_is_min_weight: false,
                typical_mass: None,
                zero_dual_mass: false,
            };
            let model = match model_from_spectrum(&code, &spec) {
                Ok(m) => m,
                Err(QdpError::ZeroDualMass) => {
                    row.zero_dual_mass = true;
                    return Ok(row);
                }
                Err(e) => return Err(e),
            };
            let cut = d_min + cfg.margin + 1e-9;
            let weights: Vec<f64> = model.support.iter().map(|y| cfg.weight.eval(&field, y)).collect();
            row.expected_weight = weights.iter().zip(&model.probs).map(|(w, p)| w * p.as_f64()).sum();
            row.exact_within_margin =
                weights.iter().zip(&model.probs).filter(|(w, _)| **w <= cut).map(|(_, p)| p.as_f64()).sum();
            let draws = sample_indices(&model, cfg.samples_per_seed, seed::derive_seed(cfg.master_seed, seed::STREAM_SAMPLE, i));
            if !draws.is_empty() {
                row.frac_within_margin =
                    draws.iter().filter(|&&j| weights[j] <= cut).count() as f64 / draws.len() as f64;
            }
            row.success_floor = model.success_floor.as_f64();
            row.p_zero_branch = model.p_zero_branch.as_f64();
            row.argmax_is_min_weight = model.argmax().iter().all(|&j| (weights[j] - d_min).abs() <= 1e-9);
            if let Some(t) = typical {
                row.typical_mass = Some(typicality_of_samples(&model, t)?.mass);
            }
            Ok(row)
        })
        .collect()
}

//! The Pretty Good Measurement for `{ψ_c}_{c∈C}`.
//!
//! In the Fourier basis `|ψ̂_c⟩ = Σ_s χ_c(u_s)|W_s⟩` with
//! `W_s = Σ_{e ∈ s+C⊥} f̂(e)|e⟩`, and the PGM succeeds with probability
//! `(Σ_s Z_s)² / |C|` where `Z_s = ‖W_s‖`.

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;

use crate::analysis::{FamilyConstants, TypicalSetSpec};
use crate::caps::{space_size, Caps};
use crate::code::LinearCode;
use crate::error::{QdpError, Result};
use crate::field::{Elem, FieldSpec};
use crate::linalg;
use crate::scalar::{root_of_unity, Real};
use crate::seed;
use crate::spectral::{shifted_state, AmplitudeFn};

/// Closed-form PGM outcome.
#[derive(Debug, Clone)]
pub struct PgmReport<T: Real> {
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    /// `|C| = q^rank`.
    pub code_size: usize,
    /// `Z_s` indexed by syndrome.
    pub coset_masses: Vec<T>,
    pub p_pgm: T,
}

impl<T: Real> PgmReport<T> {
    /// `Σ_s Z_s²`, which is 1 for a unit-norm `f`.
    pub fn total_mass(&self) -> T {
        self.coset_masses.iter().map(|&z| z * z).sum()
    }
}

/// `|f̂(y)|²` for every `y`.
pub fn spectrum<T: Real>(f: &AmplitudeFn<T>, caps: &Caps) -> Result<Vec<T>> {
    f.dft(caps)?.probabilities(caps)
}

/// `Z_s` from a precomputed spectrum.
pub fn coset_masses_from_spectrum<T: Real>(code: &LinearCode, spec: &[T]) -> Vec<T> {
    let table = code.syndrome_table();
    let mut sums = vec![T::zero(); code.syndrome_count()];
    for (&s, &p) in table.iter().zip(spec) {
        sums[s as usize] = sums[s as usize] + p;
    }
    sums.into_iter().map(Float::sqrt).collect()
}

/// `(Σ_s Z_s)² / |C|`.
pub fn p_pgm_from_masses<T: Real>(masses: &[T], code_size: usize) -> T {
    let s: T = masses.iter().copied().sum();
    s * s / T::from_count(code_size)
}

fn check_lengths<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>) -> Result<()> {
    if code.n() != f.n() || code.field() != f.field() {
        return Err(QdpError::LengthMismatch { expected: code.n(), got: f.n() });
    }
    Ok(())
}

/// `Z_s` for every syndrome.
pub fn coset_masses<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<Vec<T>> {
    check_lengths(code, f)?;
    Ok(coset_masses_from_spectrum(code, &spectrum(f, caps)?))
}

pub fn pgm_success<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<PgmReport<T>> {
    let z = coset_masses(code, f, caps)?;
    Ok(report_from_masses(code, z))
}

pub fn report_from_masses<T: Real>(code: &LinearCode, z: Vec<T>) -> PgmReport<T> {
    let size = code.size();
    PgmReport {
        n: code.n(),
        k: code.k(),
        rank: code.rank(),
        code_size: size,
        p_pgm: p_pgm_from_masses(&z, size),
        coset_masses: z,
    }
}

/// Dense PGM oracle outcome.
#[derive(Debug, Clone)]
pub struct DenseOracle<T> {
    /// Mean of `⟨ψ̂_c|M_c|ψ̂_c⟩` over `c ∈ C`.
    pub mean: T,
    /// Per-codeword success, in message-index order.
    pub per_codeword: Vec<T>,
    /// Number of eigenvalues of `ρ` above the kernel threshold.
    pub support_rank: usize,
}

/// Eigenvalues at or below this are treated as the kernel of `ρ`.
pub const KERNEL_THRESHOLD: f64 = 1e-12;

/// `|ψ̂_c⟩` for every codeword, by dense transform of `|ψ_c⟩`.
pub fn fourier_codeword_states<T: Real>(
    code: &LinearCode,
    f: &AmplitudeFn<T>,
    caps: &Caps,
) -> Result<Vec<Vec<Complex<T>>>> {
    check_lengths(code, f)?;
    Caps::check("dense oracle q^n", space_size(code.field().q(), code.n()), caps.dense)?;
    (0..code.size())
        .map(|m| Ok(shifted_state(&code.codeword(m), f, caps)?.dft().into_amplitudes()))
        .collect()
}

/// Builds `ρ = Σ_c |ψ̂_c⟩⟨ψ̂_c|`, takes `ρ^{−1/2}` on its support by
/// eigendecomposition and evaluates `⟨ψ̂_c|ρ^{−1/2}|ψ̂_c⟩²` for every `c`.
pub fn pgm_dense_oracle<T>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<DenseOracle<T>>
where
    T: Real + RealField,
{
    let states = fourier_codeword_states(code, f, caps)?;
    let dim = states[0].len();
    let zero = Complex::new(<T as num_traits::Zero>::zero(), <T as num_traits::Zero>::zero());
    let mut rho = DMatrix::from_element(dim, dim, zero);
    for psi in &states {
        for i in 0..dim {
            if psi[i] == zero {
                continue;
            }
            for j in 0..dim {
                rho[(i, j)] += psi[i] * psi[j].conj();
            }
        }
    }
    let mut asym = <T as num_traits::Zero>::zero();
    for i in 0..dim {
        for j in 0..dim {
            asym = Float::max(asym, (rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    if asym > T::lit(1e-10) {
        return Err(QdpError::Internal(format!("rho not Hermitian: {}", asym.as_f64())));
    }
    let eig = SymmetricEigen::new(rho);
    let threshold = T::lit(KERNEL_THRESHOLD);
    let support: Vec<(T, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > threshold)
        .map(|(i, &l)| (Float::powf(l, T::lit(-0.5)), i))
        .collect();
    let per_codeword: Vec<T> = states
        .iter()
        .map(|psi| {
            let mut acc = <T as num_traits::Zero>::zero();
            for &(w, col) in &support {
                let v = eig.eigenvectors.column(col);
                let mut overlap = zero;
                for i in 0..dim {
                    overlap += v[i].conj() * psi[i];
                }
                acc += w * overlap.norm_sqr();
            }
            acc * acc
        })
        .collect();
    let mean = per_codeword.iter().copied().fold(<T as num_traits::Zero>::zero(), |a, b| a + b)
        / T::from_count(per_codeword.len());
    Ok(DenseOracle { mean, per_codeword, support_rank: support.len() })
}

/// Normalized `W̃_s` for every syndrome; `|u_s⟩` stands in where `Z_s = 0`.
pub fn normalized_coset_states<T: Real>(
    code: &LinearCode,
    fhat: &[Complex<T>],
) -> Result<(Vec<Vec<Complex<T>>>, Vec<T>)> {
    let table = code.syndrome_table();
    let zero = Complex::new(T::zero(), T::zero());
    let count = code.syndrome_count();
    let mut w = vec![vec![zero; fhat.len()]; count];
    for (idx, (&s, &v)) in table.iter().zip(fhat).enumerate() {
        w[s as usize][idx] = v;
    }
    let mut z = Vec::with_capacity(count);
    for (s, ws) in w.iter_mut().enumerate() {
        let norm = crate::scalar::norm_sqr(ws).sqrt();
        z.push(norm);
        if norm > T::zero() {
            for a in ws.iter_mut() {
                *a = *a / norm;
            }
        } else {
            let u = code.representative(s)?;
            ws[code.field().index_of(&u)] = Complex::new(T::one(), T::zero());
        }
    }
    Ok((w, z))
}

/// `Σ_s χ_c(u_s) v_s`.
pub(crate) fn phased_sum<T: Real>(
    code: &LinearCode,
    c: &[Elem],
    vecs: &[Vec<Complex<T>>],
    skip_zero: bool,
) -> Result<Vec<Complex<T>>> {
    let field = code.field();
    let dim = vecs[0].len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
    for (s, v) in vecs.iter().enumerate() {
        if skip_zero && s == 0 {
            continue;
        }
        let u = code.representative(s)?;
        let phase = root_of_unity::<T>(field.phase_vec(c, &u), field.p());
        for (o, &x) in out.iter_mut().zip(v) {
            *o = *o + phase * x;
        }
    }
    Ok(out)
}

/// `|⟨ψ̂_c|Y_c⟩|²` with `Y_c = |C|^{−1/2} Σ_s χ_c(u_s) W̃_s`, built from the
/// code's coset representatives.
pub fn pgm_success_via_basis<T: Real>(code: &LinearCode, f: &AmplitudeFn<T>, caps: &Caps) -> Result<Vec<T>> {
    let states = fourier_codeword_states(code, f, caps)?;
    let fhat = f.dft(caps)?;
    let (w, _) = normalized_coset_states(code, fhat.materialize(caps)?)?;
    let scale = T::from_count(code.size()).sqrt().recip();
    states
        .iter()
        .enumerate()
        .map(|(m, psi)| {
            let y = phased_sum(code, &code.codeword(m), &w, false)?;
            Ok((crate::scalar::inner(psi, &y) * scale).norm_sqr())
        })
        .collect()
}

/// Ensemble statistics of `Z̃_s(ε)² = Σ_{y ∈ T ∩ (s + C⊥)} p(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZtildeMoments {
    pub mean: f64,
    pub variance: f64,
    /// `Σ_{y∈T, y≠s} p(y)/q^k + [s∈T] p(s)`.
    pub exact_mean: f64,
    /// `(q K₂²/K₁) q^{−n(H−2β−α)} / q^k`.
    pub variance_bound: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    /// Every `G ∈ F_q^{k×n}`.
    Exhaustive,
    /// `trials` seeded draws.
    MonteCarlo { trials: usize, seed: u64 },
}

fn typical_members(field: &FieldSpec, t: &TypicalSetSpec) -> Result<Vec<(Vec<Elem>, f64)>> {
    Caps::check("typical set scan q^n", space_size(field.q(), t.n), 1 << 22)?;
    let mut out = Vec::new();
    let mut y = vec![0; t.n];
    for idx in 0..field.q().pow(t.n as u32) {
        field.fill_vector(idx, &mut y);
        if t.contains(field, &y) {
            out.push((y.clone(), t.prob(field, &y)));
        }
    }
    Ok(out)
}

/// `Z̃_s(ε)²` for one generator matrix.
fn ztilde_sq(field: &FieldSpec, g: &[Vec<Elem>], s: &[Elem], members: &[(Vec<Elem>, f64)]) -> f64 {
    members
        .iter()
        .filter(|(y, _)| {
            let d = field.sub_vec(y, s);
            linalg::times_col(field, g, &d).iter().all(|&a| a == 0)
        })
        .map(|(_, p)| p)
        .sum()
}

fn random_matrix(field: &FieldSpec, k: usize, n: usize, seed: u64) -> Vec<Vec<Elem>> {
    use rand::Rng;
    let mut rng = seed::rng(seed);
    let q = field.q() as Elem;
    (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect()
}

pub fn ztilde_moments(
    field: &FieldSpec,
    k: usize,
    t: &TypicalSetSpec,
    constants: FamilyConstants,
    s: &[Elem],
    mode: EnsembleMode,
) -> Result<ZtildeMoments> {
    let n = t.n;
    if s.len() != n {
        return Err(QdpError::LengthMismatch { expected: n, got: s.len() });
    }
    let members = typical_members(field, t)?;
    let q = field.q();
    let qk = (q as f64).powi(k as i32);
    let values: Vec<f64> = match mode {
        EnsembleMode::Exhaustive => {
            let count = space_size(q, k * n);
            Caps::check("exhaustive ensemble q^{kn}", count, 1 << 20)?;
            (0..count as usize)
                .into_par_iter()
                .map(|idx| {
                    let flat = field.vector_at(idx, k * n);
                    let g: Vec<Vec<Elem>> = flat.chunks(n).map(<[Elem]>::to_vec).collect();
                    ztilde_sq(field, &g, s, &members)
                })
                .collect()
        }
        EnsembleMode::MonteCarlo { trials, seed: master } => (0..trials)
            .into_par_iter()
            .map(|i| {
                let g = random_matrix(field, k, n, seed::derive_seed(master, seed::STREAM_CODE, i as u64));
                ztilde_sq(field, &g, s, &members)
            })
            .collect(),
    };
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
    let mut exact_mean = 0.0;
    for (y, p) in &members {
        if y.as_slice() == s {
            exact_mean += p;
        } else {
            exact_mean += p / qk;
        }
    }
    let c = constants;
    let variance_bound =
        q as f64 * c.k2 * c.k2 / c.k1 * (q as f64).powf(-(n as f64) * (c.h - 2.0 * c.beta - c.alpha)) / qk;
    Ok(ZtildeMoments { mean, variance, exact_mean, variance_bound, samples: values.len() })
}

/// Fraction of sampled codes with `Z̃_s(ε)² ≥ (1 − δ − q^{−(H−R)n/8}) / q^k`.
pub fn concentration_check(
    field: &FieldSpec,
    k: usize,
    t: &TypicalSetSpec,
    constants: FamilyConstants,
    s: &[Elem],
    trials: usize,
    seed_master: u64,
) -> Result<f64> {
    let n = t.n;
    let rate = k as f64 / n as f64;
    let gap = constants.h - rate;
    if gap <= 0.0 {
        return Err(QdpError::PreconditionViolated(format!("H - R = {gap} must be positive")));
    }
    if 2.0 * constants.beta + constants.alpha > gap / 2.0 {
        return Err(QdpError::PreconditionViolated(format!(
            "2 beta + alpha = {} exceeds (H - R)/2 = {}",
            2.0 * constants.beta + constants.alpha,
            gap / 2.0
        )));
    }
    let members = typical_members(field, t)?;
    let q = field.q() as f64;
    let threshold = (1.0 - t.defect - q.powf(-gap * n as f64 / 8.0)) / q.powi(k as i32);
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = random_matrix(field, k, n, seed::derive_seed(seed_master, seed::STREAM_CODE, i as u64));
            usize::from(ztilde_sq(field, &g, s, &members) >= threshold * (1.0 - 1e-12))
        })
        .sum();
    Ok(hits as f64 / trials as f64)
}

/// `⟨ψ̂_c|ψ̃_c⟩` with `ψ̃_c` the renormalized restriction of `ψ̂_c` to `T`.
pub fn truncated_fidelity<T: Real>(
    code: &LinearCode,
    f: &AmplitudeFn<T>,
    t: &TypicalSetSpec,
    c: &[Elem],
    caps: &Caps,
) -> Result<T> {
    check_lengths(code, f)?;
    let psi = shifted_state(c, f, caps)?.dft().into_amplitudes();
    let field = code.field();
    let mut y = vec![0; code.n()];
    let mut restricted = psi.clone();
    for (idx, a) in restricted.iter_mut().enumerate() {
        field.fill_vector(idx, &mut y);
        if !t.contains(field, &y) {
            *a = Complex::new(T::zero(), T::zero());
        }
    }
    let mass = crate::scalar::norm_sqr(&restricted);
    if mass <= T::zero() {
        return Err(QdpError::EmptyTypicalMass);
    }
    Ok(crate::scalar::inner(&psi, &restricted).re / mass.sqrt())
}

/// `min(1, K/N)`.
pub fn distinguishability_bound(states: &BigUint, dimension: &BigUint) -> f64 {
    if states >= dimension {
        crate::rank::big_ratio(dimension, states).min(1.0)
    } else {
        1.0
    }
}

/// `|T|/|C| + √δ`.
pub fn converse_bound(code: &LinearCode, t: &TypicalSetSpec) -> f64 {
    let size = BigUint::from(code.size());
    distinguishability_bound(&size, &t.cardinality) + t.defect.max(0.0).sqrt()
}

/// Mean and sample standard deviation of `P_PGM` at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T> {
    pub k: usize,
    pub mean: T,
    pub std: T,
    /// Per-trial values in trial order.
    pub values: Vec<T>,
}

/// `P_PGM` for `k = 1..n−1` over `trials` codes.
///
/// Trial `i` draws one `(n−1) × n` matrix from `derive_seed(master, code, i)`
/// and uses its first `k` rows at dimension `k`.
pub fn pgm_sweep<T: Real>(
    f: &AmplitudeFn<T>,
    trials: usize,
    master_seed: u64,
    caps: &Caps,
) -> Result<Vec<SweepPoint<T>>> {
    let field = f.field().clone();
    let n = f.n();
    if n < 2 || trials == 0 {
        return Err(QdpError::InvalidParameter("need n >= 2 and trials >= 1".into()));
    }
    let spec = spectrum(f, caps)?;
    let per_trial: Vec<Vec<T>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = random_matrix(&field, n - 1, n, seed::derive_seed(master_seed, seed::STREAM_CODE, i as u64));
            (1..n)
                .map(|k| {
                    let code = LinearCode::with_caps(&field, g[..k].to_vec(), n, None, caps)?;
                    let z = coset_masses_from_spectrum(&code, &spec);
                    Ok(p_pgm_from_masses(&z, code.size()))
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    Ok((1..n)
        .map(|k| {
            let values: Vec<T> = per_trial.iter().map(|v| v[k - 1]).collect();
            let (mean, std) = mean_std(&values);
            SweepPoint { k, mean, std, values }
        })
        .collect())
}

/// Mean and sample standard deviation (`0` for a single value).
pub fn mean_std<T: Real>(values: &[T]) -> (T, T) {
    let len = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / len;
    if values.len() < 2 {
        return (mean, T::zero());
    }
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (len - T::one());
    (mean, var.sqrt())
}

/// `f64` view of a report, for serialization.
pub fn masses_f64<T: Real>(r: &PgmReport<T>) -> Vec<f64> {
    r.coset_masses.iter().map(|z| z.as_f64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::bernoulli_g;

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    #[test]
    fn boundary_noises() {
        let f = f2();
        let caps = Caps::default();
        let code = LinearCode::random(&f, 5, 2, 3).unwrap();
        let d = AmplitudeFn::<f64>::delta(&f, 5);
        let r = pgm_success(&code, &d, &caps).unwrap();
        assert!((r.p_pgm - 1.0).abs() < 1e-12);
        let expected = (code.size() as f64).powf(-0.5);
        assert!(r.coset_masses.iter().all(|z| (z - expected).abs() < 1e-12));
        let u = AmplitudeFn::<f64>::uniform(&f, 5);
        let r = pgm_success(&code, &u, &caps).unwrap();
        assert!((r.p_pgm - 1.0 / code.size() as f64).abs() < 1e-12);
        assert!((r.coset_masses[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn masses_by_explicit_coset_sums() {
        let f = f2();
        let caps = Caps::default();
        let code = LinearCode::from_generator(&f, vec![vec![1, 1, 0]], 3).unwrap();
        let g = bernoulli_g::<f64>(&f, 0.1).unwrap();
        let fa = AmplitudeFn::product(&f, g, 3).unwrap();
        let z = coset_masses(&code, &fa, &caps).unwrap();
        // |ĝ|² = (0.8, 0.2); cosets of C⊥ = {000, 110, 001, 111}.
        let p = |y: [u32; 3]| y.iter().map(|&a| if a == 0 { 0.8 } else { 0.2 }).product::<f64>();
        let coset0 = p([0, 0, 0]) + p([1, 1, 0]) + p([0, 0, 1]) + p([1, 1, 1]);
        let coset1 = p([1, 0, 0]) + p([0, 1, 0]) + p([1, 0, 1]) + p([0, 1, 1]);
        assert!((z[0] * z[0] - coset0).abs() < 1e-14);
        assert!((z[1] * z[1] - coset1).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_dense_oracle() {
        let f = f2();
        let caps = Caps::default();
        let code = LinearCode::from_generator(&f, vec![vec![1, 0, 1, 1], vec![0, 1, 1, 0]], 4).unwrap();
        let fa = AmplitudeFn::product(&f, bernoulli_g::<f64>(&f, 0.1).unwrap(), 4).unwrap();
        let closed = pgm_success(&code, &fa, &caps).unwrap().p_pgm;
        let dense = pgm_dense_oracle(&code, &fa, &caps).unwrap();
        assert!((closed - dense.mean).abs() < 1e-9);
        let spread = dense.per_codeword.iter().cloned().fold(f64::MIN, f64::max)
            - dense.per_codeword.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-9);
    }

    #[test]
    fn trivial_code_oracle() {
        let f = f2();
        let caps = Caps::default();
        let code = LinearCode::from_generator(&f, vec![vec![0, 0, 0]], 3).unwrap();
        let fa = AmplitudeFn::product(&f, bernoulli_g::<f64>(&f, 0.2).unwrap(), 3).unwrap();
        assert!((pgm_dense_oracle(&code, &fa, &caps).unwrap().mean - 1.0).abs() < 1e-12);
        assert!((pgm_success(&code, &fa, &caps).unwrap().p_pgm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distinguishability() {
        let b = |x: u32| BigUint::from(x);
        assert_eq!(distinguishability_bound(&b(8), &b(8)), 1.0);
        assert_eq!(distinguishability_bound(&b(8), &b(2)), 0.25);
        assert_eq!(distinguishability_bound(&b(8), &b(0)), 0.0);
        assert_eq!(distinguishability_bound(&b(2), &b(8)), 1.0);
    }

    #[test]
    fn sweep_is_deterministic_and_nested_monotone() {
        let f = f2();
        let caps = Caps::default();
        let fa = AmplitudeFn::product(&f, bernoulli_g::<f64>(&f, 0.1).unwrap(), 8).unwrap();
        let a = pgm_sweep(&fa, 20, 9, &caps).unwrap();
        let b = pgm_sweep(&fa, 20, 9, &caps).unwrap();
        assert_eq!(a, b);
        for w in a.windows(2) {
            for (x, y) in w[0].values.iter().zip(&w[1].values) {
                assert!(y <= &(x + 1e-12));
            }
        }
    }
}

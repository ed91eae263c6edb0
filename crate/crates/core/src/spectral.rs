//! The Fourier transform over `F_q^n` and noise states.
//!
//! `f̂(y) = q^{−n/2} Σ_x χ_y(x) f(x)`. Dense transforms apply the `q × q`
//! character matrix along each coordinate in turn.

use std::sync::OnceLock;

use num_complex::Complex;
use rayon::prelude::*;

use crate::caps::{space_size, Caps};
use crate::error::{QdpError, Result};
use crate::field::{Elem, FieldSpec};
use crate::rank::RankNoiseParams;
use crate::scalar::{norm_sqr, Real};

/// Unit-norm tolerance for a scalar type.
pub fn norm_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1e3))
}

fn check_unit<T: Real>(v: &[Complex<T>]) -> Result<()> {
    let norm = norm_sqr(v).sqrt();
    if (norm - T::one()).abs() > norm_tolerance::<T>() {
        return Err(QdpError::NotUnitNorm { norm: norm.as_f64() });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Representation<T: Real> {
    /// `g^{⊗n}`.
    Product(Vec<Complex<T>>),
    Dense(Vec<Complex<T>>),
    /// `f_t^{a,b}`, radial in the rank weight.
    Rank(RankNoiseParams),
}

/// A unit-norm function `F_q^n → C`.
#[derive(Debug, Clone)]
pub struct AmplitudeFn<T: Real> {
    field: FieldSpec,
    n: usize,
    repr: Representation<T>,
    dense: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> AmplitudeFn<T> {
    pub fn product(field: &FieldSpec, g: Vec<Complex<T>>, n: usize) -> Result<Self> {
        if g.len() != field.q() {
            return Err(QdpError::LengthMismatch { expected: field.q(), got: g.len() });
        }
        check_unit(&g)?;
        Ok(Self { field: field.clone(), n, repr: Representation::Product(g), dense: OnceLock::new() })
    }

    pub fn dense(field: &FieldSpec, n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        let expected = space_size(field.q(), n);
        if amps.len() as u128 != expected {
            return Err(QdpError::LengthMismatch { expected: expected as usize, got: amps.len() });
        }
        check_unit(&amps)?;
        Ok(Self { field: field.clone(), n, repr: Representation::Dense(amps), dense: OnceLock::new() })
    }

    pub fn rank(params: RankNoiseParams) -> Self {
        Self {
            field: params.field().clone(),
            n: params.n(),
            repr: Representation::Rank(params),
            dense: OnceLock::new(),
        }
    }

    /// Point mass at `0`.
    pub fn delta(field: &FieldSpec, n: usize) -> Self {
        Self::product(field, crate::noise::point_mass_g(field), n).expect("unit norm")
    }

    /// Constant `q^{−n/2}`.
    pub fn uniform(field: &FieldSpec, n: usize) -> Self {
        Self::product(field, crate::noise::uniform_g(field), n).expect("unit norm")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.repr
    }

    /// Per-symbol `g` when `f = g^{⊗n}`.
    pub fn symbol_amplitudes(&self) -> Option<&[Complex<T>]> {
        match &self.repr {
            Representation::Product(g) => Some(g),
            _ => None,
        }
    }

    pub fn value(&self, x: &[Elem]) -> Result<Complex<T>> {
        if x.len() != self.n {
            return Err(QdpError::LengthMismatch { expected: self.n, got: x.len() });
        }
        Ok(match &self.repr {
            Representation::Product(g) => x
                .iter()
                .fold(Complex::new(T::one(), T::zero()), |acc, &a| acc * g[a as usize]),
            Representation::Dense(v) => v[self.field.index_of(x)],
            Representation::Rank(p) => Complex::new(p.amplitude(x)?, T::zero()),
        })
    }

    /// Dense amplitude vector indexed by [`FieldSpec::index_of`], built on first use.
    pub fn materialize(&self, caps: &Caps) -> Result<&[Complex<T>]> {
        if let Representation::Dense(v) = &self.repr {
            return Ok(v);
        }
        if let Some(v) = self.dense.get() {
            return Ok(v);
        }
        Caps::check("amplitude q^n", space_size(self.field.q(), self.n), caps.product)?;
        let v = match &self.repr {
            Representation::Product(g) => tensor_power(g, self.n),
            Representation::Rank(p) => p.materialize(caps)?,
            Representation::Dense(_) => unreachable!(),
        };
        Ok(self.dense.get_or_init(|| v))
    }

    /// `|f(x)|²` for every `x`.
    pub fn probabilities(&self, caps: &Caps) -> Result<Vec<T>> {
        match &self.repr {
            Representation::Product(g) => {
                Caps::check("amplitude q^n", space_size(self.field.q(), self.n), caps.product)?;
                let r: Vec<T> = g.iter().map(|z| z.norm_sqr()).collect();
                Ok(tensor_power_real(&r, self.n))
            }
            _ => Ok(self.materialize(caps)?.iter().map(|z| z.norm_sqr()).collect()),
        }
    }

    /// `f̂`.
    pub fn dft(&self, caps: &Caps) -> Result<AmplitudeFn<T>> {
        match &self.repr {
            Representation::Product(g) => {
                AmplitudeFn::product(&self.field, dft_product(&self.field, g)?, self.n)
            }
            _ => {
                let v = dft_dense(&self.field, self.n, self.materialize(caps)?)?;
                Ok(AmplitudeFn {
                    field: self.field.clone(),
                    n: self.n,
                    repr: Representation::Dense(v),
                    dense: OnceLock::new(),
                })
            }
        }
    }

    /// `e^{iθ} f` as a dense function.
    pub fn with_phase(&self, phase: Complex<T>, caps: &Caps) -> Result<Self> {
        let v = self.materialize(caps)?.iter().map(|&z| z * phase).collect();
        Self::dense(&self.field, self.n, v)
    }
}

/// `g^{⊗n}` as a dense vector, big-endian.
pub fn tensor_power<T: Real>(g: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::one(), T::zero())];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| g.iter().map(move |&b| a * b)).collect();
    }
    out
}

/// `r^{⊗n}` for a real vector.
pub fn tensor_power_real<T: Real>(r: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::one()];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| r.iter().map(move |&b| a * b)).collect();
    }
    out
}

/// `ĝ(β) = q^{−1/2} Σ_α χ_β(α) g(α)`.
pub fn dft_product<T: Real>(field: &FieldSpec, g: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if g.len() != field.q() {
        return Err(QdpError::LengthMismatch { expected: field.q(), got: g.len() });
    }
    check_unit(g)?;
    Ok(kron_transform(field, 1, g, false))
}

/// Inverse of [`dft_product`].
pub fn idft_product<T: Real>(field: &FieldSpec, ghat: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if ghat.len() != field.q() {
        return Err(QdpError::LengthMismatch { expected: field.q(), got: ghat.len() });
    }
    check_unit(ghat)?;
    Ok(kron_transform(field, 1, ghat, true))
}

/// Dense forward transform on `F_q^n`.
pub fn dft_dense<T: Real>(field: &FieldSpec, n: usize, f: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let expected = space_size(field.q(), n);
    if f.len() as u128 != expected {
        return Err(QdpError::LengthMismatch { expected: expected as usize, got: f.len() });
    }
    Ok(kron_transform(field, n, f, false))
}

/// Dense inverse transform.
pub fn idft_dense<T: Real>(field: &FieldSpec, n: usize, f: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let expected = space_size(field.q(), n);
    if f.len() as u128 != expected {
        return Err(QdpError::LengthMismatch { expected: expected as usize, got: f.len() });
    }
    Ok(kron_transform(field, n, f, true))
}

/// Applies the normalized character matrix (or its adjoint) along every axis.
///
/// Each output row `(hi, y)` of an axis pass is computed by one task with a
/// fixed summation order, so results do not depend on the thread count.
fn kron_transform<T: Real>(field: &FieldSpec, n: usize, f: &[Complex<T>], inverse: bool) -> Vec<Complex<T>> {
    let q = field.q();
    let scale = T::lit((q as f64).sqrt().recip());
    let mut m: Vec<Complex<T>> = field.character_matrix::<T>();
    for z in m.iter_mut() {
        *z = if inverse { z.conj() } else { *z } * scale;
    }
    let mut cur = f.to_vec();
    let mut next = vec![Complex::new(T::zero(), T::zero()); f.len()];
    let mut stride = f.len();
    for _ in 0..n {
        stride /= q;
        let block = q * stride;
        let src = &cur;
        let m = &m;
        next.par_chunks_mut(stride).enumerate().for_each(|(row, out)| {
            let (hi, y) = (row / q, row % q);
            let base = hi * block;
            for o in out.iter_mut() {
                *o = Complex::new(T::zero(), T::zero());
            }
            for x in 0..q {
                let c = m[y * q + x];
                let input = &src[base + x * stride..base + (x + 1) * stride];
                for (o, &v) in out.iter_mut().zip(input) {
                    *o = *o + c * v;
                }
            }
        });
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// A unit-norm vector of `C^{q^n}`.
#[derive(Debug, Clone)]
pub struct DenseState<T: Real> {
    field: FieldSpec,
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> DenseState<T> {
    pub fn new(field: &FieldSpec, n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        let expected = space_size(field.q(), n);
        if amps.len() as u128 != expected {
            return Err(QdpError::LengthMismatch { expected: expected as usize, got: amps.len() });
        }
        check_unit(&amps)?;
        Ok(Self { field: field.clone(), n, amps })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn dft(&self) -> Self {
        Self { field: self.field.clone(), n: self.n, amps: kron_transform(&self.field, self.n, &self.amps, false) }
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        crate::scalar::inner(&self.amps, &other.amps)
    }
}

/// `|ψ_c⟩ = Σ_e f(e)|c + e⟩`.
pub fn shifted_state<T: Real>(c: &[Elem], f: &AmplitudeFn<T>, caps: &Caps) -> Result<DenseState<T>> {
    let field = f.field();
    let n = f.n();
    if c.len() != n {
        return Err(QdpError::LengthMismatch { expected: n, got: c.len() });
    }
    let src = f.materialize(caps)?;
    let mut out = vec![Complex::new(T::zero(), T::zero()); src.len()];
    let mut e = vec![0; n];
    for (idx, &v) in src.iter().enumerate() {
        field.fill_vector(idx, &mut e);
        let ce = field.add_vec(c, &e);
        out[field.index_of(&ce)] = v;
    }
    DenseState::new(field, n, out)
}

/// `Σ_y f̂(y) χ_c(y) |y⟩`, the transform of `|ψ_c⟩`.
pub fn qft_shifted_closed_form<T: Real>(
    c: &[Elem],
    f: &AmplitudeFn<T>,
    caps: &Caps,
) -> Result<DenseState<T>> {
    let field = f.field();
    let n = f.n();
    if c.len() != n {
        return Err(QdpError::LengthMismatch { expected: n, got: c.len() });
    }
    let fhat = f.dft(caps)?;
    let spec = fhat.materialize(caps)?;
    let mut y = vec![0; n];
    let out = spec
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            field.fill_vector(idx, &mut y);
            let ph = field.phase_vec(c, &y);
            v * crate::scalar::root_of_unity::<T>(ph, field.p())
        })
        .collect();
    DenseState::new(field, n, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::bernoulli_g;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn delta_and_uniform_swap() {
        let f = FieldSpec::new(3, 1).unwrap();
        let caps = Caps::default();
        let d = AmplitudeFn::<f64>::delta(&f, 2);
        let dh = d.dft(&caps).unwrap();
        for z in dh.materialize(&caps).unwrap() {
            assert!((z - c(1.0 / 3.0)).norm() < 1e-15);
        }
        let u = AmplitudeFn::<f64>::uniform(&f, 2);
        let uh = dft_dense(&f, 2, u.materialize(&caps).unwrap()).unwrap();
        assert!((uh[0] - c(1.0)).norm() < 1e-14);
        assert!(uh[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn two_point_transform() {
        let f = FieldSpec::new(2, 1).unwrap();
        let g = bernoulli_g::<f64>(&f, 0.1).unwrap();
        let gh = dft_product(&f, &g).unwrap();
        assert!((gh[0].re - 0.894_427_190_999_915_9).abs() < 1e-15);
        assert!((gh[1].re - 0.447_213_595_499_958).abs() < 1e-15);
        assert!((gh[0].norm_sqr() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn double_transform_reflects() {
        for (p, s) in [(3, 1), (5, 1), (2, 2)] {
            let f = FieldSpec::new(p, s).unwrap();
            let q = f.q();
            let raw: Vec<Complex<f64>> = (0..q).map(|i| Complex::new(i as f64 + 1.0, 0.5 * i as f64)).collect();
            let norm = norm_sqr(&raw).sqrt();
            let g: Vec<_> = raw.iter().map(|z| z / norm).collect();
            let gg = dft_product(&f, &dft_product(&f, &g).unwrap()).unwrap();
            for a in 0..q as Elem {
                assert!((gg[a as usize] - g[f.neg(a) as usize]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn product_dft_matches_dense() {
        let f = FieldSpec::new(3, 1).unwrap();
        let caps = Caps::default();
        for g in [
            bernoulli_g::<f64>(&f, 0.3).unwrap(),
            vec![c(0.6), Complex::new(0.0, 0.64f64.sqrt()), c(0.0)],
            vec![c(0.5), c(-0.5), Complex::new(0.5f64.sqrt(), 0.0)],
        ] {
            let fa = AmplitudeFn::product(&f, g, 2).unwrap();
            let via_product = fa.dft(&caps).unwrap();
            let via_dense = dft_dense(&f, 2, fa.materialize(&caps).unwrap()).unwrap();
            for (a, b) in via_product.materialize(&caps).unwrap().iter().zip(&via_dense) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn shifted_states() {
        let f = FieldSpec::new(2, 1).unwrap();
        let caps = Caps::default();
        let fa = AmplitudeFn::product(&f, bernoulli_g::<f64>(&f, 0.2).unwrap(), 2).unwrap();
        let s0 = shifted_state(&[0, 0], &fa, &caps).unwrap();
        assert_eq!(s0.amplitudes(), fa.materialize(&caps).unwrap());
        let d = AmplitudeFn::<f64>::delta(&f, 2);
        let s = shifted_state(&[1, 0], &d, &caps).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0));
        let closed = qft_shifted_closed_form(&[1, 0], &fa, &caps).unwrap();
        let dense = shifted_state(&[1, 0], &fa, &caps).unwrap().dft();
        for (a, b) in closed.amplitudes().iter().zip(dense.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn f32_transform_runs() {
        let f = FieldSpec::new(2, 1).unwrap();
        let g = bernoulli_g::<f32>(&f, 0.1).unwrap();
        let gh = dft_product(&f, &g).unwrap();
        assert!((gh[0].norm_sqr() - 0.8).abs() < 1e-6);
    }
}

//! Rank-metric noise `f_t^{a,b}` on `a × b` matrices over `F_q`.
//!
//! ```text
//! f_t(e) = [b − u choose t − u]_q / √N   for u = |e|_rk ≤ t, else 0,
//! N      = Σ_u S_u · [b − u choose t − u]_q²
//! ```
//!
//! with `S_u` the number of rank-`u` matrices. `N` is exact, so `Z = N / q^{at}`
//! is the normalizer in the form `1/√(q^{at} Z)`.

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

use crate::caps::{space_size, Caps};
use crate::error::{QdpError, Result};
use crate::field::{rank_weight, Elem, FieldSpec};
use crate::linalg;
use crate::scalar::Real;

fn big_pow(q: usize, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// Number of `t`-dimensional subspaces of `F_q^b`.
pub fn gaussian_binomial(q: usize, b: usize, t: usize) -> BigUint {
    if t > b {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..t {
        num *= big_pow(q, b) - big_pow(q, i);
        den *= big_pow(q, t) - big_pow(q, i);
    }
    num / den
}

/// Number of `a × b` matrices over `F_q` of rank `u`.
pub fn sphere_size_rank(q: usize, a: usize, b: usize, u: usize) -> BigUint {
    if u > a.min(b) {
        return BigUint::zero();
    }
    let mut count = gaussian_binomial(q, b, u);
    for i in 0..u {
        count *= big_pow(q, a) - big_pow(q, i);
    }
    count
}

/// `x / y` as `f64`, accurate even when both exceed the `f64` range.
pub fn big_ratio(x: &BigUint, y: &BigUint) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let shift = x.bits().max(y.bits()).saturating_sub(1000);
    let xs = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    let ys = (y >> shift).to_f64().unwrap_or(f64::INFINITY);
    xs / ys
}

/// Natural log of a big integer.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parameters of `f_t^{a,b}` with `a ≥ b` after an optional swap.
#[derive(Debug, Clone)]
pub struct RankNoiseParams {
    field: FieldSpec,
    a: usize,
    b: usize,
    t: usize,
    rows: usize,
    cols: usize,
    /// `[b − u choose t − u]_q` for `u = 0..=t`.
    shell_amplitudes: Vec<BigUint>,
    sphere: Vec<BigUint>,
    norm_sq: BigUint,
}

impl RankNoiseParams {
    /// Vectors of `F_q^{rows·cols}` are read as `rows × cols` matrices; the
    /// larger side plays the role of `a`.
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, t: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QdpError::InvalidParameter("matrix sides must be positive".into()));
        }
        let (a, b) = if rows >= cols { (rows, cols) } else { (cols, rows) };
        if t > b {
            return Err(QdpError::InvalidParameter(format!("rank t={t} exceeds b={b}")));
        }
        let q = field.q();
        let shell_amplitudes: Vec<BigUint> = (0..=t).map(|u| gaussian_binomial(q, b - u, t - u)).collect();
        let sphere: Vec<BigUint> = (0..=b).map(|u| sphere_size_rank(q, a, b, u)).collect();
        let norm_sq = shell_amplitudes
            .iter()
            .zip(&sphere)
            .map(|(g, s)| s * g * g)
            .sum();
        Ok(Self {
            field: field.clone(),
            a,
            b,
            t,
            rows,
            cols,
            shell_amplitudes,
            sphere,
            norm_sq,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Matrix shape used to read vectors.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `n = a·b`.
    pub fn n(&self) -> usize {
        self.a * self.b
    }

    /// Parameters of `f_{b−t}` on the same shape.
    pub fn dual(&self) -> Self {
        Self::new(&self.field, self.rows, self.cols, self.b - self.t).expect("b - t <= b")
    }

    /// `S_u` for `u = 0..=b`.
    pub fn sphere_sizes(&self) -> &[BigUint] {
        &self.sphere
    }

    /// `Σ_e |[b − |e| choose t − |e|]_q|²`, the squared norm before scaling.
    pub fn norm_sq(&self) -> &BigUint {
        &self.norm_sq
    }

    /// `Z = N / q^{at}`.
    pub fn normalizer(&self) -> f64 {
        big_ratio(&self.norm_sq, &big_pow(self.field.q(), self.a * self.t))
    }

    /// Amplitude on any matrix of rank `u`.
    pub fn amplitude_at_rank<T: Real>(&self, u: usize) -> T {
        if u > self.t {
            return T::zero();
        }
        let sq = big_ratio(&(&self.shell_amplitudes[u] * &self.shell_amplitudes[u]), &self.norm_sq);
        T::lit(sq.sqrt())
    }

    /// `|f_t|²` on any matrix of rank `u`.
    pub fn prob_at_rank(&self, u: usize) -> f64 {
        if u > self.t {
            return 0.0;
        }
        big_ratio(&(&self.shell_amplitudes[u] * &self.shell_amplitudes[u]), &self.norm_sq)
    }

    /// `ln |f_t|²` on rank `u`, `-∞` outside the support.
    pub fn ln_prob_at_rank(&self, u: usize) -> f64 {
        if u > self.t {
            return f64::NEG_INFINITY;
        }
        2.0 * big_ln(&self.shell_amplitudes[u]) - big_ln(&self.norm_sq)
    }

    /// Total `|f_t|²` mass on each rank shell, `u = 0..=b`.
    pub fn shell_masses(&self) -> Vec<f64> {
        (0..=self.b)
            .map(|u| {
                if u > self.t {
                    0.0
                } else {
                    let g = &self.shell_amplitudes[u];
                    big_ratio(&(&self.sphere[u] * g * g), &self.norm_sq)
                }
            })
            .collect()
    }

    pub fn rank_of(&self, e: &[Elem]) -> Result<usize> {
        rank_weight(&self.field, e, self.rows, self.cols)
    }

    /// `f_t(e)`.
    pub fn amplitude<T: Real>(&self, e: &[Elem]) -> Result<T> {
        Ok(self.amplitude_at_rank(self.rank_of(e)?))
    }

    /// Dense amplitudes over `F_q^{ab}` by radial evaluation.
    pub fn materialize<T: Real>(&self, caps: &Caps) -> Result<Vec<Complex<T>>> {
        let q = self.field.q();
        let n = self.n();
        Caps::check("rank noise q^{ab}", space_size(q, n), caps.product)?;
        let per_rank: Vec<T> = (0..=self.b).map(|u| self.amplitude_at_rank(u)).collect();
        let mut buf = vec![0; n];
        let mut out = Vec::with_capacity(q.pow(n as u32));
        for idx in 0..q.pow(n as u32) {
            self.field.fill_vector(idx, &mut buf);
            let u = self.rank_of(&buf)?;
            out.push(Complex::new(per_rank[u], T::zero()));
        }
        Ok(out)
    }

    /// `(1/√Z') Σ_{dim V = t} |π_V⟩` with `|π_V⟩` the `a`-fold tensor power of the
    /// uniform superposition over `V ≤ F_q^b`, one factor per length-`b` line
    /// of the matrix.
    pub fn subspace_oracle<T: Real>(&self) -> Result<Vec<Complex<T>>> {
        let q = self.field.q();
        let (a, b, t) = (self.a, self.b, self.t);
        Caps::check("subspace oracle q^{ab}", space_size(q, a * b), 1 << 16)?;
        Caps::check("subspace enumeration q^{tb}", space_size(q, t * b), 1 << 20)?;
        let subspaces = enumerate_subspaces(&self.field, b, t);
        let dim = q.pow((a * b) as u32);
        let mut acc = vec![T::zero(); dim];
        let line_amp = T::lit((q as f64).powf(-(t as f64) / 2.0));
        let mut buf = vec![0; a * b];
        for v in &subspaces {
            let mut members = vec![false; q.pow(b as u32)];
            for &m in v {
                members[m] = true;
            }
            for (idx, slot) in acc.iter_mut().enumerate() {
                self.field.fill_vector(idx, &mut buf);
                let lines = self.lines(&buf);
                if lines.iter().all(|l| members[self.field.index_of(l)]) {
                    *slot = *slot + line_amp.powi(a as i32);
                }
            }
        }
        let norm = acc.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm <= T::zero() {
            return Err(QdpError::Internal("empty subspace superposition".into()));
        }
        Ok(acc.into_iter().map(|x| Complex::new(x / norm, T::zero())).collect())
    }

    /// The `a` lines of length `b` of the matrix read from `e`.
    fn lines(&self, e: &[Elem]) -> Vec<Vec<Elem>> {
        if self.rows >= self.cols {
            e.chunks(self.cols).map(<[Elem]>::to_vec).collect()
        } else {
            (0..self.cols)
                .map(|j| (0..self.rows).map(|i| e[i * self.cols + j]).collect())
                .collect()
        }
    }
}

/// `t`-dimensional subspaces of `F_q^b`, each as the sorted indices of its elements.
pub fn enumerate_subspaces(field: &FieldSpec, b: usize, t: usize) -> Vec<Vec<usize>> {
    let q = field.q();
    if t == 0 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for idx in 0..q.pow((t * b) as u32) {
        let flat = field.vector_at(idx, t * b);
        let rows: Vec<Vec<Elem>> = flat.chunks(b).map(<[Elem]>::to_vec).collect();
        let mut reduced = rows.clone();
        linalg::rref(field, &mut reduced);
        if reduced != rows {
            continue;
        }
        let mut members: Vec<usize> = (0..q.pow(t as u32))
            .map(|m| {
                let coeffs = field.vector_at(m, t);
                field.index_of(&linalg::row_times(field, &coeffs, &rows, b))
            })
            .collect();
        members.sort_unstable();
        out.push(members);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(2, 5, 0), BigUint::one());
        assert_eq!(gaussian_binomial(2, 2, 1), BigUint::from(3u32));
        assert_eq!(gaussian_binomial(2, 2, 3), BigUint::zero());
        assert_eq!(gaussian_binomial(3, 3, 1), BigUint::from(13u32));
        let f = f2();
        for b in 0..=4 {
            for t in 0..=b {
                assert_eq!(
                    gaussian_binomial(2, b, t),
                    BigUint::from(enumerate_subspaces(&f, b, t).len()),
                    "b={b} t={t}"
                );
            }
        }
    }

    #[test]
    fn sphere_sizes_count_matrices() {
        assert_eq!(sphere_size_rank(2, 2, 2, 0), BigUint::one());
        assert_eq!(sphere_size_rank(2, 2, 2, 1), BigUint::from(9u32));
        assert_eq!(sphere_size_rank(2, 2, 2, 2), BigUint::from(6u32));
        let f = f2();
        let mut counts = [0u32; 3];
        for idx in 0..16 {
            counts[rank_weight(&f, &f.vector_at(idx, 4), 2, 2).unwrap()] += 1;
        }
        assert_eq!(counts, [1, 9, 6]);
        for (q, a, b) in [(2, 3, 2), (3, 2, 2), (2, 4, 3)] {
            let total: BigUint = (0..=b).map(|u| sphere_size_rank(q, a, b, u)).sum();
            assert_eq!(total, big_pow(q, a * b));
        }
    }

    #[test]
    fn unit_norm_and_support() {
        let f = f2();
        for t in 0..=2 {
            let p = RankNoiseParams::new(&f, 2, 2, t).unwrap();
            let v = p.materialize::<f64>(&Caps::default()).unwrap();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            for (idx, z) in v.iter().enumerate() {
                let u = p.rank_of(&f.vector_at(idx, 4)).unwrap();
                assert_eq!(z.re == 0.0, u > t);
            }
        }
        let delta = RankNoiseParams::new(&f, 2, 2, 0).unwrap().materialize::<f64>(&Caps::default()).unwrap();
        assert!((delta[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_rank_noise_is_constant_per_shell() {
        let p = RankNoiseParams::new(&f2(), 2, 2, 2).unwrap();
        let amps: Vec<f64> = (0..=2).map(|u| p.amplitude_at_rank::<f64>(u)).collect();
        // [2 choose 2] = 1, [1 choose 1] = 1, [0 choose 0] = 1: uniform.
        for a in amps {
            assert!((a - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn swap_keeps_a_at_least_b() {
        let p = RankNoiseParams::new(&f2(), 2, 3, 1).unwrap();
        assert_eq!((p.a(), p.b(), p.shape()), (3, 2, (2, 3)));
    }

    #[test]
    fn subspace_oracle_matches_closed_form() {
        for (rows, cols, t) in [(2, 2, 0), (2, 2, 1), (2, 2, 2), (3, 2, 1), (2, 3, 1)] {
            let p = RankNoiseParams::new(&f2(), rows, cols, t).unwrap();
            let a = p.subspace_oracle::<f64>().unwrap();
            let b = p.materialize::<f64>(&Caps::default()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-10, "shape {rows}x{cols} t={t}");
            }
        }
    }
}

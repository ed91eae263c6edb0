//! Arithmetic in `F_q = F_{p^s}`, the absolute trace, and additive characters.
//!
//! Elements are encoded as integers `0..q`: the element
//! `a_0 + a_1 x + … + a_{s-1} x^{s-1}` of `F_p[x]/(m(x))` is stored as
//! `a_0 + a_1 p + … + a_{s-1} p^{s-1}`.
//!
//! Vectors of `F_q^n` are indexed big-endian: `x ↦ Σ x_i q^{n-1-i}`, so integer
//! order coincides with lexicographic order of entries.

use std::fmt;
use std::sync::Arc;

use num_complex::{Complex, Complex64};

use crate::error::{QdpError, Result};
use crate::scalar::Real;

/// A field element.
pub type Elem = u32;

/// Largest field order accepted by [`FieldSpec::new`].
pub const MAX_FIELD_ORDER: usize = 1 << 16;

/// Multiplication and character tables are materialized up to this order.
const TABLE_LIMIT: usize = 512;

/// Irreducible moduli, coefficients low to high, monic.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (7, 4, &[3, 4, 5, 0, 1]),
];

struct Inner {
    p: u32,
    s: u32,
    q: usize,
    modulus: Vec<u32>,
    trace: Vec<u32>,
    add: Option<Vec<Elem>>,
    mul: Option<Vec<Elem>>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    /// `tr(x·y)` for all pairs, row `y`.
    phase: Option<Vec<u32>>,
    /// `χ_y(x)`, row `y`.
    chars: Option<Vec<Complex64>>,
    roots: Vec<Complex64>,
}

/// The finite field `F_{p^s}` with trace and character tables.
///
/// Cloning is cheap: the tables are shared.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("s", &self.0.s)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.s == other.0.s && self.0.modulus == other.0.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// Builds `F_{p^s}`.
    pub fn new(p: u32, s: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(QdpError::NotPrime(p));
        }
        if s == 0 {
            return Err(QdpError::InvalidField("degree s must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(s).unwrap_or(u128::MAX);
        if q > MAX_FIELD_ORDER as u128 {
            return Err(QdpError::InvalidField(format!(
                "q = {p}^{s} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        let modulus = match MODULI.iter().find(|(mp, ms, _)| *mp == p && *ms == s) {
            Some((_, _, m)) => {
                if !poly_irreducible(m, p) {
                    return Err(QdpError::ReducibleModulus { p, s });
                }
                m.to_vec()
            }
            None => find_irreducible(p, s).ok_or(QdpError::ReducibleModulus { p, s })?,
        };
        Ok(Self::build(p, s, q as usize, modulus))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn with_order(q: usize) -> Result<Self> {
        if q < 2 || q > MAX_FIELD_ORDER {
            return Err(QdpError::InvalidField(format!("order {q} out of range")));
        }
        let q32 = q as u32;
        let p = (2..=q32).find(|d| q32 % d == 0).expect("q >= 2");
        let mut rest = q32;
        let mut s = 0;
        while rest % p == 0 {
            rest /= p;
            s += 1;
        }
        if rest != 1 {
            return Err(QdpError::InvalidField(format!("{q} is not a prime power")));
        }
        Self::new(p, s)
    }

    fn build(p: u32, s: u32, q: usize, modulus: Vec<u32>) -> Self {
        let roots: Vec<Complex64> = (0..p).map(|k| crate::scalar::root_of_unity::<f64>(k, p)).collect();
        let mut inner = Inner {
            p,
            s,
            q,
            modulus,
            trace: Vec::new(),
            add: None,
            mul: None,
            neg: Vec::new(),
            inv: Vec::new(),
            phase: None,
            chars: None,
            roots,
        };
        inner.neg = (0..q as Elem).map(|a| raw_neg(&inner, a)).collect();
        if q <= TABLE_LIMIT {
            let mut add = vec![0; q * q];
            let mut mul = vec![0; q * q];
            for a in 0..q {
                for b in 0..q {
                    add[a * q + b] = raw_add(&inner, a as Elem, b as Elem);
                    mul[a * q + b] = raw_mul(&inner, a as Elem, b as Elem);
                }
            }
            inner.add = Some(add);
            inner.mul = Some(mul);
        }
        let mut field = FieldSpec(Arc::new(inner));
        let trace: Vec<u32> = (0..q as Elem).map(|a| field.raw_trace(a)).collect();
        let inv: Vec<Elem> = (0..q as Elem)
            .map(|a| if a == 0 { 0 } else { field.pow(a, (q - 2) as u64) })
            .collect();
        let inner = Arc::get_mut(&mut field.0).expect("unique during construction");
        inner.trace = trace;
        inner.inv = inv;
        if q <= TABLE_LIMIT {
            let mul = inner.mul.as_ref().expect("tables built");
            let phase: Vec<u32> = mul.iter().map(|&m| inner.trace[m as usize]).collect();
            let chars = phase.iter().map(|&t| inner.roots[t as usize]).collect();
            inner.phase = Some(phase);
            inner.chars = Some(chars);
        }
        field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn s(&self) -> u32 {
        self.0.s
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.0.q
    }

    /// Modulus coefficients, low to high, monic of degree `s`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        (a as usize) < self.0.q
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(QdpError::InvalidElement { value: a, q: self.0.q })
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.add {
            Some(t) => t[a as usize * self.0.q + b as usize],
            None => raw_add(&self.0, a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.mul {
            Some(t) => t[a as usize * self.0.q + b as usize],
            None => raw_mul(&self.0, a, b),
        }
    }

    /// Multiplicative inverse; `inv(0) = 0`.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.0.inv[a as usize]
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn raw_trace(&self, a: Elem) -> u32 {
        // tr(a) = a + a^p + … + a^{p^{s-1}}, which lies in the prime subfield.
        let mut acc = 0;
        let mut cur = a;
        for _ in 0..self.0.s {
            acc = self.add(acc, cur);
            cur = self.pow(cur, self.0.p as u64);
        }
        debug_assert!(acc < self.0.p);
        acc
    }

    /// Absolute trace `F_q → F_p`.
    #[inline]
    pub fn trace(&self, a: Elem) -> u32 {
        self.0.trace[a as usize]
    }

    /// `tr(x·y)`.
    #[inline]
    pub fn phase(&self, y: Elem, x: Elem) -> u32 {
        match &self.0.phase {
            Some(t) => t[y as usize * self.0.q + x as usize],
            None => self.trace(self.mul(x, y)),
        }
    }

    /// `χ_y(x) = exp(2πi·tr(x·y)/p)`.
    #[inline]
    pub fn character(&self, y: Elem, x: Elem) -> Complex64 {
        match &self.0.chars {
            Some(t) => t[y as usize * self.0.q + x as usize],
            None => self.0.roots[self.phase(y, x) as usize],
        }
    }

    /// [`character`](Self::character) in scalar type `T`.
    #[inline]
    pub fn character_in<T: Real>(&self, y: Elem, x: Elem) -> Complex<T> {
        let c = self.character(y, x);
        Complex::new(T::lit(c.re), T::lit(c.im))
    }

    /// The `q × q` character matrix, row `y`, column `x`.
    pub fn character_matrix<T: Real>(&self) -> Vec<Complex<T>> {
        let q = self.0.q;
        let mut out = Vec::with_capacity(q * q);
        for y in 0..q as Elem {
            for x in 0..q as Elem {
                out.push(self.character_in(y, x));
            }
        }
        out
    }

    /// `χ_y(x) = ∏ χ_{y_i}(x_i)` for vectors.
    pub fn character_vec(&self, y: &[Elem], x: &[Elem]) -> Result<Complex64> {
        if y.len() != x.len() {
            return Err(QdpError::LengthMismatch { expected: y.len(), got: x.len() });
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for (&yi, &xi) in y.iter().zip(x) {
            acc *= self.character(yi, xi);
        }
        Ok(acc)
    }

    /// `tr(x·y)` for vectors, as an element of `F_p`.
    pub fn phase_vec(&self, y: &[Elem], x: &[Elem]) -> u32 {
        let p = self.0.p;
        y.iter().zip(x).fold(0, |acc, (&yi, &xi)| (acc + self.phase(yi, xi)) % p)
    }

    /// Standard bilinear form `Σ x_i y_i`.
    pub fn dot(&self, x: &[Elem], y: &[Elem]) -> Elem {
        x.iter().zip(y).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    pub fn add_vec(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.add(a, b)).collect()
    }

    pub fn sub_vec(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.sub(a, b)).collect()
    }

    pub fn neg_vec(&self, x: &[Elem]) -> Vec<Elem> {
        x.iter().map(|&a| self.neg(a)).collect()
    }

    pub fn scale_vec(&self, c: Elem, x: &[Elem]) -> Vec<Elem> {
        x.iter().map(|&a| self.mul(c, a)).collect()
    }

    /// Big-endian index of a vector.
    pub fn index_of(&self, x: &[Elem]) -> usize {
        x.iter().fold(0usize, |acc, &a| acc * self.0.q + a as usize)
    }

    /// Inverse of [`index_of`](Self::index_of) for length `n`.
    pub fn vector_at(&self, mut index: usize, n: usize) -> Vec<Elem> {
        let q = self.0.q;
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = (index % q) as Elem;
            index /= q;
        }
        out
    }

    /// Writes the vector with the given index into `out`.
    pub fn fill_vector(&self, mut index: usize, out: &mut [Elem]) {
        let q = self.0.q;
        for slot in out.iter_mut().rev() {
            *slot = (index % q) as Elem;
            index /= q;
        }
    }

    /// Hamming weight.
    pub fn hamming_weight(x: &[Elem]) -> usize {
        x.iter().filter(|&&a| a != 0).count()
    }

    /// Copy with one character-table entry multiplied by `exp(i·angle)`.
    ///
    /// Only used for fault injection in the verification runner. Fields with
    /// no materialized table are returned unchanged.
    pub fn with_character_fault(&self, y: Elem, x: Elem, angle: f64) -> Self {
        let inner = &self.0;
        let chars = inner.chars.as_ref().map(|t| {
            let mut t = t.clone();
            t[y as usize * inner.q + x as usize] *= Complex64::from_polar(1.0, angle);
            t
        });
        FieldSpec(Arc::new(Inner {
            p: inner.p,
            s: inner.s,
            q: inner.q,
            modulus: inner.modulus.clone(),
            trace: inner.trace.clone(),
            add: inner.add.clone(),
            mul: inner.mul.clone(),
            neg: inner.neg.clone(),
            inv: inner.inv.clone(),
            phase: inner.phase.clone(),
            chars,
            roots: inner.roots.clone(),
        }))
    }
}

fn digits(inner: &Inner, mut a: Elem) -> Vec<u32> {
    let mut d = vec![0; inner.s as usize];
    for slot in d.iter_mut() {
        *slot = a % inner.p;
        a /= inner.p;
    }
    d
}

fn undigits(inner: &Inner, d: &[u32]) -> Elem {
    d.iter().rev().fold(0, |acc, &c| acc * inner.p + c)
}

fn raw_add(inner: &Inner, a: Elem, b: Elem) -> Elem {
    if inner.s == 1 {
        return (a + b) % inner.p;
    }
    let (da, db) = (digits(inner, a), digits(inner, b));
    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % inner.p).collect();
    undigits(inner, &sum)
}

fn raw_neg(inner: &Inner, a: Elem) -> Elem {
    if inner.s == 1 {
        return (inner.p - a) % inner.p;
    }
    let d: Vec<u32> = digits(inner, a).iter().map(|&x| (inner.p - x) % inner.p).collect();
    undigits(inner, &d)
}

fn raw_mul(inner: &Inner, a: Elem, b: Elem) -> Elem {
    let p = inner.p as u64;
    if inner.s == 1 {
        return ((a as u64 * b as u64) % p) as Elem;
    }
    let s = inner.s as usize;
    let (da, db) = (digits(inner, a), digits(inner, b));
    let mut prod = vec![0u64; 2 * s - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    // Reduce using x^s = -(m_0 + … + m_{s-1} x^{s-1}).
    for deg in (s..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &m) in inner.modulus[..s].iter().enumerate() {
            let idx = deg - s + i;
            prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
        }
    }
    let d: Vec<u32> = prod[..s].iter().map(|&c| c as u32).collect();
    undigits(inner, &d)
}

/// Remainder of `a` modulo monic `m` over `F_p`, coefficients low to high.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().expect("nonempty");
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p64 - lead) * mc as u64) % p64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn poly_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg == 0 || m[deg] != 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            if poly_rem(m, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn find_irreducible(p: u32, s: u32) -> Option<Vec<u32>> {
    let count = (p as u64).checked_pow(s)?;
    (0..count).find_map(|code| {
        let mut m = Vec::with_capacity(s as usize + 1);
        let mut c = code;
        for _ in 0..s {
            m.push((c % p as u64) as u32);
            c /= p as u64;
        }
        m.push(1);
        poly_irreducible(&m, p).then_some(m)
    })
}

/// A vector of `F_q^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqVector {
    entries: Vec<Elem>,
}

impl FqVector {
    pub fn new(field: &FieldSpec, entries: Vec<Elem>) -> Result<Self> {
        for &a in &entries {
            field.check(a)?;
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_raw(entries: Vec<Elem>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: vec![0; n] }
    }

    pub fn from_index(field: &FieldSpec, index: usize, n: usize) -> Self {
        Self { entries: field.vector_at(index, n) }
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Elem> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&a| a == 0)
    }

    pub fn index(&self, field: &FieldSpec) -> usize {
        field.index_of(&self.entries)
    }

    pub fn hamming_weight(&self) -> usize {
        FieldSpec::hamming_weight(&self.entries)
    }
}

impl AsRef<[Elem]> for FqVector {
    fn as_ref(&self) -> &[Elem] {
        &self.entries
    }
}

/// Row-major `a × b` matrix view: entry `(i, j)` is `x[i·b + j]`.
pub fn matv(x: &[Elem], a: usize, b: usize) -> Result<Vec<Vec<Elem>>> {
    if x.len() != a * b {
        return Err(QdpError::LengthMismatch { expected: a * b, got: x.len() });
    }
    Ok(x.chunks(b.max(1)).take(a).map(|r| r.to_vec()).collect())
}

/// Rank of [`matv`] over `F_q`.
pub fn rank_weight(field: &FieldSpec, x: &[Elem], a: usize, b: usize) -> Result<usize> {
    let mut rows = matv(x, a, b)?;
    Ok(crate::linalg::rank_in_place(field, &mut rows))
}

/// Transposed layout: the `b × a` vector whose matrix view is `matv(x)ᵀ`.
pub fn transpose_layout(x: &[Elem], a: usize, b: usize) -> Vec<Elem> {
    let mut out = vec![0; a * b];
    for i in 0..a {
        for j in 0..b {
            out[j * a + i] = x[i * b + j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rejects_non_prime() {
        assert!(matches!(FieldSpec::new(4, 1), Err(QdpError::NotPrime(4))));
        assert!(matches!(FieldSpec::new(1, 1), Err(QdpError::NotPrime(1))));
        assert!(FieldSpec::new(2, 0).is_err());
        assert!(FieldSpec::new(2, 17).is_err());
    }

    #[test]
    fn all_table_moduli_irreducible() {
        for (p, s, m) in MODULI {
            assert!(poly_irreducible(m, *p), "p={p} s={s}");
        }
        assert!(!poly_irreducible(&[1, 0, 1], 2));
        assert!(!poly_irreducible(&[0, 1, 1], 3));
    }

    #[test]
    fn prime_field_trace_is_identity() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.trace(0), 0);
        assert_eq!(f.trace(1), 1);
        let f = FieldSpec::new(5, 1).unwrap();
        for a in 0..5 {
            assert_eq!(f.trace(a), a);
        }
    }

    #[test]
    fn f3_character_value() {
        let f = FieldSpec::new(3, 1).unwrap();
        let expected = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!(close(f.character(1, 1), expected, 1e-14));
    }

    #[test]
    fn f4_trace_and_character() {
        let f = FieldSpec::new(2, 2).unwrap();
        let w = 2;
        assert_eq!(f.mul(w, w), f.add(w, 1));
        assert_eq!(f.trace(w), 1);
        assert_eq!(f.trace(1), 0);
        assert!(close(f.character(w, w), Complex64::new(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn binary_character() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert!(close(f.character(1, 1), Complex64::new(-1.0, 0.0), 1e-15));
        for x in 0..2 {
            assert_eq!(f.character(0, x), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn vector_characters() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!(close(f2.character_vec(&[0, 0], &[1, 1]).unwrap(), one, 1e-15));
        assert!(close(f2.character_vec(&[1, 1], &[1, 1]).unwrap(), one, 1e-15));
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert!(close(f3.character_vec(&[1, 1], &[1, 2]).unwrap(), one, 1e-14));
        assert!(f3.character_vec(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, s) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 2)] {
            let f = FieldSpec::new(p, s).unwrap();
            let q = f.q() as Elem;
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} s={s} a={a}");
                }
                for b in 0..q {
                    let tr = (f.trace(a) + f.trace(b)) % p;
                    assert_eq!(f.trace(f.add(a, b)), tr);
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn on_demand_arithmetic_matches_tables() {
        // 2^10 > TABLE_LIMIT: exercised without tables.
        let big = FieldSpec::new(2, 10).unwrap();
        assert_eq!(big.q(), 1024);
        for a in [1, 3, 77, 512, 1023] {
            assert_eq!(big.mul(a, big.inv(a)), 1);
            assert!(big.trace(a) < 2);
        }
        assert!(poly_irreducible(big.modulus(), 2));
    }

    #[test]
    fn character_orthogonality() {
        for (p, s) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (2, 3)] {
            let f = FieldSpec::new(p, s).unwrap();
            let q = f.q() as Elem;
            for d in 0..q {
                let sum: Complex64 = (0..q).map(|a| f.character(a, d)).sum();
                let expected = if d == 0 { q as f64 } else { 0.0 };
                assert!(close(sum, Complex64::new(expected, 0.0), 1e-12));
            }
        }
    }

    #[test]
    fn index_round_trip_is_lexicographic() {
        let f = FieldSpec::new(3, 1).unwrap();
        let mut prev: Option<Vec<Elem>> = None;
        for idx in 0..27 {
            let v = f.vector_at(idx, 3);
            assert_eq!(f.index_of(&v), idx);
            if let Some(p) = prev {
                assert!(p < v);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn matrix_view_and_rank() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(matv(&[1, 0, 0, 1], 2, 2).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(
            matv(&[1, 2, 3, 4, 5, 6], 2, 3).unwrap(),
            vec![vec![1, 2, 3], vec![4, 5, 6]]
        );
        assert_eq!(matv(&[0; 4], 2, 2).unwrap(), vec![vec![0, 0], vec![0, 0]]);
        assert!(matv(&[1, 2, 3], 2, 2).is_err());
        assert_eq!(rank_weight(&f, &[0, 0, 0, 0], 2, 2).unwrap(), 0);
        assert_eq!(rank_weight(&f, &[1, 0, 0, 1], 2, 2).unwrap(), 2);
        assert_eq!(rank_weight(&f, &[1, 1, 1, 1], 2, 2).unwrap(), 1);
    }

    #[test]
    fn with_order_decomposes() {
        let f = FieldSpec::with_order(9).unwrap();
        assert_eq!((f.p(), f.s()), (3, 2));
        assert!(FieldSpec::with_order(6).is_err());
    }

    #[test]
    fn fault_injection_breaks_orthogonality() {
        let f = FieldSpec::new(3, 1).unwrap().with_character_fault(1, 1, 0.1);
        let sum: Complex64 = (0..3).map(|a| f.character(a, 1)).sum();
        assert!(sum.norm() > 1e-3);
    }
}

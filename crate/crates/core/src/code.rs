//! Random linear codes, duals, syndromes of `F_q^n / C⊥`, and brute-force
//! codeword search.
//!
//! The syndrome of `y` is `B·yᵀ ∈ F_q^r`, where `B` is the reduced row echelon
//! basis of `C`. Its kernel is exactly `C⊥`, so syndromes label the cosets
//! `s + C⊥`. The representative of syndrome `σ` places `σ_j` on the `j`-th
//! pivot column of `B` and zero elsewhere.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::caps::{space_size, Caps};
use crate::error::{QdpError, Result};
use crate::field::{Elem, FieldSpec, FqVector};
use crate::linalg;
use crate::seed;

/// How coset representatives are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepresentativeRule {
    /// Syndrome digits on the pivot columns of `B`.
    #[default]
    Pivot,
    /// The pivot representative shifted by a syndrome-dependent dual codeword.
    /// Kept for invariance checks; `u_0` stays zero.
    Shifted,
}

#[derive(Debug, Clone)]
pub struct LinearCode {
    field: FieldSpec,
    n: usize,
    k: usize,
    generator: Vec<Vec<Elem>>,
    seed: Option<u64>,
    basis: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
    parity: Vec<Vec<Elem>>,
    rule: RepresentativeRule,
}

/// Serialized form of a code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub q: usize,
    pub p: u32,
    pub s: u32,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "G")]
    pub g: Vec<Elem>,
    pub seed: Option<u64>,
}

impl LinearCode {
    /// Code generated by the rows of `generator` (`k × n`).
    pub fn from_generator(field: &FieldSpec, generator: Vec<Vec<Elem>>, n: usize) -> Result<Self> {
        Self::with_caps(field, generator, n, None, &Caps::default())
    }

    pub fn with_caps(
        field: &FieldSpec,
        generator: Vec<Vec<Elem>>,
        n: usize,
        seed: Option<u64>,
        caps: &Caps,
    ) -> Result<Self> {
        if n == 0 {
            return Err(QdpError::InvalidParameter("code length must be positive".into()));
        }
        Caps::check("code space q^n", space_size(field.q(), n), caps.code)?;
        for row in &generator {
            if row.len() != n {
                return Err(QdpError::LengthMismatch { expected: n, got: row.len() });
            }
            for &a in row {
                field.check(a)?;
            }
        }
        let k = generator.len();
        let mut basis = generator.clone();
        if basis.is_empty() {
            basis.push(vec![0; n]);
        }
        let pivots = linalg::rref(field, &mut basis);
        let parity = linalg::nullspace_from_rref(field, &basis, &pivots, n);
        Ok(Self {
            field: field.clone(),
            n,
            k,
            generator,
            seed,
            basis,
            pivots,
            parity,
            rule: RepresentativeRule::Pivot,
        })
    }

    /// `G ∈ F_q^{k×n}` with i.i.d. uniform entries drawn from `seed`.
    pub fn random(field: &FieldSpec, n: usize, k: usize, seed: u64) -> Result<Self> {
        Self::random_with_caps(field, n, k, seed, &Caps::default())
    }

    pub fn random_with_caps(
        field: &FieldSpec,
        n: usize,
        k: usize,
        seed: u64,
        caps: &Caps,
    ) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(QdpError::InvalidParameter(format!("need 1 <= k < n, got k={k}, n={n}")));
        }
        Caps::check("code space q^n", space_size(field.q(), n), caps.code)?;
        let mut rng = seed::rng(seed);
        let q = field.q() as Elem;
        let g = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
            .collect();
        Self::with_caps(field, g, n, Some(seed), caps)
    }

    /// As [`random`](Self::random) but rejects rank-deficient draws.
    pub fn random_strict(field: &FieldSpec, n: usize, k: usize, seed: u64) -> Result<Self> {
        let code = Self::random(field, n, k, seed)?;
        if code.rank() < k {
            return Err(QdpError::RankDeficient { rank: code.rank(), k });
        }
        Ok(code)
    }

    /// The `index`-th generator matrix of `F_q^{k×n}` in row-major big-endian order.
    pub fn from_matrix_index(field: &FieldSpec, n: usize, k: usize, index: usize) -> Result<Self> {
        let flat = field.vector_at(index, k * n);
        let g = flat.chunks(n).map(<[Elem]>::to_vec).collect();
        Self::from_generator(field, g, n)
    }

    pub fn from_record(rec: &CodeRecord) -> Result<Self> {
        let field = FieldSpec::new(rec.p, rec.s)?;
        if field.q() != rec.q {
            return Err(QdpError::InvalidField(format!("q={} but p^s={}", rec.q, field.q())));
        }
        if rec.g.len() != rec.k * rec.n {
            return Err(QdpError::LengthMismatch { expected: rec.k * rec.n, got: rec.g.len() });
        }
        let g = rec.g.chunks(rec.n.max(1)).map(<[Elem]>::to_vec).collect();
        Self::with_caps(&field, g, rec.n, rec.seed, &Caps::default())
    }

    pub fn record(&self) -> CodeRecord {
        CodeRecord {
            q: self.field.q(),
            p: self.field.p(),
            s: self.field.s(),
            n: self.n,
            k: self.k,
            g: self.generator.concat(),
            seed: self.seed,
        }
    }

    pub fn with_rule(mut self, rule: RepresentativeRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nominal dimension (number of rows of `G`).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &[Vec<Elem>] {
        &self.generator
    }

    /// Reduced row echelon basis of `C`.
    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    /// Basis of `C⊥`, i.e. a parity-check matrix of `C`.
    pub fn parity_check(&self) -> &[Vec<Elem>] {
        &self.parity
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `|C| = q^rank`.
    pub fn size(&self) -> usize {
        self.field.q().pow(self.rank() as u32)
    }

    /// `|C⊥| = q^{n − rank}`.
    pub fn dual_size(&self) -> usize {
        self.field.q().pow((self.n - self.rank()) as u32)
    }

    /// Number of cosets of `C⊥`, equal to `|C|`.
    pub fn syndrome_count(&self) -> usize {
        self.size()
    }

    /// `q^n`.
    pub fn space_size(&self) -> usize {
        self.field.q().pow(self.n as u32)
    }

    /// Codeword `m·B` for the message with index `m`.
    pub fn codeword(&self, m: usize) -> Vec<Elem> {
        let msg = self.field.vector_at(m, self.rank());
        linalg::row_times(&self.field, &msg, &self.basis, self.n)
    }

    /// Dual codeword `m·H` for the message with index `m`.
    pub fn dual_codeword(&self, m: usize) -> Vec<Elem> {
        let msg = self.field.vector_at(m, self.parity.len());
        linalg::row_times(&self.field, &msg, &self.parity, self.n)
    }

    pub fn codewords(&self) -> Vec<Vec<Elem>> {
        (0..self.size()).map(|m| self.codeword(m)).collect()
    }

    pub fn dual_codewords(&self) -> Vec<Vec<Elem>> {
        (0..self.dual_size()).map(|m| self.dual_codeword(m)).collect()
    }

    pub fn contains(&self, x: &[Elem]) -> bool {
        linalg::times_col(&self.field, &self.parity, x).iter().all(|&a| a == 0)
    }

    pub fn dual_contains(&self, y: &[Elem]) -> bool {
        self.syndrome(y).iter().all(|&a| a == 0)
    }

    /// `y ∈ C⊥` tested as `χ_y(c) = 1` for every `c ∈ C`.
    pub fn dual_contains_by_characters(&self, y: &[Elem]) -> bool {
        (0..self.size()).all(|m| {
            let chi = self.field.character_vec(y, &self.codeword(m)).expect("equal lengths");
            (chi - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-9
        })
    }

    /// `B·yᵀ`.
    pub fn syndrome(&self, y: &[Elem]) -> Vec<Elem> {
        linalg::times_col(&self.field, &self.basis, y)
    }

    pub fn syndrome_index(&self, y: &[Elem]) -> usize {
        self.field.index_of(&self.syndrome(y))
    }

    fn pivot_representative(&self, s: usize) -> Vec<Elem> {
        let digits = self.field.vector_at(s, self.rank());
        let mut u = vec![0; self.n];
        for (&p, &d) in self.pivots.iter().zip(&digits) {
            u[p] = d;
        }
        u
    }

    /// Deterministic `u_s` with syndrome `s`; `u_0 = 0`.
    pub fn coset_representative(&self, s: usize) -> Result<FqVector> {
        Ok(FqVector::from_raw(self.representative(s)?))
    }

    pub(crate) fn representative(&self, s: usize) -> Result<Vec<Elem>> {
        let count = self.syndrome_count();
        if s >= count {
            return Err(QdpError::SyndromeOutOfRange { index: s, count });
        }
        let u = self.pivot_representative(s);
        match self.rule {
            RepresentativeRule::Pivot => Ok(u),
            RepresentativeRule::Shifted => {
                if s == 0 {
                    return Ok(u);
                }
                let d = self.dual_codeword((s * 7919 + 1) % self.dual_size());
                Ok(self.field.add_vec(&u, &d))
            }
        }
    }

    /// All `|C⊥|` elements of `s + C⊥`, ordered by dual message index.
    pub fn enumerate_coset(&self, s: usize) -> Result<Vec<FqVector>> {
        let u = self.representative(s)?;
        Ok((0..self.dual_size())
            .map(|m| FqVector::from_raw(self.field.add_vec(&u, &self.dual_codeword(m))))
            .collect())
    }

    /// Syndrome index of every vector of `F_q^n`, by vector index.
    pub fn syndrome_table(&self) -> Vec<u32> {
        let q = self.field.q();
        let r = self.rank();
        // Column j of B scaled by each a ∈ F_q, as syndrome indices.
        let contrib: Vec<Vec<u32>> = (0..self.n)
            .map(|j| {
                (0..q as Elem)
                    .map(|a| {
                        let col: Vec<Elem> =
                            self.basis.iter().map(|row| self.field.mul(a, row[j])).collect();
                        self.field.index_of(&col) as u32
                    })
                    .collect()
            })
            .collect();
        let mut table: Vec<u32> = vec![0];
        for col in contrib.iter() {
            let mut next = Vec::with_capacity(table.len() * q);
            for &pre in &table {
                for &c in col {
                    next.push(self.syndrome_add(pre, c, r));
                }
            }
            table = next;
        }
        table
    }

    #[inline]
    fn syndrome_add(&self, a: u32, b: u32, r: usize) -> u32 {
        let q = self.field.q() as u32;
        if q == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..r {
            let d = self.field.add(a % q, b % q);
            out += d * place;
            place *= q;
            a /= q;
            b /= q;
        }
        out
    }

    /// The dual code `C⊥`, generated by the parity-check basis.
    pub fn dual(&self) -> Result<Self> {
        Self::from_generator(&self.field, self.parity.clone(), self.n)
    }

    /// Nonzero codeword minimizing `weight`, ties broken lexicographically.
    pub fn min_weight_codeword<W>(&self, weight: W) -> Result<(FqVector, f64)>
    where
        W: Fn(&[Elem]) -> f64,
    {
        let mut best: Option<(Vec<Elem>, f64)> = None;
        for m in 1..self.size() {
            let c = self.codeword(m);
            let w = weight(&c);
            let better = match &best {
                None => true,
                Some((bc, bw)) => w < *bw || (w == *bw && c < *bc),
            };
            if better {
                best = Some((c, w));
            }
        }
        best.map(|(c, w)| (FqVector::from_raw(c), w))
            .ok_or(QdpError::TrivialCode)
    }
}

/// Mean and variance of `|ker H ∩ E|` over every `H ∈ F_q^{(n−k)×n}`.
pub fn kernel_intersection_moments(
    field: &FieldSpec,
    n: usize,
    k: usize,
    set: &[Vec<Elem>],
) -> Result<(f64, f64)> {
    if k > n {
        return Err(QdpError::InvalidParameter(format!("k={k} > n={n}")));
    }
    let rows = n - k;
    let count = space_size(field.q(), rows * n);
    Caps::check("parity-check ensemble", count, 1 << 24)?;
    let (mut sum, mut sum_sq) = (0f64, 0f64);
    for idx in 0..count as usize {
        let flat = field.vector_at(idx, rows * n);
        let h: Vec<Vec<Elem>> = flat.chunks(n.max(1)).map(<[Elem]>::to_vec).collect();
        let hits = set
            .iter()
            .filter(|e| linalg::times_col(field, &h, e).iter().all(|&a| a == 0))
            .count() as f64;
        sum += hits;
        sum_sq += hits * hits;
    }
    let total = count as f64;
    let mean = sum / total;
    Ok((mean, sum_sq / total - mean * mean))
}

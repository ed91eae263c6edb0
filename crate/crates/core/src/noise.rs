//! Per-symbol noise amplitudes and the noise-spec format.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{QdpError, Result};
use crate::field::{Elem, FieldSpec};
use crate::rank::RankNoiseParams;
use crate::scalar::Real;
use crate::spectral::{idft_product, AmplitudeFn};

/// q-ary symmetric amplitude: `g(0) = √(1−p)`, `g(α) = √(p/(q−1))` otherwise.
pub fn bernoulli_g<T: Real>(field: &FieldSpec, p: f64) -> Result<Vec<Complex<T>>> {
    if !(0.0..1.0).contains(&p) {
        return Err(QdpError::InvalidParameter(format!("crossover {p} outside [0, 1)")));
    }
    let q = field.q();
    let off = T::lit((p / (q as f64 - 1.0)).sqrt());
    let mut g = vec![Complex::new(off, T::zero()); q];
    g[0] = Complex::new(T::lit((1.0 - p).sqrt()), T::zero());
    Ok(g)
}

/// `δ_0`.
pub fn point_mass_g<T: Real>(field: &FieldSpec) -> Vec<Complex<T>> {
    let mut g = vec![Complex::new(T::zero(), T::zero()); field.q()];
    g[0] = Complex::new(T::one(), T::zero());
    g
}

/// Constant amplitude `q^{-1/2}`.
pub fn uniform_g<T: Real>(field: &FieldSpec) -> Vec<Complex<T>> {
    let v = T::lit((field.q() as f64).sqrt().recip());
    vec![Complex::new(v, T::zero()); field.q()]
}

/// Unit vector of `len` i.i.d. complex Gaussians, normalized.
pub fn haar_vector<T: Real, R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex<T>> {
    use rand_distr::StandardNormal;
    let raw: Vec<(f64, f64)> = (0..len).map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    raw.into_iter().map(|(a, b)| Complex::new(T::lit(a / norm), T::lit(b / norm))).collect()
}

/// User table; must have unit norm.
pub fn table_g<T: Real>(field: &FieldSpec, re: &[f64], im: &[f64]) -> Result<Vec<Complex<T>>> {
    let q = field.q();
    if re.len() != q {
        return Err(QdpError::LengthMismatch { expected: q, got: re.len() });
    }
    if !im.is_empty() && im.len() != q {
        return Err(QdpError::LengthMismatch { expected: q, got: im.len() });
    }
    let g: Vec<Complex<T>> = (0..q)
        .map(|i| Complex::new(T::lit(re[i]), T::lit(im.get(i).copied().unwrap_or(0.0))))
        .collect();
    let norm: f64 = re.iter().zip(im.iter().chain(std::iter::repeat(&0.0))).map(|(a, b)| a * a + b * b).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(QdpError::NotUnitNorm { norm: norm.sqrt() });
    }
    Ok(g)
}

/// `F(λ) = Σ_α q^{−λ|α|}`.
pub fn gibbs_partition(q: usize, weights: &[f64], lambda: f64) -> f64 {
    weights.iter().map(|&w| (q as f64).powf(-lambda * w)).sum()
}

/// How the Gibbs rate is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Solve `F(λ) = 1` by bisection.
    Literal,
    /// Use the given `λ` and divide by `F(λ)`.
    Gibbs(f64),
}

/// Rate `λ` for the per-symbol weights.
///
/// `Literal` fails with [`QdpError::InfeasibleNormalization`] when some weight
/// is zero: then `F(λ) > 1` for every `λ`, with limit 1 at infinity.
pub fn solve_lambda(q: usize, weights: &[f64], mode: Normalization) -> Result<f64> {
    if weights.len() != q {
        return Err(QdpError::LengthMismatch { expected: q, got: weights.len() });
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(QdpError::InvalidParameter("weights must be finite and nonnegative".into()));
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(QdpError::InvalidParameter("at least one weight must be positive".into()));
    }
    match mode {
        Normalization::Gibbs(lambda) => {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(QdpError::InvalidParameter(format!("lambda {lambda} must be positive")));
            }
            Ok(lambda)
        }
        Normalization::Literal => {
            let zeros = weights.iter().filter(|&&w| w == 0.0).count();
            if zeros > 0 {
                return Err(QdpError::InfeasibleNormalization(format!(
                    "{zeros} zero weight(s) keep F(lambda) > 1 for all lambda"
                )));
            }
            // F is strictly decreasing from q at 0 to 0 at infinity.
            let f = |l: f64| gibbs_partition(q, weights, l) - 1.0;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            while f(hi) > 0.0 {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if f(mid).abs() <= 1e-12 && hi - lo < 1e-15 {
                    break;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// Metric-induced per-symbol law `r_λ(α) = q^{−λ|α|}/F(λ)` on the Fourier side.
#[derive(Debug, Clone)]
pub struct GibbsNoise<T: Real> {
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub partition: f64,
    pub r: Vec<T>,
}

impl<T: Real> GibbsNoise<T> {
    pub fn new(field: &FieldSpec, weights: &[f64], mode: Normalization) -> Result<Self> {
        let q = field.q();
        let lambda = solve_lambda(q, weights, mode)?;
        if matches!(mode, Normalization::Gibbs(_)) && weights[0] != 0.0 {
            return Err(QdpError::InvalidParameter("a metric weight has |0| = 0".into()));
        }
        let partition = gibbs_partition(q, weights, lambda);
        let r = weights
            .iter()
            .map(|&w| T::lit((q as f64).powf(-lambda * w) / partition))
            .collect();
        Ok(Self { weights: weights.to_vec(), lambda, partition, r })
    }

    /// Hamming weight on `F_q`.
    pub fn hamming(field: &FieldSpec, lambda: f64) -> Result<Self> {
        let mut w = vec![1.0; field.q()];
        w[0] = 0.0;
        Self::new(field, &w, Normalization::Gibbs(lambda))
    }

    /// `g` with `ĝ = √r`.
    pub fn g(&self, field: &FieldSpec) -> Result<Vec<Complex<T>>> {
        let ghat: Vec<Complex<T>> = self.r.iter().map(|&x| Complex::new(x.sqrt(), T::zero())).collect();
        idft_product(field, &ghat)
    }

    /// `w(y) = Σ |y_i|`.
    pub fn weight(&self, y: &[Elem]) -> f64 {
        y.iter().map(|&a| self.weights[a as usize]).sum()
    }

    /// Largest weight `w` with `p(y) ≥ q^{−nX}`.
    ///
    /// `p(y) = q^{−λ w(y)} F^{−n}`, so `p(y) ≥ q^{−nX}` iff
    /// `λ w(y) + n log_q F ≤ nX` iff `w(y) ≤ n (X − log_q F) / λ`.
    pub fn weight_threshold(&self, q: usize, n: usize, x: f64) -> f64 {
        n as f64 * (x - self.partition.ln() / (q as f64).ln()) / self.lambda
    }
}

/// Noise description, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseSpec {
    Bernoulli {
        p: f64,
    },
    Table {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    Gibbs {
        weights: Vec<f64>,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        literal: bool,
    },
    Rank {
        a: usize,
        b: usize,
        t: usize,
    },
    Noiseless,
    Uniform,
}

/// Field descriptor carried alongside a noise spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDocument {
    #[serde(flatten)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub field: Option<FieldDescriptor>,
}

/// Weight function that a noise family decreases in.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Hamming,
    Rank { rows: usize, cols: usize },
    Additive(Vec<f64>),
}

impl WeightKind {
    pub fn eval(&self, field: &FieldSpec, y: &[Elem]) -> f64 {
        match self {
            WeightKind::Hamming => FieldSpec::hamming_weight(y) as f64,
            WeightKind::Rank { rows, cols } => {
                crate::field::rank_weight(field, y, *rows, *cols).expect("shape fixed by noise") as f64
            }
            WeightKind::Additive(w) => y.iter().map(|&a| w[a as usize]).sum(),
        }
    }
}

impl NoiseSpec {
    /// Parses JSON or `preset:<name>[:args]`.
    ///
    /// Presets: `noiseless`, `uniform`, `bernoulli:P`, `gibbs:LAMBDA`
    /// (Hamming weights), `rank:A:B:T`.
    pub fn parse(text: &str) -> Result<(Self, Option<FieldDescriptor>)> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("preset:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let num = |i: usize| -> Result<f64> {
                parts
                    .get(i)
                    .ok_or_else(|| QdpError::InvalidParameter(format!("preset {rest} missing argument")))?
                    .parse::<f64>()
                    .map_err(|_| QdpError::InvalidParameter(format!("bad number in preset {rest}")))
            };
            let int = |i: usize| -> Result<usize> {
                let v = num(i)?;
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(QdpError::InvalidParameter(format!("bad integer in preset {rest}")));
                }
                Ok(v as usize)
            };
            let spec = match parts[0] {
                "noiseless" => NoiseSpec::Noiseless,
                "uniform" => NoiseSpec::Uniform,
                "bernoulli" => NoiseSpec::Bernoulli { p: num(1)? },
                "gibbs" => NoiseSpec::Gibbs { weights: Vec::new(), lambda: Some(num(1)?), literal: false },
                "rank" => NoiseSpec::Rank { a: int(1)?, b: int(2)?, t: int(3)? },
                other => return Err(QdpError::InvalidParameter(format!("unknown preset {other}"))),
            };
            return Ok((spec, None));
        }
        let doc: NoiseDocument = serde_json::from_str(text)?;
        Ok((doc.noise, doc.field))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseSpec::Bernoulli { .. } => "bernoulli",
            NoiseSpec::Table { .. } => "table",
            NoiseSpec::Gibbs { .. } => "gibbs",
            NoiseSpec::Rank { .. } => "rank",
            NoiseSpec::Noiseless => "noiseless",
            NoiseSpec::Uniform => "uniform",
        }
    }

    /// Short parameter label for reports.
    pub fn param_label(&self) -> String {
        match self {
            NoiseSpec::Bernoulli { p } => format!("{p}"),
            NoiseSpec::Table { re, .. } => format!("{}", re.len()),
            NoiseSpec::Gibbs { lambda, literal, .. } => match (lambda, literal) {
                (_, true) => "literal".into(),
                (Some(l), false) => format!("{l}"),
                (None, false) => "1".into(),
            },
            NoiseSpec::Rank { a, b, t } => format!("{a}x{b}t{t}"),
            NoiseSpec::Noiseless | NoiseSpec::Uniform => String::new(),
        }
    }

    fn gibbs<T: Real>(&self, field: &FieldSpec) -> Result<Option<GibbsNoise<T>>> {
        let NoiseSpec::Gibbs { weights, lambda, literal } = self else {
            return Ok(None);
        };
        let w = if weights.is_empty() {
            let mut w = vec![1.0; field.q()];
            w[0] = 0.0;
            w
        } else {
            weights.clone()
        };
        let mode = if *literal {
            Normalization::Literal
        } else {
            Normalization::Gibbs(lambda.unwrap_or(1.0))
        };
        GibbsNoise::new(field, &w, mode).map(Some)
    }

    /// Per-symbol amplitude `g`, or `None` for rank noise.
    pub fn symbol_amplitudes<T: Real>(&self, field: &FieldSpec) -> Result<Option<Vec<Complex<T>>>> {
        Ok(Some(match self {
            NoiseSpec::Bernoulli { p } => bernoulli_g(field, *p)?,
            NoiseSpec::Table { re, im } => table_g(field, re, im)?,
            NoiseSpec::Gibbs { .. } => self.gibbs::<T>(field)?.expect("gibbs").g(field)?,
            NoiseSpec::Noiseless => point_mass_g(field),
            NoiseSpec::Uniform => uniform_g(field),
            NoiseSpec::Rank { .. } => return Ok(None),
        }))
    }

    pub fn rank_params(&self, field: &FieldSpec) -> Result<Option<RankNoiseParams>> {
        match self {
            NoiseSpec::Rank { a, b, t } => RankNoiseParams::new(field, *a, *b, *t).map(Some),
            _ => Ok(None),
        }
    }

    /// Length forced by the noise, if any.
    pub fn fixed_length(&self) -> Option<usize> {
        match self {
            NoiseSpec::Rank { a, b, .. } => Some(a * b),
            _ => None,
        }
    }

    /// `f` on `F_q^n`.
    pub fn amplitude<T: Real>(&self, field: &FieldSpec, n: usize) -> Result<AmplitudeFn<T>> {
        if let Some(params) = self.rank_params(field)? {
            if params.n() != n {
                return Err(QdpError::InvalidParameter(format!(
                    "rank noise needs n = a*b = {}, got {n}",
                    params.n()
                )));
            }
            return Ok(AmplitudeFn::rank(params));
        }
        let g = self.symbol_amplitudes::<T>(field)?.expect("per-symbol noise");
        AmplitudeFn::product(field, g, n)
    }

    /// Weight in which `|f̂|²` decreases.
    pub fn weight_kind(&self, field: &FieldSpec) -> Result<WeightKind> {
        Ok(match self {
            NoiseSpec::Rank { a, b, .. } => WeightKind::Rank { rows: *a, cols: *b },
            NoiseSpec::Gibbs { .. } => WeightKind::Additive(self.gibbs::<f64>(field)?.expect("gibbs").weights),
            _ => WeightKind::Hamming,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let g = bernoulli_g::<f64>(&f2, 0.1).unwrap();
        assert!((g[0].re - 0.948_683_298_050_513_8).abs() < 1e-15);
        assert!((g[1].re - 0.316_227_766_016_837_94).abs() < 1e-15);
        let g0 = bernoulli_g::<f64>(&f2, 0.0).unwrap();
        assert_eq!((g0[0].re, g0[1].re), (1.0, 0.0));
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g3 = bernoulli_g::<f64>(&f3, 0.3).unwrap();
        assert!((g3[2].re - 0.15f64.sqrt()).abs() < 1e-15);
        assert!(bernoulli_g::<f64>(&f2, 1.0).is_err());
        assert!(bernoulli_g::<f64>(&f2, -0.1).is_err());
    }

    #[test]
    fn gibbs_hamming_binary() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let g = GibbsNoise::<f64>::hamming(&f2, 1.0).unwrap();
        assert!((g.partition - 1.5).abs() < 1e-15);
        assert!((g.r[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((g.r[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn literal_mode() {
        assert!(matches!(
            solve_lambda(2, &[0.0, 1.0], Normalization::Literal),
            Err(QdpError::InfeasibleNormalization(_))
        ));
        let lambda = solve_lambda(2, &[1.0, 2.0], Normalization::Literal).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((lambda - golden.log2()).abs() < 1e-12);
        assert!((gibbs_partition(2, &[1.0, 2.0], lambda) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weight_threshold_equivalence() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let g = GibbsNoise::<f64>::new(&f3, &[0.0, 1.0, 2.0], Normalization::Gibbs(0.7)).unwrap();
        let n = 4;
        for x in [0.5, 0.9, 1.3] {
            let w_max = g.weight_threshold(3, n, x);
            for idx in 0..81 {
                let y = f3.vector_at(idx, n);
                let p: f64 = y.iter().map(|&a| g.r[a as usize]).product();
                let lhs = p >= 3f64.powf(-(n as f64) * x);
                assert_eq!(lhs, g.weight(&y) <= w_max + 1e-12);
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let (s, f) = NoiseSpec::parse(r#"{"kind":"bernoulli","p":0.1}"#).unwrap();
        assert_eq!(s, NoiseSpec::Bernoulli { p: 0.1 });
        assert!(f.is_none());
        let (s, f) = NoiseSpec::parse(r#"{"kind":"rank","a":3,"b":3,"t":1,"field":{"p":2,"s":1}}"#).unwrap();
        assert_eq!(s, NoiseSpec::Rank { a: 3, b: 3, t: 1 });
        assert_eq!(f, Some(FieldDescriptor { p: 2, s: 1 }));
        let (s, _) = NoiseSpec::parse(r#"{"kind":"table","re":[0.6,0.8],"im":[0,0]}"#).unwrap();
        assert!(matches!(s, NoiseSpec::Table { .. }));
        let (s, _) = NoiseSpec::parse(r#"{"kind":"gibbs","weights":[0,1],"lambda":1.0}"#).unwrap();
        assert!(matches!(s, NoiseSpec::Gibbs { lambda: Some(_), .. }));
        assert_eq!(NoiseSpec::parse("preset:bernoulli:0.2").unwrap().0, NoiseSpec::Bernoulli { p: 0.2 });
        assert_eq!(NoiseSpec::parse("preset:rank:2:2:1").unwrap().0, NoiseSpec::Rank { a: 2, b: 2, t: 1 });
        assert!(NoiseSpec::parse("preset:nope").is_err());
        assert!(NoiseSpec::parse("{").is_err());
    }
}

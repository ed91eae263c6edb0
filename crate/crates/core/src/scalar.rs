//! Floating-point scalar abstraction.
//!
//! Every numeric routine in the crate is generic over [`Real`], so the same
//! code runs in `f64` (the default, and the precision every tolerance in the
//! test suites is pinned to) or in `f32` for cheap exploratory sweeps.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// f32 or f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Lossy conversion from a count.
    #[inline]
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `exp(2πi·k/p)`.
#[inline]
pub fn root_of_unity<T: Real>(k: u32, p: u32) -> Complex<T> {
    let angle = T::TAU() * T::lit(k as f64) / T::lit(p as f64);
    Complex::new(angle.cos(), angle.sin())
}

/// Squared L2 norm of an amplitude vector.
pub fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨a|b⟩` (conjugate-linear in the first argument).
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

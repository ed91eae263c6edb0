//! Exact classical simulation of the Quantum Decoding Problem.
//!
//! Finite-field arithmetic, random linear codes and their duals, the Fourier
//! transform over `F_q^n`, product and rank-metric noise, typical sets, the
//! Pretty Good Measurement in closed form and by dense oracle, and the
//! statistics of the PGM-based dual-codeword sampler.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod analysis;
pub mod caps;
pub mod code;
pub mod error;
pub mod field;
pub mod linalg;
pub mod noise;
pub mod pgm;
pub mod rank;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod seed;
pub mod spectral;
pub mod verify;

pub use caps::Caps;
pub use code::{LinearCode, RepresentativeRule};
pub use error::{QdpError, Result};
pub use field::{Elem, FieldSpec, FqVector};
pub use noise::NoiseSpec;
pub use rank::RankNoiseParams;
pub use report::CheckRecord;
pub use scalar::Real;

pub type Amplitude = spectral::AmplitudeFn<f64>;
pub type State = spectral::DenseState<f64>;
pub type Report = pgm::PgmReport<f64>;
pub type DualSampler = sampler::DualSamplerModel<f64>;

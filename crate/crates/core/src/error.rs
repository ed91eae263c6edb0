use thiserror::Error;

#[derive(Debug, Error)]
pub enum QdpError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus for F_{{{p}^{s}}} is reducible")]
    ReducibleModulus { p: u32, s: u32 },
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("element {value} outside F_{q}")]
    InvalidElement { value: u32, q: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{what} of size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("generator matrix has rank {rank} < k = {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("syndrome {index} out of range 0..{count}")]
    SyndromeOutOfRange { index: usize, count: usize },
    #[error("code has no nonzero codeword")]
    TrivialCode,
    #[error("amplitude function has L2 norm {norm}, expected 1")]
    NotUnitNorm { norm: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("normalization F(lambda) = 1 has no solution: {0}")]
    InfeasibleNormalization(String),
    #[error("Fourier transform vanishes on every nonzero dual codeword")]
    ZeroDualMass,
    #[error("typical set carries no probability mass")]
    EmptyTypicalMass,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = QdpError> = std::result::Result<T, E>;

//! Desk-scale size caps.

use crate::error::{QdpError, Result};

pub const ENV_CAP_DENSE: &str = "QDP_LAB_CAP_DENSE";
pub const ENV_CAP_PRODUCT: &str = "QDP_LAB_CAP_PRODUCT";

/// Upper bounds on the ambient space size `q^n` for each computation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Dense amplitude vectors and Kronecker transforms.
    pub product: u128,
    /// Matrix work that is cubic in `q^n` (PGM oracle, pipeline oracle).
    pub dense: u128,
    /// Code construction and coset enumeration.
    pub code: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            product: 1 << 22,
            dense: 1 << 12,
            code: 1 << 24,
        }
    }
}

impl Caps {
    /// Defaults overridden by `QDP_LAB_CAP_DENSE` / `QDP_LAB_CAP_PRODUCT`.
    pub fn from_env() -> Result<Self> {
        let mut caps = Self::default();
        if let Some(v) = read_env(ENV_CAP_DENSE)? {
            caps.dense = v;
        }
        if let Some(v) = read_env(ENV_CAP_PRODUCT)? {
            caps.product = v;
        }
        Ok(caps)
    }

    pub fn check(what: &'static str, size: u128, cap: u128) -> Result<()> {
        if size > cap {
            Err(QdpError::CapExceeded { what, size, cap })
        } else {
            Ok(())
        }
    }
}

fn read_env(name: &str) -> Result<Option<u128>> {
    match std::env::var(name) {
        Ok(s) => s
            .trim()
            .parse::<u128>()
            .map(Some)
            .map_err(|_| QdpError::InvalidParameter(format!("{name}={s} is not an integer"))),
        Err(_) => Ok(None),
    }
}

/// `q^n` without overflow (saturating at `u128::MAX`).
pub fn space_size(q: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}

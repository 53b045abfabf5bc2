//! Dodis–Yampolskiy PRF: `RegID = g1^{1/(K + x)}`.
//!
//! The exponent-inverse form keeps `RegID^{K + x} = g1` linear in `K`, so the
//! account proof can show a RegID was derived from the certified key.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::crypto::{Scalar, G1};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrfError {
    #[error("K + x is zero modulo the group order")]
    DegenerateKey,
    #[error("PRF key must be non-zero")]
    ZeroKey,
    #[error("account index {x} outside 1..={max}")]
    IndexOutOfRange { x: u64, max: u64 },
}

pub const DEFAULT_KEY_BITS: u32 = 128;

#[derive(Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrfKey(Scalar);

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PrfKey(..)")
    }
}

impl PrfKey {
    pub fn new(k: Scalar) -> Result<Self, PrfError> {
        if k.is_zero() {
            return Err(PrfError::ZeroKey);
        }
        Ok(PrfKey(k))
    }

    /// Uniform non-zero key of at most `bits` bits.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R, bits: u32) -> Self {
        loop {
            let k = Scalar::random_bits(rng, bits);
            if !k.is_zero() {
                return PrfKey(k);
            }
        }
    }

    pub fn scalar(&self) -> Scalar {
        self.0
    }
}

/// Position of an account among those opened from one certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountIndex(u64);

impl AccountIndex {
    pub fn new(x: u64, max_acc: u64) -> Result<Self, PrfError> {
        if x == 0 || x > max_acc {
            return Err(PrfError::IndexOutOfRange { x, max: max_acc });
        }
        Ok(AccountIndex(x))
    }

    /// Index without a bound check; the account proof checks the bound publicly.
    pub fn unchecked(x: u64) -> Self {
        AccountIndex(x)
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegId(pub G1);

impl RegId {
    pub fn point(&self) -> G1 {
        self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0.to_bytes())
    }
}

impl PartialOrd for RegId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RegId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.to_bytes().cmp(&other.0.to_bytes())
    }
}

pub fn prf_eval(key: &PrfKey, x: AccountIndex) -> Result<RegId, PrfError> {
    let exponent = key.0 + Scalar::from_u64(x.0);
    let inv = exponent.invert().map_err(|_| PrfError::DegenerateKey)?;
    Ok(RegId(G1::generator() * inv))
}

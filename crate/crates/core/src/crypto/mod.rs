//! Group, pairing, commitment, and Fiat–Shamir foundation.

mod group;
mod pedersen;
pub mod schnorr;
pub mod sigma;
mod transcript;

pub use group::{
    hash_to_g1, hash_to_scalar, multi_pairing, pairing, Gt, Scalar, G1, G1_BYTES, G2, G2_BYTES,
    GT_BYTES, SCALAR_BYTES,
};
pub use pedersen::{pedersen_commit, CommitmentKey, PedersenCommitment};
pub use schnorr::{SchnorrSignature, SigningKey};
pub use transcript::Transcript;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("decode error: {0}")]
    Decode(&'static str),
}

/// Convenience for `transcript_challenge(t, label)`.
pub fn transcript_challenge(t: &mut Transcript, label: &[u8]) -> Scalar {
    t.challenge_scalar(label)
}

//! Schnorr signatures over G1, used to authenticate board transactions.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::group::{Scalar, G1};
use super::transcript::Transcript;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigningKey {
    pub secret: Scalar,
    pub public: G1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchnorrSignature {
    pub nonce_commitment: G1,
    pub response: Scalar,
}

fn challenge(public: &G1, nonce_commitment: &G1, message: &[u8]) -> Scalar {
    let mut t = Transcript::new(b"idchain-tx-sig");
    t.append_g1(b"pk", public);
    t.append_g1(b"R", nonce_commitment);
    t.append_message(b"msg", message);
    t.challenge_scalar(b"c")
}

impl SigningKey {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Self::from_secret(Scalar::random_nonzero(rng))
    }

    pub fn from_secret(secret: Scalar) -> Self {
        SigningKey {
            secret,
            public: G1::generator() * secret,
        }
    }

    pub fn sign<R: RngCore + CryptoRng>(&self, message: &[u8], rng: &mut R) -> SchnorrSignature {
        let nonce = Scalar::random_nonzero(rng);
        let nonce_commitment = G1::generator() * nonce;
        let c = challenge(&self.public, &nonce_commitment, message);
        SchnorrSignature {
            nonce_commitment,
            response: nonce + c * self.secret,
        }
    }
}

impl SchnorrSignature {
    pub fn verify(&self, public: &G1, message: &[u8]) -> bool {
        if public.is_identity() {
            return false;
        }
        let c = challenge(public, &self.nonce_commitment, message);
        G1::generator() * self.response == self.nonce_commitment + *public * c
    }
}

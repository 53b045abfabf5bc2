//! Zero-knowledge proofs for account creation and registration.
//!
//! [`account`] proves the five-clause account relation under one challenge:
//! a valid certificate signature, policy satisfaction, RegID derivation at
//! the public index, EID encrypting IDcredPUB, and a valid account key pair.
//! The public `x ≤ Max_ACC` gate is checked alongside.
//!
//! [`registration`] proves at issuance time that ERegID chunk-encrypts the
//! same K the user committed to in the blind signing request.

pub mod account;
mod encoding;
pub mod registration;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crypto::{Scalar, Transcript};

pub use account::{
    check_account_proof, prove_account, verify_account, AccountProof, AccountStatement,
    AccountWitness,
};
pub use encoding::DecodeError;
pub use registration::{
    prove_registration, prove_registration_unchecked, verify_registration, RegistrationProof,
    RegistrationStatement, RegistrationWitness,
};

macro_rules! bytes_hex_serde {
    ($name:ident) => {
        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&hex::encode(self.to_bytes()))
            }
        }

        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
                $name::from_bytes(&bytes).map_err(serde::de::Error::custom)
            }
        }
    };
}

bytes_hex_serde!(AccountProof);
bytes_hex_serde!(RegistrationProof);

/// The six outputs of the account relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Clause {
    Signature = 1,
    Policy = 2,
    Prf = 3,
    Encryption = 4,
    KeyPair = 5,
    AccountBound = 6,
}

impl Clause {
    pub fn number(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Clause::Signature => "certificate signature",
            Clause::Policy => "policy",
            Clause::Prf => "RegID derivation",
            Clause::Encryption => "EID encryption",
            Clause::KeyPair => "account key pair",
            Clause::AccountBound => "x <= Max_ACC",
        };
        write!(f, "clause {} ({name})", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("witness violates {0}")]
    WitnessInconsistent(Clause),
    #[error("registration witness inconsistent: {0}")]
    RegistrationWitnessInconsistent(&'static str),
    #[error(transparent)]
    Blind(#[from] crate::blind::BlindSigError),
}

/// Why a proof was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyFailure {
    Clause(Clause),
    Challenge,
    Malformed,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::Clause(c) => write!(f, "{c} failed"),
            VerifyFailure::Challenge => f.write_str("challenge mismatch"),
            VerifyFailure::Malformed => f.write_str("malformed proof"),
        }
    }
}

/// Equality constraints on certified attributes, keyed by attribute index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub reveals: BTreeMap<usize, Scalar>,
    pub label: String,
}

impl Policy {
    pub fn new(label: impl Into<String>) -> Self {
        Policy {
            reveals: BTreeMap::new(),
            label: label.into(),
        }
    }

    pub fn require(mut self, index: usize, value: Scalar) -> Self {
        self.reveals.insert(index, value);
        self
    }

    pub fn fits(&self, attribute_count: usize) -> bool {
        self.reveals.keys().all(|i| *i < attribute_count)
    }

    pub fn satisfied(&self, attributes: &[Scalar]) -> bool {
        self.reveals
            .iter()
            .all(|(i, v)| attributes.get(*i) == Some(v))
    }

    pub fn absorb(&self, t: &mut Transcript) {
        t.append_message(b"policy-label", self.label.as_bytes());
        t.append_u64(b"policy-len", self.reveals.len() as u64);
        for (i, v) in &self.reveals {
            t.append_u64(b"policy-index", *i as u64);
            t.append_scalar(b"policy-value", v);
        }
    }
}

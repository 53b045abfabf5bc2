//! Identity layer core: anonymous credentials, unlinkable accounts with
//! zero-knowledge validity proofs, threshold de-anonymization, and the
//! governance boards that hold it all together.

pub mod crypto;

pub use crypto::{Gt, Scalar, G1, G2};
pub mod blind;
pub mod boards;
pub mod identity;
pub mod prf;
pub mod relation;
pub mod threshold;

use std::fmt;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::{ProtocolError, UserCert, CERT_VALIDITY};
use crate::blind::IssuerPublicKey;
use crate::crypto::{Scalar, G1};
use crate::prf::{prf_eval, AccountIndex, RegId};
use crate::relation::{
    check_account_proof, prove_account, AccountProof, AccountStatement, AccountWitness, Policy,
    VerifyFailure,
};
use crate::threshold::{encrypt_element, CommitteeKeySet};

/// Account setup data as posted to the users board.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Asd {
    pub statement: AccountStatement,
    pub proof: AccountProof,
    pub created_at: u64,
    pub expires_at: u64,
}

impl Asd {
    pub fn reg_id(&self) -> RegId {
        self.statement.reg_id
    }
}

/// Read access to the boards needed to judge an ASD.
pub trait BoardContext {
    fn today(&self) -> u64;
    fn ca_is_active(&self, ca_pk: &IssuerPublicKey) -> bool;
    fn committee(&self, epoch: u64) -> Option<&CommitteeKeySet>;
    fn regid_registered(&self, reg_id: &RegId) -> bool;
    fn max_acc(&self) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsdRejection {
    Expired,
    ExpiryTooFar,
    CaInactive,
    UnknownCommittee(u64),
    CommitteeMismatch,
    MaxAccMismatch,
    DuplicateRegId,
    Proof(VerifyFailure),
}

impl fmt::Display for AsdRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsdRejection::Expired => f.write_str("certificate validity has passed"),
            AsdRejection::ExpiryTooFar => f.write_str("expiry beyond one validity period"),
            AsdRejection::CaInactive => f.write_str("issuing CA is not active"),
            AsdRejection::UnknownCommittee(e) => write!(f, "unknown committee epoch {e}"),
            AsdRejection::CommitteeMismatch => f.write_str("committee key differs from epoch key"),
            AsdRejection::MaxAccMismatch => f.write_str("Max_ACC differs from board parameter"),
            AsdRejection::DuplicateRegId => f.write_str("RegID already on the board"),
            AsdRejection::Proof(v) => write!(f, "proof rejected: {v}"),
        }
    }
}

/// Opens the next account under `cert`.
pub fn create_account<R: RngCore + CryptoRng>(
    cert: &mut UserCert,
    policy: &Policy,
    committee: &CommitteeKeySet,
    max_acc: u64,
    day: u64,
    rng: &mut R,
) -> Result<(Asd, Scalar), ProtocolError> {
    let expires_at = cert.issued_at + CERT_VALIDITY;
    if day >= expires_at {
        return Err(ProtocolError::CertExpired);
    }
    let x = cert.next_account_index;
    if x > max_acc {
        return Err(ProtocolError::MaxAccountsReached);
    }
    if !policy.fits(cert.attributes.values.len()) || !policy.satisfied(&cert.attributes.values) {
        return Err(ProtocolError::PolicyUnsatisfied);
    }
    let index = AccountIndex::new(x, max_acc).map_err(|_| ProtocolError::MaxAccountsReached)?;
    let reg_id = prf_eval(&cert.prf_key, index).map_err(|_| ProtocolError::InvalidCertificate)?;
    let rho = Scalar::random_nonzero(rng);
    let eid = encrypt_element(&committee.pk, &cert.id_cred_pub, &rho)?;
    let sk = Scalar::random_nonzero(rng);
    let statement = AccountStatement {
        ca_pk: cert.ca_pk.clone(),
        committee_epoch: committee.epoch,
        committee_pk: committee.pk,
        reg_id,
        x,
        eid,
        pk_acc: G1::generator() * sk,
        policy: policy.clone(),
        max_acc,
    };
    let witness = AccountWitness {
        id_cred_sec: cert.id_cred_sec,
        prf_key: cert.prf_key,
        attributes: cert.attributes.values.clone(),
        signature: cert.signature,
        eid_randomness: rho,
        account_secret: sk,
    };
    let proof = prove_account(&statement, &witness, rng)?;
    cert.next_account_index += 1;
    Ok((
        Asd {
            statement,
            proof,
            created_at: day,
            expires_at,
        },
        sk,
    ))
}

fn evaluate(asd: &Asd, ctx: &dyn BoardContext, admission: bool) -> Result<(), AsdRejection> {
    let st = &asd.statement;
    let today = ctx.today();
    if today >= asd.expires_at {
        return Err(AsdRejection::Expired);
    }
    if admission && asd.expires_at > today + CERT_VALIDITY {
        return Err(AsdRejection::ExpiryTooFar);
    }
    if !ctx.ca_is_active(&st.ca_pk) {
        return Err(AsdRejection::CaInactive);
    }
    let committee = ctx
        .committee(st.committee_epoch)
        .ok_or(AsdRejection::UnknownCommittee(st.committee_epoch))?;
    if committee.pk != st.committee_pk {
        return Err(AsdRejection::CommitteeMismatch);
    }
    if st.max_acc != ctx.max_acc() {
        return Err(AsdRejection::MaxAccMismatch);
    }
    if admission && ctx.regid_registered(&st.reg_id) {
        return Err(AsdRejection::DuplicateRegId);
    }
    check_account_proof(st, &asd.proof).map_err(AsdRejection::Proof)
}

/// Admission check for a new ASD.
pub fn verify_asd(asd: &Asd, ctx: &dyn BoardContext) -> Result<(), AsdRejection> {
    evaluate(asd, ctx, true)
}

/// Status check for an ASD already on the board: the same conditions minus
/// RegID uniqueness and the admission-time expiry bound.
pub fn check_account(asd: &Asd, ctx: &dyn BoardContext) -> Result<(), AsdRejection> {
    evaluate(asd, ctx, false)
}

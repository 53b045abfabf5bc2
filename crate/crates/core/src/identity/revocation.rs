use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::{Asd, CaRecord, ProtocolError, UserDocs};
use crate::blind::IssuerPublicKey;
use crate::crypto::{Scalar, G1};
use crate::prf::{prf_eval, AccountIndex, PrfKey, RegId};
use crate::threshold::{
    chunk_shares, combine_shares, decrypt_chunked, partial_decrypt, CommitteeKeySet,
    DecryptionShare, KeyShare, ThresholdError,
};

/// Users-board lookups used during revocation.
pub trait AsdIndex {
    fn asd(&self, reg_id: &RegId) -> Option<&Asd>;
    fn committee(&self, epoch: u64) -> Option<&CommitteeKeySet>;
}

/// CA-side record lookup keyed by issuer and IDcredPUB.
pub trait CaDirectory {
    fn ca_record(&self, ca_pk: &IssuerPublicKey, id_cred_pub: &G1) -> Option<&CaRecord>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevokedAccount {
    pub x: u64,
    pub reg_id: RegId,
    pub pk_acc: G1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevocationResult {
    pub id_cred_pub: G1,
    pub user_docs: UserDocs,
    pub prf_key: Scalar,
    pub accounts: Vec<RevokedAccount>,
}

fn not_enough(e: ThresholdError) -> ProtocolError {
    match e {
        ThresholdError::NotEnoughShares { need, got } => {
            ProtocolError::NotEnoughShares { need, got }
        }
        other => ProtocolError::Threshold(other),
    }
}

/// Combines EID decryption shares into IDcredPUB.
pub fn decrypt_eid(
    asd: &Asd,
    shares: &[DecryptionShare],
    keyset: &CommitteeKeySet,
) -> Result<G1, ProtocolError> {
    combine_shares(&asd.statement.eid, shares, keyset).map_err(not_enough)
}

/// Decrypts the record's ERegID; `shares[j]` are the shares for chunk `j`.
pub fn recover_prf_key(
    record: &CaRecord,
    shares: &[Vec<DecryptionShare>],
    keyset: &CommitteeKeySet,
) -> Result<PrfKey, ProtocolError> {
    let k = decrypt_chunked(&record.ereg_id, shares, keyset).map_err(not_enough)?;
    PrfKey::new(k).map_err(|_| ProtocolError::Threshold(ThresholdError::LayoutMismatch))
}

/// Every `x ≤ max_acc` whose RegID under `k` is on the board.
pub fn collect_accounts(k: &PrfKey, max_acc: u64, users: &dyn AsdIndex) -> Vec<RevokedAccount> {
    (1..=max_acc)
        .filter_map(|x| {
            let reg_id = prf_eval(k, AccountIndex::unchecked(x)).ok()?;
            let asd = users.asd(&reg_id)?;
            Some(RevokedAccount {
                x,
                reg_id,
                pk_acc: asd.statement.pk_acc,
            })
        })
        .collect()
}

/// Full revocation run by the cooperating holders. Holders must belong to
/// the committees of both the ASD's EID epoch and the record's ERegID epoch;
/// shares whose epoch does not match are not produced.
pub fn revoke_anonymity<R: RngCore + CryptoRng>(
    reg_id: &RegId,
    holders: &[(u64, KeyShare)],
    directory: &dyn CaDirectory,
    users: &dyn AsdIndex,
    rng: &mut R,
) -> Result<RevocationResult, ProtocolError> {
    let asd = users.asd(reg_id).ok_or(ProtocolError::UnknownRegId)?;
    let eid_epoch = asd.statement.committee_epoch;
    let eid_keyset = users
        .committee(eid_epoch)
        .ok_or(ProtocolError::UnknownCommittee(eid_epoch))?;
    let eid_holders: Vec<&KeyShare> = holders
        .iter()
        .filter(|(e, _)| *e == eid_epoch)
        .map(|(_, s)| s)
        .collect();
    let eid_shares: Vec<DecryptionShare> = eid_holders
        .iter()
        .map(|s| partial_decrypt(s, &asd.statement.eid, rng))
        .collect();
    let id_cred_pub = decrypt_eid(asd, &eid_shares, eid_keyset)?;

    let record = directory
        .ca_record(&asd.statement.ca_pk, &id_cred_pub)
        .ok_or(ProtocolError::CaRecordMissing)?;
    let reg_epoch = record.committee_epoch;
    let reg_keyset = users
        .committee(reg_epoch)
        .ok_or(ProtocolError::UnknownCommittee(reg_epoch))?;
    let reg_holders: Vec<KeyShare> = holders
        .iter()
        .filter(|(e, _)| *e == reg_epoch)
        .map(|(_, s)| s.clone())
        .collect();
    let shares = chunk_shares(&reg_holders, &record.ereg_id, rng);
    let k = recover_prf_key(record, &shares, reg_keyset)?;

    Ok(RevocationResult {
        id_cred_pub,
        user_docs: record.user_docs.clone(),
        prf_key: k.scalar(),
        accounts: collect_accounts(&k, asd.statement.max_acc, users),
    })
}

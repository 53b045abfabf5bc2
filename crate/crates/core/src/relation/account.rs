//! The account relation.
//!
//! Witness variables shared by the linear clauses: `sec`, `K`, `ρ`, `sk`.
//! The blindings for `sec` and `K` are handed to the signature proof, so its
//! responses for message indices 0 and 1 are reused here verbatim; a prover
//! who uses different values in different clauses cannot answer both.
//!
//! Linear clauses:
//! - PRF: `g − x·RegID = RegID·K`
//! - EID: `c1 = g·ρ`, `c2 = pk_SC·ρ + g·sec`
//! - key pair: `pk_ACC = g·sk`

use std::collections::{BTreeMap, BTreeSet};

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::encoding::{self, indexed, DecodeError, Reader};
use super::{Clause, Policy, RelationError, VerifyFailure};
use crate::blind::{
    self, IssuerPublicKey, PokProver, Signature, SignaturePoK, MSG_FIRST_ATTRIBUTE,
    MSG_ID_CRED_SEC, MSG_PRF_KEY,
};
use crate::crypto::sigma::{absorb_equations, LinearEquation};
use crate::crypto::{CommitmentKey, Scalar, Transcript, G1};
use crate::prf::{prf_eval, AccountIndex, PrfKey, RegId};
use crate::threshold::{encrypt_element, ElGamalCiphertext};

const VAR_SEC: usize = 0;
const VAR_K: usize = 1;
const VAR_RHO: usize = 2;
const VAR_SK: usize = 3;
const VAR_COUNT: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountStatement {
    pub ca_pk: IssuerPublicKey,
    pub committee_epoch: u64,
    pub committee_pk: G1,
    pub reg_id: RegId,
    pub x: u64,
    pub eid: ElGamalCiphertext,
    pub pk_acc: G1,
    pub policy: Policy,
    pub max_acc: u64,
}

impl AccountStatement {
    pub fn absorb(&self, t: &mut Transcript) {
        self.ca_pk.absorb(t);
        t.append_u64(b"committee-epoch", self.committee_epoch);
        t.append_g1(b"committee-pk", &self.committee_pk);
        t.append_g1(b"regid", &self.reg_id.0);
        t.append_u64(b"x", self.x);
        t.append_g1(b"eid-c1", &self.eid.c1);
        t.append_g1(b"eid-c2", &self.eid.c2);
        t.append_g1(b"pk-acc", &self.pk_acc);
        self.policy.absorb(t);
        t.append_u64(b"max-acc", self.max_acc);
    }

    /// Policy constraints as disclosed message values.
    fn disclosed(&self) -> BTreeMap<usize, Scalar> {
        self.policy
            .reveals
            .iter()
            .map(|(i, v)| (MSG_FIRST_ATTRIBUTE + i, *v))
            .collect()
    }

    fn equations(&self) -> [(Clause, LinearEquation); 4] {
        let g = G1::generator();
        let r = self.reg_id.0;
        [
            (
                Clause::Prf,
                LinearEquation::new(g - r * Scalar::from_u64(self.x), vec![(VAR_K, r)]),
            ),
            (
                Clause::Encryption,
                LinearEquation::new(self.eid.c1, vec![(VAR_RHO, g)]),
            ),
            (
                Clause::Encryption,
                LinearEquation::new(
                    self.eid.c2,
                    vec![(VAR_RHO, self.committee_pk), (VAR_SEC, g)],
                ),
            ),
            (
                Clause::KeyPair,
                LinearEquation::new(self.pk_acc, vec![(VAR_SK, g)]),
            ),
        ]
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct AccountWitness {
    pub id_cred_sec: Scalar,
    pub prf_key: PrfKey,
    pub attributes: Vec<Scalar>,
    pub signature: Signature,
    pub eid_randomness: Scalar,
    pub account_secret: Scalar,
}

impl std::fmt::Debug for AccountWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AccountWitness(..)")
    }
}

impl AccountWitness {
    fn messages(&self) -> Vec<Scalar> {
        let mut m = vec![self.id_cred_sec, self.prf_key.scalar()];
        m.extend_from_slice(&self.attributes);
        m
    }
}

/// Serializes as hex of [`AccountProof::to_bytes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccountProof {
    pub signature_pok: SignaturePoK,
    /// One commitment per linear equation, in clause order.
    pub commitments: Vec<G1>,
    pub response_rho: Scalar,
    pub response_sk: Scalar,
    pub challenge: Scalar,
}

fn challenge_for(statement: &AccountStatement, pok: &SignaturePoK, commitments: &[G1]) -> Scalar {
    let mut t = Transcript::new(b"account-proof");
    statement.absorb(&mut t);
    pok.absorb(&mut t);
    let eqs: Vec<LinearEquation> = statement.equations().into_iter().map(|(_, e)| e).collect();
    absorb_equations(&mut t, &eqs, commitments);
    t.challenge_scalar(b"account-challenge")
}

fn first_violation(statement: &AccountStatement, witness: &AccountWitness) -> Option<Clause> {
    if !blind::verify(&statement.ca_pk, &witness.messages(), &witness.signature) {
        return Some(Clause::Signature);
    }
    if !statement.policy.fits(witness.attributes.len())
        || !statement.policy.satisfied(&witness.attributes)
    {
        return Some(Clause::Policy);
    }
    match prf_eval(&witness.prf_key, AccountIndex::unchecked(statement.x)) {
        Ok(r) if r == statement.reg_id => {}
        _ => return Some(Clause::Prf),
    }
    let id_cred_pub = G1::generator() * witness.id_cred_sec;
    match encrypt_element(
        &statement.committee_pk,
        &id_cred_pub,
        &witness.eid_randomness,
    ) {
        Ok(ct) if ct == statement.eid => {}
        _ => return Some(Clause::Encryption),
    }
    if G1::generator() * witness.account_secret != statement.pk_acc {
        return Some(Clause::KeyPair);
    }
    None
}

/// Proves the account relation. The `x ≤ Max_ACC` gate is public and left
/// to the verifier.
pub fn prove_account<R: RngCore + CryptoRng>(
    statement: &AccountStatement,
    witness: &AccountWitness,
    rng: &mut R,
) -> Result<AccountProof, RelationError> {
    if let Some(clause) = first_violation(statement, witness) {
        return Err(RelationError::WitnessInconsistent(clause));
    }
    let ck = CommitmentKey::default();
    let mut blindings = vec![Scalar::ZERO; VAR_COUNT];
    for b in blindings.iter_mut() {
        *b = Scalar::random(rng);
    }
    let shared: BTreeMap<usize, Scalar> = [
        (MSG_ID_CRED_SEC, blindings[VAR_SEC]),
        (MSG_PRF_KEY, blindings[VAR_K]),
    ]
    .into();
    let disclosed_idx: BTreeSet<usize> = statement.disclosed().into_keys().collect();
    let linked: BTreeSet<usize> = [MSG_ID_CRED_SEC, MSG_PRF_KEY].into();
    let prover = PokProver::commit(
        &statement.ca_pk,
        &ck,
        &witness.signature,
        &witness.messages(),
        &disclosed_idx,
        &linked,
        &shared,
        rng,
    )?;

    let commitments: Vec<G1> = statement
        .equations()
        .iter()
        .map(|(_, e)| e.commit(&blindings))
        .collect();
    let mut t = Transcript::new(b"account-proof");
    statement.absorb(&mut t);
    prover.absorb(&mut t);
    let eqs: Vec<LinearEquation> = statement.equations().into_iter().map(|(_, e)| e).collect();
    absorb_equations(&mut t, &eqs, &commitments);
    let c = t.challenge_scalar(b"account-challenge");

    Ok(AccountProof {
        signature_pok: prover.respond(&c),
        commitments,
        response_rho: blindings[VAR_RHO] + c * witness.eid_randomness,
        response_sk: blindings[VAR_SK] + c * witness.account_secret,
        challenge: c,
    })
}

/// Verifies with a diagnostic. Clauses are checked in order, then the
/// recomputed challenge.
pub fn check_account_proof(
    statement: &AccountStatement,
    proof: &AccountProof,
) -> Result<(), VerifyFailure> {
    if statement.x == 0 || statement.x > statement.max_acc {
        return Err(VerifyFailure::Clause(Clause::AccountBound));
    }
    if !statement.policy.fits(statement.ca_pk.attribute_count()) {
        return Err(VerifyFailure::Clause(Clause::Policy));
    }
    let pok = &proof.signature_pok;
    let linked: BTreeSet<usize> = pok.link_commitments.keys().copied().collect();
    if linked != BTreeSet::from([MSG_ID_CRED_SEC, MSG_PRF_KEY]) || proof.commitments.len() != 4 {
        return Err(VerifyFailure::Malformed);
    }
    let disclosed = statement.disclosed();
    let ck = CommitmentKey::default();
    if !pok.check(&statement.ca_pk, &ck, &disclosed, &proof.challenge) {
        return Err(VerifyFailure::Clause(Clause::Signature));
    }
    let (Some(s_sec), Some(s_k)) = (
        pok.hidden_responses.get(&MSG_ID_CRED_SEC),
        pok.hidden_responses.get(&MSG_PRF_KEY),
    ) else {
        return Err(VerifyFailure::Malformed);
    };
    let responses = [*s_sec, *s_k, proof.response_rho, proof.response_sk];
    for ((clause, eq), t) in statement.equations().iter().zip(&proof.commitments) {
        if !eq.check(t, &responses, &proof.challenge) {
            return Err(VerifyFailure::Clause(*clause));
        }
    }
    if challenge_for(statement, pok, &proof.commitments) != proof.challenge {
        return Err(VerifyFailure::Challenge);
    }
    Ok(())
}

pub fn verify_account(statement: &AccountStatement, proof: &AccountProof) -> bool {
    check_account_proof(statement, proof).is_ok()
}

impl AccountProof {
    /// Canonical segment list in fixed order. The first segment holds the
    /// number of hidden-message responses.
    pub fn segments(&self) -> Vec<Vec<u8>> {
        let pok = &self.signature_pok;
        let mut s = vec![
            (pok.hidden_responses.len() as u32).to_be_bytes().to_vec(),
            pok.sigma1.to_bytes().to_vec(),
            pok.sigma2.to_bytes().to_vec(),
            pok.pairing_commitment.to_bytes(),
        ];
        for j in [MSG_ID_CRED_SEC, MSG_PRF_KEY] {
            let com = pok.link_commitments.get(&j).copied().unwrap_or_default();
            let nonce = pok
                .link_nonce_commitments
                .get(&j)
                .copied()
                .unwrap_or_default();
            let resp = pok.link_responses.get(&j).copied().unwrap_or_default();
            s.push(com.to_bytes().to_vec());
            s.push(nonce.to_bytes().to_vec());
            s.push(resp.to_bytes().to_vec());
        }
        s.push(pok.response_blinding.to_bytes().to_vec());
        for (j, v) in &pok.hidden_responses {
            s.push(indexed(*j, &v.to_bytes()));
        }
        for c in &self.commitments {
            s.push(c.to_bytes().to_vec());
        }
        s.push(self.response_rho.to_bytes().to_vec());
        s.push(self.response_sk.to_bytes().to_vec());
        s.push(self.challenge.to_bytes().to_vec());
        s
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encoding::join(&self.segments())
    }

    pub fn from_segments(segments: &[Vec<u8>]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(segments);
        let hidden_count = r.u32()? as usize;
        let sigma1 = r.g1()?;
        let sigma2 = r.g1()?;
        let pairing_commitment = r.gt()?;
        let mut link_commitments = BTreeMap::new();
        let mut link_nonce_commitments = BTreeMap::new();
        let mut link_responses = BTreeMap::new();
        for j in [MSG_ID_CRED_SEC, MSG_PRF_KEY] {
            link_commitments.insert(j, r.g1()?);
            link_nonce_commitments.insert(j, r.g1()?);
            link_responses.insert(j, r.scalar()?);
        }
        let response_blinding = r.scalar()?;
        let mut hidden_responses = BTreeMap::new();
        for _ in 0..hidden_count {
            let (j, v) = r.indexed_scalar()?;
            if hidden_responses.insert(j, v).is_some() {
                return Err(DecodeError("duplicate response index"));
            }
        }
        let commitments = (0..4).map(|_| r.g1()).collect::<Result<Vec<_>, _>>()?;
        let response_rho = r.scalar()?;
        let response_sk = r.scalar()?;
        let challenge = r.scalar()?;
        r.finish()?;
        Ok(AccountProof {
            signature_pok: SignaturePoK {
                sigma1,
                sigma2,
                pairing_commitment,
                link_commitments,
                link_nonce_commitments,
                response_blinding,
                hidden_responses,
                link_responses,
            },
            commitments,
            response_rho,
            response_sk,
            challenge,
        })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        Self::from_segments(&encoding::split(bytes)?)
    }
}

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::{ca_extract_attributes, AttributeList, ProtocolError, ProtocolOptions, UserDocs};
use crate::blind::{
    self, blind_request, blind_sign, unblind, BlindSignRequest, BlindedSignature, BlindingState,
    IssuerKeyPair, IssuerPublicKey, Signature, MSG_FIRST_ATTRIBUTE, MSG_ID_CRED_SEC, MSG_PRF_KEY,
};
use crate::crypto::{CommitmentKey, Scalar, G1};
use crate::prf::{PrfKey, DEFAULT_KEY_BITS};
use crate::relation::{
    prove_registration, verify_registration, RegistrationProof, RegistrationStatement,
    RegistrationWitness,
};
use crate::threshold::{encrypt_scalar_chunked, ChunkLayout, ChunkedCiphertext, CommitteeKeySet};

/// Everything the user sends to the CA.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistrationRequest {
    pub docs: UserDocs,
    pub id_cred_pub: G1,
    pub committee_epoch: u64,
    pub ereg_id: ChunkedCiphertext,
    pub blind_request: BlindSignRequest,
    pub registration_proof: RegistrationProof,
}

impl RegistrationRequest {
    fn statement(&self, committee: &CommitteeKeySet) -> Option<RegistrationStatement> {
        Some(RegistrationStatement {
            committee_pk: committee.pk,
            ereg_id: self.ereg_id.clone(),
            k_commitment: *self.blind_request.message_commitments.get(&MSG_PRF_KEY)?,
            id_cred_pub: self.id_cred_pub,
            sec_commitment: *self
                .blind_request
                .message_commitments
                .get(&MSG_ID_CRED_SEC)?,
        })
    }
}

/// User-side secrets held between request and response.
#[derive(Clone)]
pub struct UserRegistrationState {
    id_cred_sec: Scalar,
    prf_key: PrfKey,
    blinding: BlindingState,
    committee_epoch: u64,
}

impl std::fmt::Debug for UserRegistrationState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("UserRegistrationState(..)")
    }
}

impl UserRegistrationState {
    pub fn id_cred_sec(&self) -> Scalar {
        self.id_cred_sec
    }

    pub fn prf_key(&self) -> PrfKey {
        self.prf_key
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuanceResponse {
    pub ca_id: String,
    pub blinded: BlindedSignature,
    pub attributes: AttributeList,
    pub issued_at: u64,
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserCert {
    pub ca_id: String,
    pub ca_pk: IssuerPublicKey,
    pub id_cred_pub: G1,
    pub id_cred_sec: Scalar,
    pub prf_key: PrfKey,
    pub attributes: AttributeList,
    pub signature: Signature,
    pub committee_epoch: u64,
    pub issued_at: u64,
    pub next_account_index: u64,
}

impl std::fmt::Debug for UserCert {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UserCert")
            .field("ca_id", &self.ca_id)
            .field("id_cred_pub", &self.id_cred_pub)
            .field("issued_at", &self.issued_at)
            .field("next_account_index", &self.next_account_index)
            .finish_non_exhaustive()
    }
}

impl UserCert {
    pub fn messages(&self) -> Vec<Scalar> {
        let mut m = vec![self.id_cred_sec, self.prf_key.scalar()];
        m.extend_from_slice(&self.attributes.values);
        m
    }

    pub fn verify(&self) -> bool {
        G1::generator() * self.id_cred_sec == self.id_cred_pub
            && blind::verify(&self.ca_pk, &self.messages(), &self.signature)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaRecord {
    pub user_docs: UserDocs,
    pub id_cred_pub: G1,
    pub attributes: AttributeList,
    pub ereg_id: ChunkedCiphertext,
    pub committee_epoch: u64,
    pub registration_proof: RegistrationProof,
}

/// A CA's signing keys and its private record store, keyed by IDcredPUB hex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateAuthority {
    pub id: String,
    pub keys: IssuerKeyPair,
    pub records: BTreeMap<String, CaRecord>,
}

impl CertificateAuthority {
    pub fn new(id: impl Into<String>, keys: IssuerKeyPair) -> Self {
        CertificateAuthority {
            id: id.into(),
            keys,
            records: BTreeMap::new(),
        }
    }

    pub fn public_key(&self) -> &IssuerPublicKey {
        &self.keys.pk
    }

    pub fn record(&self, id_cred_pub: &G1) -> Option<&CaRecord> {
        self.records.get(&hex::encode(id_cred_pub.to_bytes()))
    }

    /// Checks the request, blind-signs, and stores the record. Nothing is
    /// stored unless every check passes.
    pub fn process_registration<R: RngCore + CryptoRng>(
        &mut self,
        request: &RegistrationRequest,
        committee: &CommitteeKeySet,
        day: u64,
        options: &ProtocolOptions,
        rng: &mut R,
    ) -> Result<IssuanceResponse, ProtocolError> {
        if request.committee_epoch != committee.epoch {
            return Err(ProtocolError::UnknownCommittee(request.committee_epoch));
        }
        let attributes = ca_extract_attributes(&request.docs, day, &options.calendar)
            .map_err(|e| ProtocolError::DocsRejected(e.to_string()))?;
        if request.ereg_id.layout() != ChunkLayout::default() {
            return Err(ProtocolError::RegistrationProofInvalid);
        }
        let statement = request
            .statement(committee)
            .ok_or(ProtocolError::RegistrationProofInvalid)?;
        if !verify_registration(
            &statement,
            &request.registration_proof,
            options.range_proofs,
        ) {
            return Err(ProtocolError::RegistrationProofInvalid);
        }
        let key = hex::encode(request.id_cred_pub.to_bytes());
        if self.records.contains_key(&key) {
            return Err(ProtocolError::DuplicateIdCredPub);
        }
        let known: BTreeMap<usize, Scalar> = attributes
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (MSG_FIRST_ATTRIBUTE + i, *v))
            .collect();
        let ck = CommitmentKey::default();
        let blinded = blind_sign(&self.keys, &ck, &request.blind_request, &known, rng)?;
        self.records.insert(
            key,
            CaRecord {
                user_docs: request.docs.clone(),
                id_cred_pub: request.id_cred_pub,
                attributes: attributes.clone(),
                ereg_id: request.ereg_id.clone(),
                committee_epoch: committee.epoch,
                registration_proof: request.registration_proof.clone(),
            },
        );
        Ok(IssuanceResponse {
            ca_id: self.id.clone(),
            blinded,
            attributes,
            issued_at: day,
        })
    }
}

/// User side of registration: fresh IDcredSEC and K, the blind signing
/// request, ERegID, and its proof.
pub fn prepare_registration<R: RngCore + CryptoRng>(
    docs: &UserDocs,
    ca_pk: &IssuerPublicKey,
    committee: &CommitteeKeySet,
    options: &ProtocolOptions,
    rng: &mut R,
) -> Result<(RegistrationRequest, UserRegistrationState), ProtocolError> {
    let ck = CommitmentKey::default();
    let id_cred_sec = Scalar::random_nonzero(rng);
    let prf_key = PrfKey::random(rng, DEFAULT_KEY_BITS);
    let hidden: BTreeMap<usize, Scalar> = [
        (MSG_ID_CRED_SEC, id_cred_sec),
        (MSG_PRF_KEY, prf_key.scalar()),
    ]
    .into();
    let (request, blinding) = blind_request(ca_pk, &ck, &hidden, rng)?;
    let (ereg_id, chunks) = encrypt_scalar_chunked(
        &committee.pk,
        &prf_key.scalar(),
        ChunkLayout::default(),
        rng,
    )?;
    let id_cred_pub = G1::generator() * id_cred_sec;
    let statement = RegistrationStatement {
        committee_pk: committee.pk,
        ereg_id: ereg_id.clone(),
        k_commitment: request.message_commitments[&MSG_PRF_KEY],
        id_cred_pub,
        sec_commitment: request.message_commitments[&MSG_ID_CRED_SEC],
    };
    let witness = RegistrationWitness {
        prf_key,
        chunks,
        k_opening: blinding.openings[&MSG_PRF_KEY],
        id_cred_sec,
        sec_opening: blinding.openings[&MSG_ID_CRED_SEC],
    };
    let registration_proof = prove_registration(&statement, &witness, options.range_proofs, rng)?;
    Ok((
        RegistrationRequest {
            docs: docs.clone(),
            id_cred_pub,
            committee_epoch: committee.epoch,
            ereg_id,
            blind_request: request,
            registration_proof,
        },
        UserRegistrationState {
            id_cred_sec,
            prf_key,
            blinding,
            committee_epoch: committee.epoch,
        },
    ))
}

pub fn finish_registration(
    state: UserRegistrationState,
    response: &IssuanceResponse,
    ca_pk: &IssuerPublicKey,
) -> Result<UserCert, ProtocolError> {
    let cert = UserCert {
        ca_id: response.ca_id.clone(),
        ca_pk: ca_pk.clone(),
        id_cred_pub: G1::generator() * state.id_cred_sec,
        id_cred_sec: state.id_cred_sec,
        prf_key: state.prf_key,
        attributes: response.attributes.clone(),
        signature: unblind(&response.blinded, &state.blinding),
        committee_epoch: state.committee_epoch,
        issued_at: response.issued_at,
        next_account_index: 1,
    };
    if !cert.verify() {
        return Err(ProtocolError::InvalidCertificate);
    }
    Ok(cert)
}

/// Every message the CA saw during one registration, as serialized on the
/// wire.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IssuanceTranscript {
    pub messages: Vec<(String, Vec<u8>)>,
}

impl IssuanceTranscript {
    pub fn record<T: Serialize>(&mut self, label: &str, message: &T) {
        let bytes = serde_json::to_vec(message).expect("protocol messages serialize");
        self.messages.push((label.to_string(), bytes));
    }

    pub fn record_raw(&mut self, label: &str, bytes: Vec<u8>) {
        self.messages.push((label.to_string(), bytes));
    }

    /// True if `needle` or its lowercase hex appears in any message.
    pub fn contains(&self, needle: &[u8]) -> bool {
        let hexed = hex::encode(needle);
        self.messages
            .iter()
            .any(|(_, m)| contains_bytes(m, needle) || contains_bytes(m, hexed.as_bytes()))
    }
}

fn contains_bytes(haystack: &[u8], needle: &[u8]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Runs both sides of registration in-process.
pub fn run_registration<R: RngCore + CryptoRng>(
    docs: &UserDocs,
    ca: &mut CertificateAuthority,
    committee: &CommitteeKeySet,
    day: u64,
    options: &ProtocolOptions,
    rng: &mut R,
) -> Result<(UserCert, CaRecord, IssuanceTranscript), ProtocolError> {
    let (request, state) = prepare_registration(docs, ca.public_key(), committee, options, rng)?;
    let mut transcript = IssuanceTranscript::default();
    transcript.record("request", &request);
    transcript.record_raw("registration-proof", request.registration_proof.to_bytes());
    let response = ca.process_registration(&request, committee, day, options, rng)?;
    transcript.record("response", &response);
    let record = ca
        .record(&request.id_cred_pub)
        .cloned()
        .expect("record stored on success");
    let cert = finish_registration(state, &response, &ca.keys.pk)?;
    Ok((cert, record, transcript))
}

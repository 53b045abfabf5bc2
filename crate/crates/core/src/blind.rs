//! Randomizable pairing-based signatures on message vectors, with blind
//! issuance over committed messages and proofs of signature possession.
//!
//! Keys: `sk = (x, y_1..y_m)`, `pk = (X̃ = g̃^x, Ỹ_j = g̃^{y_j}, Y_j = g^{y_j})`.
//! A signature `(σ1, σ2)` on `m` satisfies `e(σ1, X̃ + Σ Ỹ_j·m_j) = e(σ2, g̃)`.
//! Message layout is fixed: 0 = IDcredSEC, 1 = K, 2.. = attributes.

use std::collections::{BTreeMap, BTreeSet};

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::crypto::sigma::{LinearEquation, LinearProof};
use crate::crypto::{multi_pairing, pairing, CommitmentKey, Gt, Scalar, Transcript, G1, G2};

pub const MSG_ID_CRED_SEC: usize = 0;
pub const MSG_PRF_KEY: usize = 1;
pub const MSG_FIRST_ATTRIBUTE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlindSigError {
    #[error("attribute count must be at least 1")]
    NoAttributes,
    #[error("expected {expected} messages, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("blind request proof of opening failed")]
    InvalidRequestProof,
    #[error("message index {0} is both hidden and disclosed or out of range")]
    BadIndexSet(usize),
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerSecretKey {
    pub x: Scalar,
    pub ys: Vec<Scalar>,
}

impl std::fmt::Debug for IssuerSecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IssuerSecretKey {{ m: {}, .. }}", self.ys.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerPublicKey {
    pub x_tilde: G2,
    pub y_tilde: Vec<G2>,
    pub y_g1: Vec<G1>,
}

impl IssuerPublicKey {
    pub fn message_count(&self) -> usize {
        self.y_tilde.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.message_count().saturating_sub(MSG_FIRST_ATTRIBUTE)
    }

    pub fn absorb(&self, t: &mut Transcript) {
        t.append_g2(b"pk-x", &self.x_tilde);
        t.append_u64(b"pk-m", self.y_tilde.len() as u64);
        for (yt, y) in self.y_tilde.iter().zip(&self.y_g1) {
            t.append_g2(b"pk-y~", yt);
            t.append_g1(b"pk-y", y);
        }
    }

    /// Stable identifier: hex of the hash of all key material.
    pub fn fingerprint(&self) -> String {
        let mut t = Transcript::new(b"issuer-fingerprint");
        self.absorb(&mut t);
        hex::encode(t.challenge_scalar(b"fp").to_bytes())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerKeyPair {
    pub sk: IssuerSecretKey,
    pub pk: IssuerPublicKey,
}

pub fn issuer_keygen<R: RngCore + CryptoRng>(
    attribute_count: usize,
    rng: &mut R,
) -> Result<IssuerKeyPair, BlindSigError> {
    if attribute_count == 0 {
        return Err(BlindSigError::NoAttributes);
    }
    let m = attribute_count + MSG_FIRST_ATTRIBUTE;
    let x = Scalar::random_nonzero(rng);
    let ys: Vec<Scalar> = (0..m).map(|_| Scalar::random_nonzero(rng)).collect();
    let pk = IssuerPublicKey {
        x_tilde: G2::generator() * x,
        y_tilde: ys.iter().map(|y| G2::generator() * *y).collect(),
        y_g1: ys.iter().map(|y| G1::generator() * *y).collect(),
    };
    Ok(IssuerKeyPair {
        sk: IssuerSecretKey { x, ys },
        pk,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub sigma1: G1,
    pub sigma2: G1,
}

fn check_len(pk: &IssuerPublicKey, messages: &[Scalar]) -> Result<(), BlindSigError> {
    if messages.len() != pk.message_count() {
        return Err(BlindSigError::LengthMismatch {
            expected: pk.message_count(),
            got: messages.len(),
        });
    }
    Ok(())
}

/// Direct (non-blind) signing.
pub fn sign<R: RngCore + CryptoRng>(
    sk: &IssuerSecretKey,
    messages: &[Scalar],
    rng: &mut R,
) -> Result<Signature, BlindSigError> {
    if messages.len() != sk.ys.len() {
        return Err(BlindSigError::LengthMismatch {
            expected: sk.ys.len(),
            got: messages.len(),
        });
    }
    let u = Scalar::random_nonzero(rng);
    let exponent = sk
        .ys
        .iter()
        .zip(messages)
        .fold(sk.x, |acc, (y, m)| acc + *y * *m);
    let sigma1 = G1::generator() * u;
    Ok(Signature {
        sigma1,
        sigma2: sigma1 * exponent,
    })
}

pub fn verify(pk: &IssuerPublicKey, messages: &[Scalar], sig: &Signature) -> bool {
    if check_len(pk, messages).is_err() || sig.sigma1.is_identity() {
        return false;
    }
    let aggregate = pk
        .y_tilde
        .iter()
        .zip(messages)
        .fold(pk.x_tilde, |acc, (y, m)| acc + *y * *m);
    multi_pairing(&[(sig.sigma1, aggregate), (-sig.sigma2, G2::generator())]).is_identity()
}

pub fn randomize<R: RngCore + CryptoRng>(sig: &Signature, rng: &mut R) -> Signature {
    let r = Scalar::random_nonzero(rng);
    Signature {
        sigma1: sig.sigma1 * r,
        sigma2: sig.sigma2 * r,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindSignRequest {
    /// `g·t + Σ_{hidden} Y_j·m_j`.
    pub commitment: G1,
    /// Pedersen commitments `g·m_j + h·r_j`, keyed by message index.
    pub message_commitments: BTreeMap<usize, G1>,
    pub proof_of_opening: LinearProof,
}

/// User-side secrets needed to unblind and to reuse the message commitments.
#[derive(Clone, PartialEq, Eq)]
pub struct BlindingState {
    pub blinding: Scalar,
    pub hidden: BTreeMap<usize, Scalar>,
    pub openings: BTreeMap<usize, Scalar>,
}

impl std::fmt::Debug for BlindingState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BlindingState {{ hidden: {:?}, .. }}",
            self.hidden.keys()
        )
    }
}

fn request_statement(
    pk: &IssuerPublicKey,
    ck: &CommitmentKey,
    commitment: &G1,
    message_commitments: &BTreeMap<usize, G1>,
) -> Vec<LinearEquation> {
    // variables: 0 = t, then (m_j, r_j) per hidden index in order
    let mut eqs = Vec::with_capacity(1 + message_commitments.len());
    let mut terms = vec![(0, ck.g)];
    for (slot, j) in message_commitments.keys().enumerate() {
        terms.push((1 + 2 * slot, pk.y_g1[*j]));
    }
    eqs.push(LinearEquation::new(*commitment, terms));
    for (slot, com) in message_commitments.values().enumerate() {
        eqs.push(LinearEquation::new(
            *com,
            vec![(1 + 2 * slot, ck.g), (2 + 2 * slot, ck.h)],
        ));
    }
    eqs
}

fn request_transcript(pk: &IssuerPublicKey) -> Transcript {
    let mut t = Transcript::new(b"blind-request");
    pk.absorb(&mut t);
    t
}

pub fn blind_request<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    ck: &CommitmentKey,
    hidden: &BTreeMap<usize, Scalar>,
    rng: &mut R,
) -> Result<(BlindSignRequest, BlindingState), BlindSigError> {
    for j in [MSG_ID_CRED_SEC, MSG_PRF_KEY] {
        if !hidden.contains_key(&j) {
            return Err(BlindSigError::BadIndexSet(j));
        }
    }
    if let Some(j) = hidden.keys().find(|j| **j >= pk.message_count()) {
        return Err(BlindSigError::BadIndexSet(*j));
    }
    let blinding = Scalar::random_nonzero(rng);
    let openings: BTreeMap<usize, Scalar> =
        hidden.keys().map(|j| (*j, Scalar::random(rng))).collect();
    let commitment = hidden
        .iter()
        .fold(ck.g * blinding, |acc, (j, m)| acc + pk.y_g1[*j] * *m);
    let message_commitments: BTreeMap<usize, G1> = hidden
        .iter()
        .map(|(j, m)| (*j, ck.commit(m, &openings[j]).point()))
        .collect();
    let mut witness = vec![blinding];
    for j in hidden.keys() {
        witness.push(hidden[j]);
        witness.push(openings[j]);
    }
    let eqs = request_statement(pk, ck, &commitment, &message_commitments);
    let proof_of_opening = LinearProof::prove(&eqs, &witness, &mut request_transcript(pk), rng);
    Ok((
        BlindSignRequest {
            commitment,
            message_commitments,
            proof_of_opening,
        },
        BlindingState {
            blinding,
            hidden: hidden.clone(),
            openings,
        },
    ))
}

pub fn verify_request(
    pk: &IssuerPublicKey,
    ck: &CommitmentKey,
    request: &BlindSignRequest,
) -> bool {
    if request
        .message_commitments
        .keys()
        .any(|j| *j >= pk.message_count())
    {
        return false;
    }
    let eqs = request_statement(pk, ck, &request.commitment, &request.message_commitments);
    request
        .proof_of_opening
        .verify(&eqs, &mut request_transcript(pk))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindedSignature {
    pub sigma1: G1,
    pub sigma2: G1,
}

/// Signs the committed messages plus `known` (index → value) in the clear.
/// The known indices must be exactly those not committed in the request.
pub fn blind_sign<R: RngCore + CryptoRng>(
    keys: &IssuerKeyPair,
    ck: &CommitmentKey,
    request: &BlindSignRequest,
    known: &BTreeMap<usize, Scalar>,
    rng: &mut R,
) -> Result<BlindedSignature, BlindSigError> {
    let m = keys.pk.message_count();
    for j in 0..m {
        let hidden = request.message_commitments.contains_key(&j);
        if hidden == known.contains_key(&j) {
            return Err(BlindSigError::BadIndexSet(j));
        }
    }
    if let Some(j) = known.keys().find(|j| **j >= m) {
        return Err(BlindSigError::BadIndexSet(*j));
    }
    if !verify_request(&keys.pk, ck, request) {
        return Err(BlindSigError::InvalidRequestProof);
    }
    let u = Scalar::random_nonzero(rng);
    let known_part = known
        .iter()
        .fold(Scalar::ZERO, |acc, (j, v)| acc + keys.sk.ys[*j] * *v);
    let base = ck.g * (keys.sk.x + known_part) + request.commitment;
    Ok(BlindedSignature {
        sigma1: ck.g * u,
        sigma2: base * u,
    })
}

pub fn unblind(blinded: &BlindedSignature, state: &BlindingState) -> Signature {
    Signature {
        sigma1: blinded.sigma1,
        sigma2: blinded.sigma2 - blinded.sigma1 * state.blinding,
    }
}

/// Proof of knowledge of a signature on partially disclosed messages.
///
/// Holds the randomized signature, the pairing commitment, Pedersen
/// commitments to the linked hidden messages, and all responses. The
/// challenge is kept outside so the proof can share one challenge with other
/// clauses; [`pok_prove`] and [`pok_verify`] wrap the standalone case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignaturePoK {
    pub sigma1: G1,
    pub sigma2: G1,
    pub pairing_commitment: Gt,
    pub link_commitments: BTreeMap<usize, G1>,
    pub link_nonce_commitments: BTreeMap<usize, G1>,
    pub response_blinding: Scalar,
    pub hidden_responses: BTreeMap<usize, Scalar>,
    pub link_responses: BTreeMap<usize, Scalar>,
}

/// First move of a [`SignaturePoK`]. Blindings for hidden messages can be
/// supplied to share them with other clauses.
pub struct PokProver {
    pok: SignaturePoK,
    t: Scalar,
    b_t: Scalar,
    hidden_values: BTreeMap<usize, Scalar>,
    hidden_blindings: BTreeMap<usize, Scalar>,
    link_openings: BTreeMap<usize, Scalar>,
    link_blindings: BTreeMap<usize, Scalar>,
}

impl PokProver {
    #[allow(clippy::too_many_arguments)]
    pub fn commit<R: RngCore + CryptoRng>(
        pk: &IssuerPublicKey,
        ck: &CommitmentKey,
        sig: &Signature,
        messages: &[Scalar],
        disclosed: &BTreeSet<usize>,
        linked: &BTreeSet<usize>,
        shared_blindings: &BTreeMap<usize, Scalar>,
        rng: &mut R,
    ) -> Result<Self, BlindSigError> {
        check_len(pk, messages)?;
        if let Some(j) = disclosed.iter().find(|j| **j >= messages.len()) {
            return Err(BlindSigError::BadIndexSet(*j));
        }
        if let Some(j) = linked
            .iter()
            .find(|j| disclosed.contains(j) || **j >= messages.len())
        {
            return Err(BlindSigError::BadIndexSet(*j));
        }
        let r = Scalar::random_nonzero(rng);
        let t = Scalar::random(rng);
        let sigma1 = sig.sigma1 * r;
        let sigma2 = (sig.sigma2 + sig.sigma1 * t) * r;

        let hidden_values: BTreeMap<usize, Scalar> = (0..messages.len())
            .filter(|j| !disclosed.contains(j))
            .map(|j| (j, messages[j]))
            .collect();
        let hidden_blindings: BTreeMap<usize, Scalar> = hidden_values
            .keys()
            .map(|j| {
                (
                    *j,
                    shared_blindings
                        .get(j)
                        .copied()
                        .unwrap_or_else(|| Scalar::random(rng)),
                )
            })
            .collect();
        let b_t = Scalar::random(rng);
        let g2_side = hidden_blindings
            .iter()
            .fold(G2::generator() * b_t, |acc, (j, b)| {
                acc + pk.y_tilde[*j] * *b
            });
        let pairing_commitment = pairing(&sigma1, &g2_side);

        let link_openings: BTreeMap<usize, Scalar> =
            linked.iter().map(|j| (*j, Scalar::random(rng))).collect();
        let link_blindings: BTreeMap<usize, Scalar> =
            linked.iter().map(|j| (*j, Scalar::random(rng))).collect();
        let link_commitments = linked
            .iter()
            .map(|j| (*j, ck.commit(&messages[*j], &link_openings[j]).point()))
            .collect();
        let link_nonce_commitments = linked
            .iter()
            .map(|j| (*j, ck.g * hidden_blindings[j] + ck.h * link_blindings[j]))
            .collect();

        Ok(PokProver {
            pok: SignaturePoK {
                sigma1,
                sigma2,
                pairing_commitment,
                link_commitments,
                link_nonce_commitments,
                response_blinding: Scalar::ZERO,
                hidden_responses: BTreeMap::new(),
                link_responses: BTreeMap::new(),
            },
            t,
            b_t,
            hidden_values,
            hidden_blindings,
            link_openings,
            link_blindings,
        })
    }

    pub fn absorb(&self, tr: &mut Transcript) {
        absorb_commitments(&self.pok, tr);
    }

    /// Pedersen commitments to the linked messages, for other clauses.
    pub fn link_commitments(&self) -> &BTreeMap<usize, G1> {
        &self.pok.link_commitments
    }

    pub fn respond(self, challenge: &Scalar) -> SignaturePoK {
        let c = *challenge;
        let mut pok = self.pok;
        pok.response_blinding = self.b_t + c * self.t;
        pok.hidden_responses = self
            .hidden_values
            .iter()
            .map(|(j, m)| (*j, self.hidden_blindings[j] + c * *m))
            .collect();
        pok.link_responses = self
            .link_openings
            .iter()
            .map(|(j, r)| (*j, self.link_blindings[j] + c * *r))
            .collect();
        pok
    }
}

fn absorb_commitments(pok: &SignaturePoK, tr: &mut Transcript) {
    tr.append_g1(b"pok-sigma1", &pok.sigma1);
    tr.append_g1(b"pok-sigma2", &pok.sigma2);
    tr.append_gt(b"pok-T", &pok.pairing_commitment);
    for (j, c) in &pok.link_commitments {
        tr.append_u64(b"pok-link-index", *j as u64);
        tr.append_g1(b"pok-link", c);
        tr.append_g1(b"pok-link-T", &pok.link_nonce_commitments[j]);
    }
}

impl SignaturePoK {
    pub fn absorb(&self, tr: &mut Transcript) {
        absorb_commitments(self, tr);
    }

    /// Checks every equation of the proof against `challenge`. `disclosed`
    /// maps each revealed index to its value; all other indices must carry
    /// a response.
    pub fn check(
        &self,
        pk: &IssuerPublicKey,
        ck: &CommitmentKey,
        disclosed: &BTreeMap<usize, Scalar>,
        challenge: &Scalar,
    ) -> bool {
        let m = pk.message_count();
        if self.sigma1.is_identity() {
            return false;
        }
        for j in 0..m {
            if disclosed.contains_key(&j) == self.hidden_responses.contains_key(&j) {
                return false;
            }
        }
        if disclosed
            .keys()
            .chain(self.hidden_responses.keys())
            .any(|j| *j >= m)
        {
            return false;
        }
        if self.link_commitments.len() != self.link_responses.len()
            || self.link_commitments.len() != self.link_nonce_commitments.len()
        {
            return false;
        }
        for (j, com) in &self.link_commitments {
            let (Some(s_m), Some(s_r), Some(t)) = (
                self.hidden_responses.get(j),
                self.link_responses.get(j),
                self.link_nonce_commitments.get(j),
            ) else {
                return false;
            };
            if ck.g * *s_m + ck.h * *s_r != *t + *com * *challenge {
                return false;
            }
        }
        // e(σ1', g̃·s_t + Σ_hidden Ỹ_j·s_j) = T + c·(e(σ2', g̃) − e(σ1', X̃ + Σ_disc Ỹ_j·m_j))
        let response_side = self
            .hidden_responses
            .iter()
            .fold(G2::generator() * self.response_blinding, |acc, (j, s)| {
                acc + pk.y_tilde[*j] * *s
            });
        let disclosed_side = disclosed
            .iter()
            .fold(pk.x_tilde, |acc, (j, v)| acc + pk.y_tilde[*j] * *v);
        let c = *challenge;
        // Rearranged so a single multi-pairing covers all three terms.
        let lhs = multi_pairing(&[
            (self.sigma1, response_side + disclosed_side * c),
            (-(self.sigma2 * c), G2::generator()),
        ]);
        lhs == self.pairing_commitment
    }
}

/// Standalone proof with its own challenge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisclosureProof {
    pub pok: SignaturePoK,
    pub challenge: Scalar,
}

fn standalone_challenge(
    pk: &IssuerPublicKey,
    disclosed: &BTreeMap<usize, Scalar>,
    pok: &SignaturePoK,
    transcript: &mut Transcript,
) -> Scalar {
    transcript.append_message(b"proto", b"sig-pok");
    pk.absorb(transcript);
    for (j, v) in disclosed {
        transcript.append_u64(b"disclosed-index", *j as u64);
        transcript.append_scalar(b"disclosed-value", v);
    }
    pok.absorb(transcript);
    transcript.challenge_scalar(b"sig-pok-challenge")
}

/// Proves possession of `sig` on `messages`, revealing every index not in
/// `hidden`. Hidden K and IDcredSEC get exported Pedersen commitments.
pub fn pok_prove<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    ck: &CommitmentKey,
    sig: &Signature,
    messages: &[Scalar],
    hidden: &BTreeSet<usize>,
    transcript: &mut Transcript,
    rng: &mut R,
) -> Result<DisclosureProof, BlindSigError> {
    check_len(pk, messages)?;
    let disclosed_idx: BTreeSet<usize> = (0..messages.len())
        .filter(|j| !hidden.contains(j))
        .collect();
    let linked: BTreeSet<usize> = [MSG_ID_CRED_SEC, MSG_PRF_KEY]
        .into_iter()
        .filter(|j| hidden.contains(j))
        .collect();
    let prover = PokProver::commit(
        pk,
        ck,
        sig,
        messages,
        &disclosed_idx,
        &linked,
        &BTreeMap::new(),
        rng,
    )?;
    let disclosed: BTreeMap<usize, Scalar> =
        disclosed_idx.iter().map(|j| (*j, messages[*j])).collect();
    let challenge = standalone_challenge(pk, &disclosed, &prover.pok, transcript);
    Ok(DisclosureProof {
        pok: prover.respond(&challenge),
        challenge,
    })
}

pub fn pok_verify(
    pk: &IssuerPublicKey,
    ck: &CommitmentKey,
    proof: &DisclosureProof,
    disclosed: &BTreeMap<usize, Scalar>,
    transcript: &mut Transcript,
) -> bool {
    let recomputed = standalone_challenge(pk, disclosed, &proof.pok, transcript);
    recomputed == proof.challenge && proof.pok.check(pk, ck, disclosed, &proof.challenge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn messages(r: &mut ChaCha20Rng, m: usize) -> Vec<Scalar> {
        (0..m).map(|_| Scalar::random(r)).collect()
    }

    fn contains(haystack: &[u8], needle: &[u8]) -> bool {
        haystack.windows(needle.len()).any(|w| w == needle)
    }

    #[test]
    fn keygen_layout() {
        let mut r = rng(1);
        let kp = issuer_keygen(1, &mut r).unwrap();
        assert_eq!(kp.pk.message_count(), 3);
        assert_eq!(issuer_keygen(0, &mut r), Err(BlindSigError::NoAttributes));
        let other = issuer_keygen(1, &mut r).unwrap();
        assert_ne!(kp.pk, other.pk);
    }

    #[test]
    fn sign_verify_and_unforgeability_smoke() {
        let mut r = rng(2);
        let kp = issuer_keygen(4, &mut r).unwrap();
        let other = issuer_keygen(4, &mut r).unwrap();
        for _ in 0..10 {
            let msgs = messages(&mut r, 6);
            let sig = sign(&kp.sk, &msgs, &mut r).unwrap();
            assert!(verify(&kp.pk, &msgs, &sig));
            let mut swapped = msgs.clone();
            swapped.swap(0, 1);
            assert!(!verify(&kp.pk, &swapped, &sig));
            assert!(!verify(&other.pk, &msgs, &sig));
            let mut bad = sig;
            bad.sigma1 += G1::generator();
            assert!(!verify(&kp.pk, &msgs, &bad));
            let mut bad = sig;
            bad.sigma2 += G1::generator();
            assert!(!verify(&kp.pk, &msgs, &bad));
            assert!(!verify(&kp.pk, &msgs[..5], &sig));
        }
    }

    #[test]
    fn randomized_signatures_are_fresh_and_valid() {
        let mut r = rng(3);
        let kp = issuer_keygen(2, &mut r).unwrap();
        let msgs = messages(&mut r, 4);
        let sig = sign(&kp.sk, &msgs, &mut r).unwrap();
        let a = randomize(&sig, &mut r);
        let b = randomize(&sig, &mut r);
        for s in [a, b] {
            assert!(verify(&kp.pk, &msgs, &s));
            assert_ne!(s.sigma1, sig.sigma1);
            assert_ne!(s.sigma2, sig.sigma2);
        }
        assert_ne!(a.sigma1, b.sigma1);
        assert_ne!(a.sigma2, b.sigma2);
    }

    fn issue(
        r: &mut ChaCha20Rng,
        kp: &IssuerKeyPair,
        ck: &CommitmentKey,
    ) -> (Vec<Scalar>, BlindSignRequest, BlindingState) {
        let msgs = messages(r, kp.pk.message_count());
        let hidden: BTreeMap<usize, Scalar> = [(0, msgs[0]), (1, msgs[1])].into();
        let (req, state) = blind_request(&kp.pk, ck, &hidden, r).unwrap();
        (msgs, req, state)
    }

    fn known(msgs: &[Scalar]) -> BTreeMap<usize, Scalar> {
        msgs.iter()
            .enumerate()
            .skip(2)
            .map(|(j, v)| (j, *v))
            .collect()
    }

    #[test]
    fn blind_issuance_end_to_end() {
        let mut r = rng(4);
        let ck = CommitmentKey::default();
        let kp = issuer_keygen(4, &mut r).unwrap();
        let (msgs, req, state) = issue(&mut r, &kp, &ck);
        assert!(verify_request(&kp.pk, &ck, &req));
        let blinded = blind_sign(&kp, &ck, &req, &known(&msgs), &mut r).unwrap();
        let sig = unblind(&blinded, &state);
        assert!(verify(&kp.pk, &msgs, &sig));
    }

    #[test]
    fn blind_request_rejections() {
        let mut r = rng(5);
        let ck = CommitmentKey::default();
        let kp = issuer_keygen(2, &mut r).unwrap();
        let (msgs, mut req, _) = issue(&mut r, &kp, &ck);
        req.commitment += G1::generator();
        assert!(!verify_request(&kp.pk, &ck, &req));
        assert_eq!(
            blind_sign(&kp, &ck, &req, &known(&msgs), &mut r),
            Err(BlindSigError::InvalidRequestProof)
        );
        let only_sec: BTreeMap<usize, Scalar> = [(0, msgs[0])].into();
        assert!(blind_request(&kp.pk, &ck, &only_sec, &mut r).is_err());
        let (msgs, req, _) = issue(&mut r, &kp, &ck);
        let mut partial = known(&msgs);
        partial.remove(&2);
        assert_eq!(
            blind_sign(&kp, &ck, &req, &partial, &mut r),
            Err(BlindSigError::BadIndexSet(2))
        );
    }

    #[test]
    fn request_bytes_hide_messages() {
        let mut r = rng(6);
        let ck = CommitmentKey::default();
        let kp = issuer_keygen(4, &mut r).unwrap();
        for _ in 0..100 {
            let (msgs, req, _) = issue(&mut r, &kp, &ck);
            let bytes = serde_json::to_vec(&req).unwrap();
            for secret in &msgs[..2] {
                assert!(!contains(&bytes, hex::encode(secret.to_bytes()).as_bytes()));
                assert!(!contains(&bytes, &secret.to_bytes()));
            }
        }
    }

    #[test]
    fn issuance_transcripts_share_shape() {
        let mut r = rng(7);
        let ck = CommitmentKey::default();
        let kp = issuer_keygen(4, &mut r).unwrap();
        let (_, a, _) = issue(&mut r, &kp, &ck);
        let (_, b, _) = issue(&mut r, &kp, &ck);
        let ja = serde_json::to_value(&a).unwrap();
        let jb = serde_json::to_value(&b).unwrap();
        fn shape(v: &serde_json::Value) -> String {
            match v {
                serde_json::Value::Object(m) => m
                    .iter()
                    .map(|(k, v)| format!("{k}:{}", shape(v)))
                    .collect::<Vec<_>>()
                    .join(","),
                serde_json::Value::Array(a) => {
                    format!("[{}]", a.iter().map(shape).collect::<Vec<_>>().join(","))
                }
                serde_json::Value::String(s) => format!("s{}", s.len()),
                other => other.to_string(),
            }
        }
        assert_eq!(shape(&ja), shape(&jb));
    }

    #[test]
    fn pok_completeness_and_disclosure_binding() {
        let mut r = rng(8);
        let ck = CommitmentKey::default();
        let kp = issuer_keygen(4, &mut r).unwrap();
        let msgs = messages(&mut r, 6);
        let sig = sign(&kp.sk, &msgs, &mut r).unwrap();
        let hidden: BTreeSet<usize> = [0, 1, 3].into();
        let proof = pok_prove(
            &kp.pk,
            &ck,
            &sig,
            &msgs,
            &hidden,
            &mut Transcript::new(b"t"),
            &mut r,
        )
        .unwrap();
        let disclosed: BTreeMap<usize, Scalar> = [(2, msgs[2]), (4, msgs[4]), (5, msgs[5])].into();
        assert!(pok_verify(
            &kp.pk,
            &ck,
            &proof,
            &disclosed,
            &mut Transcript::new(b"t")
        ));
        assert!(proof.pok.link_commitments.contains_key(&0));
        assert!(proof.pok.link_commitments.contains_key(&1));
        for j in disclosed.keys() {
            let mut flipped = disclosed.clone();
            *flipped.get_mut(j).unwrap() = flipped[j] + Scalar::ONE;
            assert!(!pok_verify(
                &kp.pk,
                &ck,
                &proof,
                &flipped,
                &mut Transcript::new(b"t")
            ));
        }
        let bytes = serde_json::to_vec(&proof).unwrap();
        for j in hidden {
            assert!(!contains(
                &bytes,
                hex::encode(msgs[j].to_bytes()).as_bytes()
            ));
        }
        // a pok on a signature for different messages fails
        let other = sign(&kp.sk, &messages(&mut r, 6), &mut r).unwrap();
        let forged = pok_prove(
            &kp.pk,
            &ck,
            &other,
            &msgs,
            &[0, 1, 3].into(),
            &mut Transcript::new(b"t"),
            &mut r,
        )
        .unwrap();
        assert!(!pok_verify(
            &kp.pk,
            &ck,
            &forged,
            &disclosed,
            &mut Transcript::new(b"t")
        ));
    }
}

//! Proof that ERegID chunk-encrypts the committed PRF key and that the
//! user's IDcredPUB matches the committed IDcredSEC.
//!
//! Variables for `L` chunks: `k_j` (0..L), `ρ_j` (L..2L), `r_K`, `sec`,
//! `r_sec`, then `u_j` per chunk when range proofs are on. With range proofs
//! each chunk value is also committed bit by bit, `B_{j,i} = g·b + h·s`, and
//! `Σ_i 2^i·B_{j,i} = g·k_j + h·u_j` ties the bits to `k_j`.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::encoding::{self, DecodeError, Reader};
use super::RelationError;
use crate::crypto::sigma::{
    absorb_equations, random_blindings, respond, BitProof, BitProver, LinearEquation,
};
use crate::crypto::{CommitmentKey, Scalar, Transcript, G1};
use crate::prf::PrfKey;
use crate::threshold::{encrypt_element, ChunkOpening, ChunkedCiphertext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistrationStatement {
    pub committee_pk: G1,
    pub ereg_id: ChunkedCiphertext,
    /// `g·K + h·r_K`, taken from the blind signing request.
    pub k_commitment: G1,
    pub id_cred_pub: G1,
    /// `g·sec + h·r_sec`, taken from the blind signing request.
    pub sec_commitment: G1,
}

#[derive(Clone)]
pub struct RegistrationWitness {
    pub prf_key: PrfKey,
    pub chunks: ChunkOpening,
    pub k_opening: Scalar,
    pub id_cred_sec: Scalar,
    pub sec_opening: Scalar,
}

impl std::fmt::Debug for RegistrationWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("RegistrationWitness(..)")
    }
}

/// Serializes as hex of [`RegistrationProof::to_bytes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistrationProof {
    /// `bit_commitments[j][i]` commits to bit `i` of chunk `j`; empty when
    /// range proofs are off.
    pub bit_commitments: Vec<Vec<G1>>,
    pub bit_proofs: Vec<Vec<BitProof>>,
    pub commitments: Vec<G1>,
    pub responses: Vec<Scalar>,
    pub challenge: Scalar,
}

struct Layout {
    chunks: usize,
    range: bool,
}

impl Layout {
    fn k(&self, j: usize) -> usize {
        j
    }
    fn rho(&self, j: usize) -> usize {
        self.chunks + j
    }
    fn r_k(&self) -> usize {
        2 * self.chunks
    }
    fn sec(&self) -> usize {
        2 * self.chunks + 1
    }
    fn r_sec(&self) -> usize {
        2 * self.chunks + 2
    }
    fn u(&self, j: usize) -> usize {
        2 * self.chunks + 3 + j
    }
    fn var_count(&self) -> usize {
        2 * self.chunks + 3 + if self.range { self.chunks } else { 0 }
    }
}

fn equations(
    st: &RegistrationStatement,
    ck: &CommitmentKey,
    layout: &Layout,
    bit_commitments: &[Vec<G1>],
) -> Vec<LinearEquation> {
    let g = ck.g;
    let chunk_layout = st.ereg_id.layout();
    let mut k_terms: Vec<(usize, G1)> = (0..layout.chunks)
        .map(|j| (layout.k(j), g * chunk_layout.weight(j)))
        .collect();
    k_terms.push((layout.r_k(), ck.h));
    let mut eqs = vec![LinearEquation::new(st.k_commitment, k_terms)];
    for (j, ct) in st.ereg_id.chunks.iter().enumerate() {
        eqs.push(LinearEquation::new(ct.c1, vec![(layout.rho(j), g)]));
        eqs.push(LinearEquation::new(
            ct.c2,
            vec![(layout.rho(j), st.committee_pk), (layout.k(j), g)],
        ));
    }
    eqs.push(LinearEquation::new(st.id_cred_pub, vec![(layout.sec(), g)]));
    eqs.push(LinearEquation::new(
        st.sec_commitment,
        vec![(layout.sec(), g), (layout.r_sec(), ck.h)],
    ));
    if layout.range {
        for (j, bits) in bit_commitments.iter().enumerate() {
            let image: G1 = bits
                .iter()
                .enumerate()
                .map(|(i, b)| *b * Scalar::from_u64(1u64 << i))
                .sum();
            eqs.push(LinearEquation::new(
                image,
                vec![(layout.k(j), g), (layout.u(j), ck.h)],
            ));
        }
    }
    eqs
}

fn transcript_for(st: &RegistrationStatement, range: bool) -> Transcript {
    let mut t = Transcript::new(b"registration-proof");
    t.append_g1(b"committee-pk", &st.committee_pk);
    t.append_u64(b"chunk-bits", u64::from(st.ereg_id.chunk_bits));
    t.append_u64(b"chunk-count", st.ereg_id.chunks.len() as u64);
    for ct in &st.ereg_id.chunks {
        t.append_g1(b"ereg-c1", &ct.c1);
        t.append_g1(b"ereg-c2", &ct.c2);
    }
    t.append_g1(b"k-commitment", &st.k_commitment);
    t.append_g1(b"id-cred-pub", &st.id_cred_pub);
    t.append_g1(b"sec-commitment", &st.sec_commitment);
    t.append_u64(b"range", u64::from(range));
    t
}

fn absorb_bits(t: &mut Transcript, commitments: &[Vec<G1>], firsts: &[Vec<(G1, G1)>]) {
    for (bits, moves) in commitments.iter().zip(firsts) {
        for (b, (c0, c1)) in bits.iter().zip(moves) {
            t.append_g1(b"bit", b);
            t.append_g1(b"bit-t0", c0);
            t.append_g1(b"bit-t1", c1);
        }
    }
}

fn check_witness(st: &RegistrationStatement, w: &RegistrationWitness) -> Result<(), RelationError> {
    let err = RelationError::RegistrationWitnessInconsistent;
    let ck = CommitmentKey::default();
    let layout = st.ereg_id.layout();
    if w.chunks.values.len() != st.ereg_id.chunks.len()
        || w.chunks.randomness.len() != st.ereg_id.chunks.len()
    {
        return Err(err("chunk count"));
    }
    if st.ereg_id.chunk_bits == 0 || st.ereg_id.chunk_bits >= 64 {
        return Err(err("chunk width"));
    }
    if w.chunks
        .values
        .iter()
        .any(|v| *v >> st.ereg_id.chunk_bits != 0)
    {
        return Err(err("chunk out of range"));
    }
    if layout.recompose(&w.chunks.values) != w.prf_key.scalar() {
        return Err(err("chunks do not recompose to K"));
    }
    for ((ct, v), rho) in st
        .ereg_id
        .chunks
        .iter()
        .zip(&w.chunks.values)
        .zip(&w.chunks.randomness)
    {
        let m = G1::generator() * Scalar::from_u64(*v);
        if encrypt_element(&st.committee_pk, &m, rho).ok() != Some(*ct) {
            return Err(err("chunk encryption"));
        }
    }
    if ck.commit(&w.prf_key.scalar(), &w.k_opening).point() != st.k_commitment {
        return Err(err("K commitment"));
    }
    if G1::generator() * w.id_cred_sec != st.id_cred_pub {
        return Err(err("IDcredPUB"));
    }
    if ck.commit(&w.id_cred_sec, &w.sec_opening).point() != st.sec_commitment {
        return Err(err("IDcredSEC commitment"));
    }
    Ok(())
}

pub fn prove_registration<R: RngCore + CryptoRng>(
    statement: &RegistrationStatement,
    witness: &RegistrationWitness,
    range_proofs: bool,
    rng: &mut R,
) -> Result<RegistrationProof, RelationError> {
    check_witness(statement, witness)?;
    Ok(prove_registration_unchecked(
        statement,
        witness,
        range_proofs,
        rng,
    ))
}

/// Builds a proof without checking the witness. Chunk bits above the chunk
/// width are dropped, so an oversized chunk yields a proof that fails
/// verification. Exposed for adversarial tests.
#[doc(hidden)]
pub fn prove_registration_unchecked<R: RngCore + CryptoRng>(
    statement: &RegistrationStatement,
    witness: &RegistrationWitness,
    range_proofs: bool,
    rng: &mut R,
) -> RegistrationProof {
    let ck = CommitmentKey::default();
    let chunks = statement.ereg_id.chunks.len();
    let bits = statement.ereg_id.chunk_bits as usize;
    let layout = Layout {
        chunks,
        range: range_proofs,
    };

    let mut w = vec![Scalar::ZERO; layout.var_count()];
    for j in 0..chunks {
        w[layout.k(j)] = Scalar::from_u64(witness.chunks.values[j]);
        w[layout.rho(j)] = witness.chunks.randomness[j];
    }
    w[layout.r_k()] = witness.k_opening;
    w[layout.sec()] = witness.id_cred_sec;
    w[layout.r_sec()] = witness.sec_opening;

    let mut bit_commitments = Vec::new();
    let mut bit_provers = Vec::new();
    if range_proofs {
        for j in 0..chunks {
            let v = witness.chunks.values[j];
            let mut u = Scalar::ZERO;
            let mut coms = Vec::with_capacity(bits);
            let mut provers = Vec::with_capacity(bits);
            for i in 0..bits {
                let bit = (v >> i) & 1 == 1;
                let s = Scalar::random(rng);
                u += s * Scalar::from_u64(1u64 << i);
                let b = ck.commit(&Scalar::from_u64(u64::from(bit)), &s).point();
                provers.push(BitProver::commit(&ck.g, &ck.h, &b, bit, s, rng));
                coms.push(b);
            }
            w[layout.u(j)] = u;
            bit_commitments.push(coms);
            bit_provers.push(provers);
        }
    }

    let eqs = equations(statement, &ck, &layout, &bit_commitments);
    let blindings = random_blindings(rng, w.len());
    let commitments: Vec<G1> = eqs.iter().map(|e| e.commit(&blindings)).collect();

    let mut t = transcript_for(statement, range_proofs);
    let firsts: Vec<Vec<(G1, G1)>> = bit_provers
        .iter()
        .map(|ps| ps.iter().map(|p| (p.commit_zero, p.commit_one)).collect())
        .collect();
    absorb_bits(&mut t, &bit_commitments, &firsts);
    absorb_equations(&mut t, &eqs, &commitments);
    let c = t.challenge_scalar(b"registration-challenge");

    RegistrationProof {
        bit_commitments,
        bit_proofs: bit_provers
            .into_iter()
            .map(|ps| ps.into_iter().map(|p| p.respond(&c)).collect())
            .collect(),
        commitments,
        responses: respond(&blindings, &w, &c),
        challenge: c,
    }
}

/// Checks `proof` against `statement`. With `require_range`, a proof
/// lacking per-chunk bit proofs is rejected.
pub fn verify_registration(
    statement: &RegistrationStatement,
    proof: &RegistrationProof,
    require_range: bool,
) -> bool {
    let ck = CommitmentKey::default();
    let chunks = statement.ereg_id.chunks.len();
    let bits = statement.ereg_id.chunk_bits as usize;
    if chunks == 0 || bits == 0 || bits >= 64 {
        return false;
    }
    let range = !proof.bit_commitments.is_empty();
    if require_range && !range {
        return false;
    }
    if range
        && (proof.bit_commitments.len() != chunks
            || proof.bit_proofs.len() != chunks
            || proof.bit_commitments.iter().any(|b| b.len() != bits)
            || proof.bit_proofs.iter().any(|b| b.len() != bits))
    {
        return false;
    }
    let layout = Layout { chunks, range };
    let eqs = equations(statement, &ck, &layout, &proof.bit_commitments);
    if proof.commitments.len() != eqs.len() || proof.responses.len() != layout.var_count() {
        return false;
    }
    let c = proof.challenge;
    let linear_ok = eqs
        .iter()
        .zip(&proof.commitments)
        .all(|(e, t)| e.check(t, &proof.responses, &c));
    let bits_ok = proof
        .bit_commitments
        .iter()
        .zip(&proof.bit_proofs)
        .all(|(coms, proofs)| {
            coms.iter()
                .zip(proofs)
                .all(|(b, p)| p.check(&ck.g, &ck.h, b, &c))
        });
    if !linear_ok || !bits_ok {
        return false;
    }
    let mut t = transcript_for(statement, range);
    let firsts: Vec<Vec<(G1, G1)>> = proof
        .bit_proofs
        .iter()
        .map(|ps| ps.iter().map(|p| (p.commit_zero, p.commit_one)).collect())
        .collect();
    absorb_bits(&mut t, &proof.bit_commitments, &firsts);
    absorb_equations(&mut t, &eqs, &proof.commitments);
    t.challenge_scalar(b"registration-challenge") == c
}

impl RegistrationProof {
    pub fn segments(&self) -> Vec<Vec<u8>> {
        let bits = self.bit_commitments.first().map_or(0, Vec::len);
        let mut s = vec![
            (self.bit_commitments.len() as u32).to_be_bytes().to_vec(),
            (bits as u32).to_be_bytes().to_vec(),
            (self.commitments.len() as u32).to_be_bytes().to_vec(),
            (self.responses.len() as u32).to_be_bytes().to_vec(),
        ];
        for (coms, proofs) in self.bit_commitments.iter().zip(&self.bit_proofs) {
            for (b, p) in coms.iter().zip(proofs) {
                s.push(b.to_bytes().to_vec());
                s.push(p.commit_zero.to_bytes().to_vec());
                s.push(p.commit_one.to_bytes().to_vec());
                s.push(p.challenge_zero.to_bytes().to_vec());
                s.push(p.response_zero.to_bytes().to_vec());
                s.push(p.response_one.to_bytes().to_vec());
            }
        }
        s.extend(self.commitments.iter().map(|c| c.to_bytes().to_vec()));
        s.extend(self.responses.iter().map(|r| r.to_bytes().to_vec()));
        s.push(self.challenge.to_bytes().to_vec());
        s
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encoding::join(&self.segments())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let segments = encoding::split(bytes)?;
        let mut r = Reader::new(&segments);
        let chunks = r.u32()? as usize;
        let bits = r.u32()? as usize;
        let n_commit = r.u32()? as usize;
        let n_resp = r.u32()? as usize;
        if chunks.saturating_mul(bits) > 4096 || n_commit > 4096 || n_resp > 4096 {
            return Err(DecodeError("size limits"));
        }
        let mut bit_commitments = Vec::with_capacity(chunks);
        let mut bit_proofs = Vec::with_capacity(chunks);
        for _ in 0..chunks {
            let mut coms = Vec::with_capacity(bits);
            let mut proofs = Vec::with_capacity(bits);
            for _ in 0..bits {
                coms.push(r.g1()?);
                proofs.push(BitProof {
                    commit_zero: r.g1()?,
                    commit_one: r.g1()?,
                    challenge_zero: r.scalar()?,
                    response_zero: r.scalar()?,
                    response_one: r.scalar()?,
                });
            }
            bit_commitments.push(coms);
            bit_proofs.push(proofs);
        }
        let commitments = (0..n_commit).map(|_| r.g1()).collect::<Result<_, _>>()?;
        let responses = (0..n_resp).map(|_| r.scalar()).collect::<Result<_, _>>()?;
        let challenge = r.scalar()?;
        r.finish()?;
        Ok(RegistrationProof {
            bit_commitments,
            bit_proofs,
            commitments,
            responses,
            challenge,
        })
    }
}

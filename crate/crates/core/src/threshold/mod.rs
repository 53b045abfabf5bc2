//! Threshold ElGamal in G1 for the reveal committee.
//!
//! A dealer samples a degree-`d` polynomial, hands member `i` the evaluation
//! at `i`, and publishes Feldman verification values `g1^{s_i}`. Any `d+1`
//! members decrypt by posting `c1^{s_i}` with a Chaum–Pedersen proof; the
//! shares are combined with Lagrange coefficients at zero.

mod bsgs;

use std::collections::BTreeSet;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::crypto::{Scalar, Transcript, G1};

pub use bsgs::bsgs_decode;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThresholdError {
    #[error("invalid threshold: n = {n}, d = {d} (need 1 <= d+1 <= n)")]
    InvalidThreshold { n: u32, d: u32 },
    #[error("encryption randomness must be non-zero")]
    ZeroRandomness,
    #[error("scalar of {bits} bits does not fit in {capacity} chunked bits")]
    ScalarTooLarge { bits: usize, capacity: usize },
    #[error("need {need} decryption shares, got {got}")]
    NotEnoughShares { need: usize, got: usize },
    #[error("decryption share from member {index} failed verification")]
    InvalidShareProof { index: u32 },
    #[error("duplicate decryption share from member {index}")]
    DuplicateShare { index: u32 },
    #[error("no committee member with index {index}")]
    UnknownMember { index: u32 },
    #[error("discrete log not in [0, 2^{bits})")]
    NotInRange { bits: u32 },
    #[error("unsupported decode width {bits}")]
    UnsupportedRange { bits: u32 },
    #[error("ciphertext layout mismatch")]
    LayoutMismatch,
}

/// Public side of one committee epoch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitteeKeySet {
    pub n: u32,
    pub d: u32,
    pub pk: G1,
    pub member_public_shares: Vec<(u32, G1)>,
    pub epoch: u64,
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyShare {
    pub index: u32,
    pub secret: Scalar,
}

impl std::fmt::Debug for ChunkOpening {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChunkOpening {{ chunks: {}, .. }}", self.values.len())
    }
}

impl std::fmt::Debug for KeyShare {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KeyShare {{ index: {}, .. }}", self.index)
    }
}

impl CommitteeKeySet {
    pub fn threshold(&self) -> usize {
        self.d as usize + 1
    }

    pub fn public_share(&self, index: u32) -> Option<G1> {
        self.member_public_shares
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, v)| *v)
    }

    pub fn verify_key_share(&self, share: &KeyShare) -> bool {
        self.public_share(share.index) == Some(G1::generator() * share.secret)
    }

    /// Checks that the verification values lie on one degree-`d` polynomial
    /// whose constant term is `pk`.
    pub fn is_consistent(&self) -> bool {
        if self.d + 1 > self.n || self.member_public_shares.len() != self.n as usize {
            return false;
        }
        let indices: Vec<u32> = self.member_public_shares.iter().map(|(i, _)| *i).collect();
        if indices != (1..=self.n).collect::<Vec<_>>() {
            return false;
        }
        let basis: Vec<u32> = (1..=self.d + 1).collect();
        let interpolate_at = |x: u32| -> G1 {
            lagrange_coefficients(&basis, x)
                .into_iter()
                .zip(&basis)
                .map(|(l, i)| self.member_public_shares[(*i - 1) as usize].1 * l)
                .sum()
        };
        interpolate_at(0) == self.pk
            && (self.d + 2..=self.n)
                .all(|i| interpolate_at(i) == self.member_public_shares[(i - 1) as usize].1)
    }
}

/// Lagrange coefficients for evaluating at `x` from the points `indices`.
pub fn lagrange_coefficients(indices: &[u32], x: u32) -> Vec<Scalar> {
    let x = Scalar::from_u64(u64::from(x));
    indices
        .iter()
        .map(|&i| {
            let xi = Scalar::from_u64(u64::from(i));
            let (num, den) = indices.iter().filter(|&&j| j != i).fold(
                (Scalar::ONE, Scalar::ONE),
                |(num, den), &j| {
                    let xj = Scalar::from_u64(u64::from(j));
                    (num * (x - xj), den * (xi - xj))
                },
            );
            num * den.invert().expect("indices are distinct")
        })
        .collect()
}

pub fn lagrange_at_zero(indices: &[u32]) -> Vec<Scalar> {
    lagrange_coefficients(indices, 0)
}

/// Dealer-based Shamir/Feldman setup. The polynomial is dropped on return.
pub fn committee_keygen<R: RngCore + CryptoRng>(
    n: u32,
    d: u32,
    epoch: u64,
    rng: &mut R,
) -> Result<(CommitteeKeySet, Vec<KeyShare>), ThresholdError> {
    if n == 0 || d + 1 > n {
        return Err(ThresholdError::InvalidThreshold { n, d });
    }
    let coefficients: Vec<Scalar> = (0..=d).map(|_| Scalar::random(rng)).collect();
    let shares: Vec<KeyShare> = (1..=n)
        .map(|i| {
            let x = Scalar::from_u64(u64::from(i));
            let secret = coefficients
                .iter()
                .rev()
                .fold(Scalar::ZERO, |acc, a| acc * x + *a);
            KeyShare { index: i, secret }
        })
        .collect();
    let keyset = CommitteeKeySet {
        n,
        d,
        pk: G1::generator() * coefficients[0],
        member_public_shares: shares
            .iter()
            .map(|s| (s.index, G1::generator() * s.secret))
            .collect(),
        epoch,
    };
    Ok((keyset, shares))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElGamalCiphertext {
    pub c1: G1,
    pub c2: G1,
}

pub fn encrypt_element(
    pk: &G1,
    message: &G1,
    rho: &Scalar,
) -> Result<ElGamalCiphertext, ThresholdError> {
    if rho.is_zero() {
        return Err(ThresholdError::ZeroRandomness);
    }
    Ok(ElGamalCiphertext {
        c1: G1::generator() * *rho,
        c2: *pk * *rho + *message,
    })
}

/// Decryption with the full secret; for dealers and test oracles.
pub fn decrypt_with_secret(ct: &ElGamalCiphertext, secret: &Scalar) -> G1 {
    ct.c2 - ct.c1 * *secret
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkLayout {
    pub chunk_bits: u32,
    pub chunk_count: u32,
}

impl Default for ChunkLayout {
    fn default() -> Self {
        ChunkLayout {
            chunk_bits: 16,
            chunk_count: 8,
        }
    }
}

impl ChunkLayout {
    pub fn capacity(&self) -> usize {
        (self.chunk_bits * self.chunk_count) as usize
    }

    /// `2^{chunk_bits · j}`.
    pub fn weight(&self, j: usize) -> Scalar {
        Scalar::from_u64(2).pow_u64(u64::from(self.chunk_bits) * j as u64)
    }

    pub fn split(&self, k: &Scalar) -> Result<Vec<u64>, ThresholdError> {
        let bits = k.bit_len();
        if bits > self.capacity() {
            return Err(ThresholdError::ScalarTooLarge {
                bits,
                capacity: self.capacity(),
            });
        }
        Ok((0..self.chunk_count as usize)
            .map(|j| k.bits_at(j * self.chunk_bits as usize, self.chunk_bits as usize))
            .collect())
    }

    pub fn recompose(&self, values: &[u64]) -> Scalar {
        values.iter().enumerate().fold(Scalar::ZERO, |acc, (j, v)| {
            acc + self.weight(j) * Scalar::from_u64(*v)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkedCiphertext {
    pub chunks: Vec<ElGamalCiphertext>,
    pub chunk_bits: u32,
}

impl ChunkedCiphertext {
    pub fn layout(&self) -> ChunkLayout {
        ChunkLayout {
            chunk_bits: self.chunk_bits,
            chunk_count: self.chunks.len() as u32,
        }
    }
}

/// Encryptor-side openings of a [`ChunkedCiphertext`].
#[derive(Clone, PartialEq, Eq)]
pub struct ChunkOpening {
    pub values: Vec<u64>,
    pub randomness: Vec<Scalar>,
}

/// Encrypts `g1^{v_j}` per chunk without range checks. Honest callers use
/// [`encrypt_scalar_chunked`].
pub fn encrypt_chunk_values<R: RngCore + CryptoRng>(
    pk: &G1,
    values: &[u64],
    chunk_bits: u32,
    rng: &mut R,
) -> (ChunkedCiphertext, ChunkOpening) {
    let randomness: Vec<Scalar> = values.iter().map(|_| Scalar::random_nonzero(rng)).collect();
    let chunks = values
        .iter()
        .zip(&randomness)
        .map(|(v, rho)| {
            encrypt_element(pk, &(G1::generator() * Scalar::from_u64(*v)), rho)
                .expect("randomness is non-zero")
        })
        .collect();
    (
        ChunkedCiphertext { chunks, chunk_bits },
        ChunkOpening {
            values: values.to_vec(),
            randomness,
        },
    )
}

pub fn encrypt_scalar_chunked<R: RngCore + CryptoRng>(
    pk: &G1,
    k: &Scalar,
    layout: ChunkLayout,
    rng: &mut R,
) -> Result<(ChunkedCiphertext, ChunkOpening), ThresholdError> {
    let values = layout.split(k)?;
    Ok(encrypt_chunk_values(pk, &values, layout.chunk_bits, rng))
}

/// Chaum–Pedersen proof that `log_g(V_i) = log_{c1}(value)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareProof {
    pub commit_base: G1,
    pub commit_c1: G1,
    pub response: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecryptionShare {
    pub index: u32,
    pub value: G1,
    pub proof: ShareProof,
}

fn share_challenge(
    index: u32,
    verification: &G1,
    ct: &ElGamalCiphertext,
    value: &G1,
    commit_base: &G1,
    commit_c1: &G1,
) -> Scalar {
    let mut t = Transcript::new(b"cp-share");
    t.append_u64(b"index", u64::from(index));
    t.append_g1(b"verification", verification);
    t.append_g1(b"c1", &ct.c1);
    t.append_g1(b"c2", &ct.c2);
    t.append_g1(b"value", value);
    t.append_g1(b"commit-base", commit_base);
    t.append_g1(b"commit-c1", commit_c1);
    t.challenge_scalar(b"c")
}

pub fn partial_decrypt<R: RngCore + CryptoRng>(
    share: &KeyShare,
    ct: &ElGamalCiphertext,
    rng: &mut R,
) -> DecryptionShare {
    let verification = G1::generator() * share.secret;
    let value = ct.c1 * share.secret;
    let nonce = Scalar::random(rng);
    let commit_base = G1::generator() * nonce;
    let commit_c1 = ct.c1 * nonce;
    let c = share_challenge(
        share.index,
        &verification,
        ct,
        &value,
        &commit_base,
        &commit_c1,
    );
    DecryptionShare {
        index: share.index,
        value,
        proof: ShareProof {
            commit_base,
            commit_c1,
            response: nonce + c * share.secret,
        },
    }
}

pub fn verify_share(
    keyset: &CommitteeKeySet,
    ct: &ElGamalCiphertext,
    share: &DecryptionShare,
) -> bool {
    let Some(verification) = keyset.public_share(share.index) else {
        return false;
    };
    let p = &share.proof;
    let c = share_challenge(
        share.index,
        &verification,
        ct,
        &share.value,
        &p.commit_base,
        &p.commit_c1,
    );
    G1::generator() * p.response == p.commit_base + verification * c
        && ct.c1 * p.response == p.commit_c1 + share.value * c
}

/// Recovers the plaintext element from at least `d+1` verified shares.
pub fn combine_shares(
    ct: &ElGamalCiphertext,
    shares: &[DecryptionShare],
    keyset: &CommitteeKeySet,
) -> Result<G1, ThresholdError> {
    let mut seen = BTreeSet::new();
    for s in shares {
        if !seen.insert(s.index) {
            return Err(ThresholdError::DuplicateShare { index: s.index });
        }
    }
    if shares.len() < keyset.threshold() {
        return Err(ThresholdError::NotEnoughShares {
            need: keyset.threshold(),
            got: shares.len(),
        });
    }
    for s in shares {
        if keyset.public_share(s.index).is_none() {
            return Err(ThresholdError::UnknownMember { index: s.index });
        }
        if !verify_share(keyset, ct, s) {
            return Err(ThresholdError::InvalidShareProof { index: s.index });
        }
    }
    let indices: Vec<u32> = shares.iter().map(|s| s.index).collect();
    let mask: G1 = lagrange_at_zero(&indices)
        .into_iter()
        .zip(shares)
        .map(|(l, s)| s.value * l)
        .sum();
    Ok(ct.c2 - mask)
}

/// Threshold-decrypts every chunk, decodes each exponent, and recomposes.
/// `shares[j]` holds the shares for chunk `j`.
pub fn decrypt_chunked(
    ct: &ChunkedCiphertext,
    shares: &[Vec<DecryptionShare>],
    keyset: &CommitteeKeySet,
) -> Result<Scalar, ThresholdError> {
    if shares.len() != ct.chunks.len() {
        return Err(ThresholdError::LayoutMismatch);
    }
    let values = ct
        .chunks
        .iter()
        .zip(shares)
        .map(|(chunk, s)| bsgs_decode(&combine_shares(chunk, s, keyset)?, ct.chunk_bits))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ct.layout().recompose(&values))
}

/// Each holder's shares for every chunk of `ct`, transposed to per-chunk order.
pub fn chunk_shares<R: RngCore + CryptoRng>(
    holders: &[KeyShare],
    ct: &ChunkedCiphertext,
    rng: &mut R,
) -> Vec<Vec<DecryptionShare>> {
    ct.chunks
        .iter()
        .map(|chunk| {
            holders
                .iter()
                .map(|h| partial_decrypt(h, chunk, rng))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    /// Independent oracle: interpolate secret shares at zero.
    fn interpolate_secret(shares: &[&KeyShare]) -> Scalar {
        let idx: Vec<u32> = shares.iter().map(|s| s.index).collect();
        lagrange_at_zero(&idx)
            .into_iter()
            .zip(shares)
            .fold(Scalar::ZERO, |acc, (l, s)| acc + l * s.secret)
    }

    fn subsets(n: u32, k: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                out.push((1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect());
            }
        }
        out
    }

    #[test]
    fn degenerate_committee() {
        let (ks, shares) = committee_keygen(1, 0, 1, &mut rng(1)).unwrap();
        assert_eq!(shares.len(), 1);
        assert_eq!(ks.pk, G1::generator() * shares[0].secret);
        assert!(ks.is_consistent());
    }

    #[test]
    fn invalid_thresholds() {
        assert_eq!(
            committee_keygen(3, 3, 1, &mut rng(1)).unwrap_err(),
            ThresholdError::InvalidThreshold { n: 3, d: 3 }
        );
        assert!(committee_keygen(0, 0, 1, &mut rng(1)).is_err());
    }

    #[test]
    fn every_quorum_interpolates_the_secret() {
        let (ks, shares) = committee_keygen(5, 2, 1, &mut rng(2)).unwrap();
        assert!(ks.is_consistent());
        for s in &shares {
            assert!(ks.verify_key_share(s));
        }
        let subs = subsets(5, 3);
        assert_eq!(subs.len(), 10);
        for sub in subs {
            let picked: Vec<&KeyShare> = sub.iter().map(|i| &shares[(*i - 1) as usize]).collect();
            assert_eq!(G1::generator() * interpolate_secret(&picked), ks.pk);
        }
    }

    #[test]
    fn tampered_keyset_is_inconsistent() {
        let (mut ks, _) = committee_keygen(5, 2, 1, &mut rng(3)).unwrap();
        ks.member_public_shares[4].1 += G1::generator();
        assert!(!ks.is_consistent());
    }

    #[test]
    fn encryption_contracts() {
        let mut r = rng(4);
        let (ks, shares) = committee_keygen(1, 0, 1, &mut r).unwrap();
        let rho = Scalar::random_nonzero(&mut r);
        let ct = encrypt_element(&ks.pk, &G1::identity(), &rho).unwrap();
        assert_eq!(ct.c2, ks.pk * rho);
        let m = G1::generator() * Scalar::random(&mut r);
        let ct = encrypt_element(&ks.pk, &m, &rho).unwrap();
        assert_eq!(decrypt_with_secret(&ct, &shares[0].secret), m);
        let ds = partial_decrypt(&shares[0], &ct, &mut r);
        assert_eq!(combine_shares(&ct, &[ds], &ks).unwrap(), m);
        let ct2 = encrypt_element(&ks.pk, &m, &Scalar::random_nonzero(&mut r)).unwrap();
        assert_ne!(ct, ct2);
        assert_eq!(
            encrypt_element(&ks.pk, &m, &Scalar::ZERO),
            Err(ThresholdError::ZeroRandomness)
        );
    }

    #[test]
    fn combine_matches_direct_decryption() {
        let mut r = rng(5);
        let (ks, shares) = committee_keygen(5, 2, 1, &mut r).unwrap();
        let all: Vec<&KeyShare> = shares.iter().collect();
        let secret = interpolate_secret(&all[..3]);
        for _ in 0..20 {
            let m = G1::generator() * Scalar::random(&mut r);
            let ct = encrypt_element(&ks.pk, &m, &Scalar::random_nonzero(&mut r)).unwrap();
            let ds: Vec<_> = [0usize, 2, 4]
                .iter()
                .map(|&i| partial_decrypt(&shares[i], &ct, &mut r))
                .collect();
            let out = combine_shares(&ct, &ds, &ks).unwrap();
            assert_eq!(out, decrypt_with_secret(&ct, &secret));
            assert_eq!(out, m);
        }
    }

    #[test]
    fn threshold_refusals() {
        let mut r = rng(6);
        let (ks, shares) = committee_keygen(5, 2, 1, &mut r).unwrap();
        let m = G1::generator() * Scalar::random(&mut r);
        let ct = encrypt_element(&ks.pk, &m, &Scalar::random_nonzero(&mut r)).unwrap();
        let mut ds: Vec<_> = shares[..3]
            .iter()
            .map(|s| partial_decrypt(s, &ct, &mut r))
            .collect();
        assert_eq!(
            combine_shares(&ct, &ds[..2], &ks),
            Err(ThresholdError::NotEnoughShares { need: 3, got: 2 })
        );
        ds[1].value += G1::generator();
        assert_eq!(
            combine_shares(&ct, &ds, &ks),
            Err(ThresholdError::InvalidShareProof { index: 2 })
        );
        let dup = vec![ds[0], ds[0], ds[2]];
        assert_eq!(
            combine_shares(&ct, &dup, &ks),
            Err(ThresholdError::DuplicateShare { index: 1 })
        );
    }

    #[test]
    fn forged_share_interpolates_wrong_message() {
        let mut r = rng(7);
        let (ks, shares) = committee_keygen(5, 2, 1, &mut r).unwrap();
        let m = G1::generator() * Scalar::random(&mut r);
        let ct = encrypt_element(&ks.pk, &m, &Scalar::random_nonzero(&mut r)).unwrap();
        let mut values: Vec<G1> = shares[..3].iter().map(|s| ct.c1 * s.secret).collect();
        values[2] = G1::generator() * Scalar::random(&mut r);
        let l = lagrange_at_zero(&[1, 2, 3]);
        let mask: G1 = l.into_iter().zip(&values).map(|(l, v)| *v * l).sum();
        assert_ne!(ct.c2 - mask, m);
    }

    #[test]
    fn shares_are_bound_to_ciphertext() {
        let mut r = rng(8);
        let (ks, shares) = committee_keygen(3, 1, 1, &mut r).unwrap();
        let m = G1::generator();
        let ct_a = encrypt_element(&ks.pk, &m, &Scalar::random_nonzero(&mut r)).unwrap();
        let ct_b = encrypt_element(&ks.pk, &m, &Scalar::random_nonzero(&mut r)).unwrap();
        let share = partial_decrypt(&shares[0], &ct_a, &mut r);
        assert!(verify_share(&ks, &ct_a, &share));
        assert!(!verify_share(&ks, &ct_b, &share));
        let mut wrong_index = share;
        wrong_index.index = 2;
        assert!(!verify_share(&ks, &ct_a, &wrong_index));
    }

    #[test]
    fn share_value_bit_flips_fail() {
        let mut r = rng(9);
        let (ks, shares) = committee_keygen(3, 1, 1, &mut r).unwrap();
        let ct =
            encrypt_element(&ks.pk, &G1::generator(), &Scalar::random_nonzero(&mut r)).unwrap();
        let share = partial_decrypt(&shares[1], &ct, &mut r);
        let bytes = share.value.to_bytes();
        for bit in 0..bytes.len() * 8 {
            let mut b = bytes;
            b[bit / 8] ^= 1 << (bit % 8);
            if let Ok(p) = G1::from_bytes(&b) {
                let mut s = share;
                s.value = p;
                assert!(!verify_share(&ks, &ct, &s), "bit {bit}");
            }
        }
    }

    #[test]
    fn chunked_contracts() {
        let mut r = rng(10);
        let (ks, shares) = committee_keygen(3, 1, 1, &mut r).unwrap();
        let layout = ChunkLayout::default();
        let (ct, opening) = encrypt_scalar_chunked(&ks.pk, &Scalar::ZERO, layout, &mut r).unwrap();
        assert!(opening.values.iter().all(|v| *v == 0));
        let secret = interpolate_secret(&shares.iter().collect::<Vec<_>>()[..2]);
        for chunk in &ct.chunks {
            assert!(decrypt_with_secret(chunk, &secret).is_identity());
        }
        let too_big = Scalar::from_u128(1) + Scalar::from_u128(u128::MAX);
        assert_eq!(
            encrypt_scalar_chunked(&ks.pk, &too_big, layout, &mut r).unwrap_err(),
            ThresholdError::ScalarTooLarge {
                bits: 129,
                capacity: 128
            }
        );
        for _ in 0..5 {
            let k = Scalar::random_bits(&mut r, 128);
            let (ct, _) = encrypt_scalar_chunked(&ks.pk, &k, layout, &mut r).unwrap();
            let per_chunk = chunk_shares(&shares[1..], &ct, &mut r);
            assert_eq!(decrypt_chunked(&ct, &per_chunk, &ks).unwrap(), k);
        }
    }

    #[test]
    fn oversized_chunk_fails_decode() {
        let mut r = rng(11);
        let (ks, shares) = committee_keygen(1, 0, 1, &mut r).unwrap();
        let (ct, _) = encrypt_chunk_values(&ks.pk, &[1 << 16, 0], 16, &mut r);
        let per_chunk = chunk_shares(&shares, &ct, &mut r);
        assert_eq!(
            decrypt_chunked(&ct, &per_chunk, &ks),
            Err(ThresholdError::NotInRange { bits: 16 })
        );
    }
}

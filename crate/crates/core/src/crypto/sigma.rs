//! Linear sigma-protocol machinery over G1.
//!
//! A statement is a list of equations `image = Σ base_k · w_{var_k}` over a
//! shared witness vector. The prover commits `T = Σ base_k · b_{var_k}` per
//! equation, the caller derives one challenge `c` from a transcript holding
//! every commitment, and the responses are `s_v = b_v + c · w_v`. A verifier
//! accepts an equation iff `Σ base_k · s_{var_k} = T + c · image`.
//!
//! Keeping the challenge outside this module lets several clauses (including
//! ones living in other groups) share witness variables and one challenge.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::group::{Scalar, G1};
use super::transcript::Transcript;

#[derive(Clone, Debug)]
pub struct LinearEquation {
    pub image: G1,
    pub terms: Vec<(usize, G1)>,
}

impl LinearEquation {
    pub fn new(image: G1, terms: Vec<(usize, G1)>) -> Self {
        LinearEquation { image, terms }
    }

    fn evaluate(&self, values: &[Scalar]) -> G1 {
        self.terms.iter().map(|(v, base)| *base * values[*v]).sum()
    }

    pub fn holds(&self, witness: &[Scalar]) -> bool {
        self.evaluate(witness) == self.image
    }

    pub fn commit(&self, blindings: &[Scalar]) -> G1 {
        self.evaluate(blindings)
    }

    pub fn check(&self, commitment: &G1, responses: &[Scalar], challenge: &Scalar) -> bool {
        if self.terms.iter().any(|(v, _)| *v >= responses.len()) {
            return false;
        }
        self.evaluate(responses) == *commitment + self.image * *challenge
    }
}

pub fn random_blindings<R: RngCore + CryptoRng>(rng: &mut R, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| Scalar::random(rng)).collect()
}

pub fn respond(blindings: &[Scalar], witness: &[Scalar], challenge: &Scalar) -> Vec<Scalar> {
    blindings
        .iter()
        .zip(witness)
        .map(|(b, w)| *b + *challenge * *w)
        .collect()
}

/// Self-contained proof for a set of linear equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProof {
    pub commitments: Vec<G1>,
    pub responses: Vec<Scalar>,
    pub challenge: Scalar,
}

impl LinearProof {
    pub fn prove<R: RngCore + CryptoRng>(
        equations: &[LinearEquation],
        witness: &[Scalar],
        transcript: &mut Transcript,
        rng: &mut R,
    ) -> LinearProof {
        let blindings = random_blindings(rng, witness.len());
        let commitments: Vec<G1> = equations.iter().map(|e| e.commit(&blindings)).collect();
        absorb_equations(transcript, equations, &commitments);
        let challenge = transcript.challenge_scalar(b"linear-challenge");
        LinearProof {
            commitments,
            responses: respond(&blindings, witness, &challenge),
            challenge,
        }
    }

    pub fn verify(&self, equations: &[LinearEquation], transcript: &mut Transcript) -> bool {
        if self.commitments.len() != equations.len() {
            return false;
        }
        let all_hold = equations
            .iter()
            .zip(&self.commitments)
            .all(|(e, t)| e.check(t, &self.responses, &self.challenge));
        absorb_equations(transcript, equations, &self.commitments);
        all_hold && transcript.challenge_scalar(b"linear-challenge") == self.challenge
    }
}

/// Binds equation images and the prover's commitments into the transcript.
/// Bases are fixed by the caller's protocol and are not re-absorbed.
pub fn absorb_equations(t: &mut Transcript, equations: &[LinearEquation], commitments: &[G1]) {
    t.append_u64(b"eq-count", equations.len() as u64);
    for (e, c) in equations.iter().zip(commitments) {
        t.append_g1(b"eq-image", &e.image);
        t.append_g1(b"eq-commit", c);
    }
}

/// OR-proof that a Pedersen commitment `B = g·b + h·s` opens to `b ∈ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitProof {
    pub commit_zero: G1,
    pub commit_one: G1,
    pub challenge_zero: Scalar,
    pub response_zero: Scalar,
    pub response_one: Scalar,
}

/// First move of a [`BitProof`]; the simulated branch is fixed here.
pub struct BitProver {
    bit: bool,
    opening: Scalar,
    nonce: Scalar,
    simulated_challenge: Scalar,
    simulated_response: Scalar,
    pub commit_zero: G1,
    pub commit_one: G1,
}

impl BitProver {
    pub fn commit<R: RngCore + CryptoRng>(
        g: &G1,
        h: &G1,
        commitment: &G1,
        bit: bool,
        opening: Scalar,
        rng: &mut R,
    ) -> Self {
        let nonce = Scalar::random(rng);
        let simulated_challenge = Scalar::random(rng);
        let simulated_response = Scalar::random(rng);
        let real = *h * nonce;
        // statement for branch b: commitment - b·g = h·s
        let (commit_zero, commit_one) = if bit {
            let fake = *h * simulated_response - *commitment * simulated_challenge;
            (fake, real)
        } else {
            let fake = *h * simulated_response - (*commitment - *g) * simulated_challenge;
            (real, fake)
        };
        BitProver {
            bit,
            opening,
            nonce,
            simulated_challenge,
            simulated_response,
            commit_zero,
            commit_one,
        }
    }

    pub fn respond(self, challenge: &Scalar) -> BitProof {
        let real_challenge = *challenge - self.simulated_challenge;
        let real_response = self.nonce + real_challenge * self.opening;
        if self.bit {
            BitProof {
                commit_zero: self.commit_zero,
                commit_one: self.commit_one,
                challenge_zero: self.simulated_challenge,
                response_zero: self.simulated_response,
                response_one: real_response,
            }
        } else {
            BitProof {
                commit_zero: self.commit_zero,
                commit_one: self.commit_one,
                challenge_zero: real_challenge,
                response_zero: real_response,
                response_one: self.simulated_response,
            }
        }
    }
}

impl BitProof {
    pub fn check(&self, g: &G1, h: &G1, commitment: &G1, challenge: &Scalar) -> bool {
        let challenge_one = *challenge - self.challenge_zero;
        *h * self.response_zero == self.commit_zero + *commitment * self.challenge_zero
            && *h * self.response_one == self.commit_one + (*commitment - *g) * challenge_one
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::pedersen::CommitmentKey;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn dlog_eq_statement(x: Scalar, base2: G1) -> Vec<LinearEquation> {
        vec![
            LinearEquation::new(G1::generator() * x, vec![(0, G1::generator())]),
            LinearEquation::new(base2 * x, vec![(0, base2)]),
        ]
    }

    #[test]
    fn linear_proof_completeness_and_soundness_smoke() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = Scalar::random(&mut rng);
        let base2 = G1::generator() * Scalar::random(&mut rng);
        let eqs = dlog_eq_statement(x, base2);
        let proof = LinearProof::prove(&eqs, &[x], &mut Transcript::new(b"t"), &mut rng);
        assert!(proof.verify(&eqs, &mut Transcript::new(b"t")));
        assert!(!proof.verify(&eqs, &mut Transcript::new(b"other")));

        // wrong witness: second image uses a different exponent
        let mut bad = eqs.clone();
        bad[1].image = base2 * (x + Scalar::ONE);
        let forged = LinearProof::prove(&bad, &[x], &mut Transcript::new(b"t"), &mut rng);
        assert!(!forged.verify(&bad, &mut Transcript::new(b"t")));

        let mut tampered = proof.clone();
        tampered.challenge += Scalar::ONE;
        assert!(!tampered.verify(&eqs, &mut Transcript::new(b"t")));
    }

    #[test]
    fn bit_proofs() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let ck = CommitmentKey::default();
        for bit in [false, true] {
            let s = Scalar::random(&mut rng);
            let b = if bit { Scalar::ONE } else { Scalar::ZERO };
            let c = ck.commit(&b, &s).0;
            let prover = BitProver::commit(&ck.g, &ck.h, &c, bit, s, &mut rng);
            let ch = Scalar::random(&mut rng);
            let proof = prover.respond(&ch);
            assert!(proof.check(&ck.g, &ck.h, &c, &ch));
            assert!(!proof.check(&ck.g, &ck.h, &c, &(ch + Scalar::ONE)));
        }
        // commitment to 2 cannot pass either branch
        let s = Scalar::random(&mut rng);
        let c = ck.commit(&Scalar::from_u64(2), &s).0;
        for claimed in [false, true] {
            let prover = BitProver::commit(&ck.g, &ck.h, &c, claimed, s, &mut rng);
            let ch = Scalar::random(&mut rng);
            assert!(!prover.respond(&ch).check(&ck.g, &ck.h, &c, &ch));
        }
    }
}

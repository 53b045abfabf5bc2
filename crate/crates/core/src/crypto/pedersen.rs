use serde::{Deserialize, Serialize};

use super::group::{hash_to_g1, Scalar, G1};

/// Bases `(g, h)` with `h` hashed from a fixed tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentKey {
    pub g: G1,
    pub h: G1,
}

impl CommitmentKey {
    pub fn new(tag: &[u8]) -> Self {
        CommitmentKey {
            g: G1::generator(),
            h: hash_to_g1(tag),
        }
    }

    pub fn commit(&self, m: &Scalar, r: &Scalar) -> PedersenCommitment {
        PedersenCommitment(self.g * *m + self.h * *r)
    }
}

impl Default for CommitmentKey {
    fn default() -> Self {
        CommitmentKey::new(b"idchain-h")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PedersenCommitment(pub G1);

impl PedersenCommitment {
    pub fn point(&self) -> G1 {
        self.0
    }
}

impl std::ops::Add for PedersenCommitment {
    type Output = PedersenCommitment;
    fn add(self, rhs: Self) -> Self {
        PedersenCommitment(self.0 + rhs.0)
    }
}

pub fn pedersen_commit(key: &CommitmentKey, m: &Scalar, r: &Scalar) -> PedersenCommitment {
    key.commit(m, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn key_is_well_formed() {
        let k = CommitmentKey::default();
        assert!(!k.g.is_identity());
        assert!(!k.h.is_identity());
        assert_ne!(k.g, k.h);
    }

    #[test]
    fn zero_opening_is_identity() {
        let k = CommitmentKey::default();
        assert!(pedersen_commit(&k, &Scalar::ZERO, &Scalar::ZERO)
            .0
            .is_identity());
    }

    #[test]
    fn homomorphic() {
        let k = CommitmentKey::default();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..8 {
            let (a, b, r, s) = (
                Scalar::random(&mut rng),
                Scalar::random(&mut rng),
                Scalar::random(&mut rng),
                Scalar::random(&mut rng),
            );
            assert_eq!(
                k.commit(&a, &r) + k.commit(&b, &s),
                k.commit(&(a + b), &(r + s))
            );
        }
    }

    #[test]
    fn hiding_randomness_matters() {
        let k = CommitmentKey::default();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let m = Scalar::random(&mut rng);
        let r1 = Scalar::random(&mut rng);
        let r2 = Scalar::random(&mut rng);
        assert_ne!(r1, r2);
        assert_ne!(k.commit(&m, &r1), k.commit(&m, &r2));
    }
}

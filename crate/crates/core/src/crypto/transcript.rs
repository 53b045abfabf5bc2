//! Fiat–Shamir transcript.

use sha2::{Digest, Sha512};

use super::group::{Gt, Scalar, G1, G2};

/// Running hash over a protocol label and length-prefixed `(label, bytes)` pairs.
#[derive(Clone)]
pub struct Transcript {
    state: Sha512,
}

impl Transcript {
    pub fn new(domain: &'static [u8]) -> Self {
        let mut t = Transcript {
            state: Sha512::new(),
        };
        t.append_message(b"dom-sep", domain);
        t
    }

    pub fn append_message(&mut self, label: &[u8], message: &[u8]) {
        self.state.update((label.len() as u64).to_be_bytes());
        self.state.update(label);
        self.state.update((message.len() as u64).to_be_bytes());
        self.state.update(message);
    }

    pub fn append_u64(&mut self, label: &[u8], v: u64) {
        self.append_message(label, &v.to_be_bytes());
    }

    pub fn append_scalar(&mut self, label: &[u8], s: &Scalar) {
        self.append_message(label, &s.to_bytes());
    }

    pub fn append_g1(&mut self, label: &[u8], p: &G1) {
        self.append_message(label, &p.to_bytes());
    }

    pub fn append_g2(&mut self, label: &[u8], p: &G2) {
        self.append_message(label, &p.to_bytes());
    }

    pub fn append_gt(&mut self, label: &[u8], p: &Gt) {
        self.append_message(label, &p.to_bytes());
    }

    /// Derives a challenge and folds it back into the state, so successive
    /// calls never repeat.
    pub fn challenge_scalar(&mut self, label: &[u8]) -> Scalar {
        let mut fork = self.state.clone();
        fork.update(b"challenge");
        fork.update((label.len() as u64).to_be_bytes());
        fork.update(label);
        let digest = fork.finalize();
        let c = Scalar::from_bytes_mod_order(&digest);
        self.append_message(b"challenge-out", &digest);
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_sequence_same_challenge() {
        let mut a = Transcript::new(b"test");
        let mut b = Transcript::new(b"test");
        a.append_message(b"x", b"hello");
        b.append_message(b"x", b"hello");
        assert_eq!(a.challenge_scalar(b"c"), b.challenge_scalar(b"c"));
    }

    #[test]
    fn one_byte_difference_changes_challenge() {
        let mut a = Transcript::new(b"test");
        let mut b = Transcript::new(b"test");
        a.append_message(b"x", b"hello");
        b.append_message(b"x", b"hellp");
        assert_ne!(a.challenge_scalar(b"c"), b.challenge_scalar(b"c"));
    }

    #[test]
    fn label_and_boundaries_are_bound() {
        let mut a = Transcript::new(b"test");
        let mut b = Transcript::new(b"test");
        a.append_message(b"ab", b"c");
        b.append_message(b"a", b"bc");
        assert_ne!(a.challenge_scalar(b"c"), b.challenge_scalar(b"c"));
        let mut c = Transcript::new(b"other");
        let mut d = Transcript::new(b"test");
        assert_ne!(c.challenge_scalar(b"c"), d.challenge_scalar(b"c"));
    }

    #[test]
    fn successive_challenges_differ() {
        let mut t = Transcript::new(b"test");
        let c1 = t.challenge_scalar(b"c");
        let c2 = t.challenge_scalar(b"c");
        assert_ne!(c1, c2);
    }
}

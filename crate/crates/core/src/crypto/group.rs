//! Scalar and group element newtypes over BLS12-381.
//!
//! Encodings are fixed length: scalars are 32 bytes big-endian, G1 and G2
//! use the compressed point format (48 and 96 bytes), Gt uses the backend's
//! compressed 576-byte form. JSON carries all of them as lowercase hex.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use ark_bls12_381::{Bls12_381, Fr, G1Projective, G2Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup};
use ark_ff::field_hashers::DefaultFieldHasher;
use ark_ff::{AdditiveGroup, BigInteger, Field, PrimeField, UniformRand, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256, Sha512};

use super::CryptoError;

pub const SCALAR_BYTES: usize = 32;
pub const G1_BYTES: usize = 48;
pub const G2_BYTES: usize = 96;
pub const GT_BYTES: usize = 576;

const HASH_TO_G1_DST: &[u8] = b"IDCHAIN-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_";
const HASH_TO_SCALAR_DST: &[u8] = b"idchain/hash-to-scalar/v1";

/// Integer modulo the prime group order.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct Scalar(pub(crate) Fr);

impl Scalar {
    pub const ZERO: Scalar = Scalar(Fr::ZERO);
    pub const ONE: Scalar = Scalar(Fr::ONE);

    pub fn from_u64(v: u64) -> Self {
        Scalar(Fr::from(v))
    }

    pub fn from_u128(v: u128) -> Self {
        Scalar(Fr::from(v))
    }

    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar(Fr::rand(rng))
    }

    /// Uniform non-zero scalar.
    pub fn random_nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = Self::random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// Uniform scalar in `[0, 2^bits)`.
    pub fn random_bits<R: RngCore + CryptoRng>(rng: &mut R, bits: u32) -> Self {
        assert!(bits <= 248, "bit length {bits} exceeds scalar capacity");
        let mut bytes = [0u8; SCALAR_BYTES];
        rng.fill_bytes(&mut bytes);
        let full = (bits / 8) as usize;
        let rem = bits % 8;
        let keep = full + usize::from(rem != 0);
        for b in bytes.iter_mut().take(SCALAR_BYTES - keep) {
            *b = 0;
        }
        if rem != 0 {
            bytes[SCALAR_BYTES - keep] &= (1u8 << rem) - 1;
        }
        Scalar(Fr::from_be_bytes_mod_order(&bytes))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn invert(&self) -> Result<Scalar, CryptoError> {
        self.0.inverse().map(Scalar).ok_or(CryptoError::ZeroInverse)
    }

    pub fn pow_u64(&self, e: u64) -> Scalar {
        Scalar(self.0.pow([e]))
    }

    /// Number of significant bits of the canonical representative.
    pub fn bit_len(&self) -> usize {
        self.0.into_bigint().num_bits() as usize
    }

    /// Reads `len ≤ 64` bits starting at bit `offset` (little-endian bit order).
    pub fn bits_at(&self, offset: usize, len: usize) -> u64 {
        assert!(len <= 64);
        let bits = self.0.into_bigint().to_bits_le();
        let mut out = 0u64;
        for i in 0..len {
            if bits.get(offset + i).copied().unwrap_or(false) {
                out |= 1 << i;
            }
        }
        out
    }

    pub fn to_bytes(&self) -> [u8; SCALAR_BYTES] {
        let mut out = [0u8; SCALAR_BYTES];
        out.copy_from_slice(&self.0.into_bigint().to_bytes_be());
        out
    }

    /// Canonical decoding; values ≥ q are rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != SCALAR_BYTES {
            return Err(CryptoError::Decode("scalar length"));
        }
        let mut le = bytes.to_vec();
        le.reverse();
        Fr::deserialize_compressed(&le[..])
            .map(Scalar)
            .map_err(|_| CryptoError::Decode("scalar out of range"))
    }

    pub fn from_bytes_mod_order(bytes: &[u8]) -> Self {
        Scalar(Fr::from_be_bytes_mod_order(bytes))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_bytes().hash(state)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl From<u64> for Scalar {
    fn from(v: u64) -> Self {
        Scalar::from_u64(v)
    }
}

macro_rules! curve_point {
    ($name:ident, $inner:ty, $len:expr, $label:literal) => {
        #[derive(Clone, Copy, PartialEq, Eq)]
        pub struct $name(pub(crate) $inner);

        impl $name {
            pub fn generator() -> Self {
                $name(<$inner>::generator())
            }

            pub fn identity() -> Self {
                $name(<$inner>::zero())
            }

            pub fn is_identity(&self) -> bool {
                self.0.is_zero()
            }

            pub fn to_bytes(&self) -> [u8; $len] {
                let mut out = [0u8; $len];
                self.0
                    .into_affine()
                    .serialize_compressed(&mut out[..])
                    .expect("fixed-size buffer");
                out
            }

            /// Decodes a compressed point, checking curve and subgroup membership.
            pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
                if bytes.len() != $len {
                    return Err(CryptoError::Decode(concat!($label, " length")));
                }
                <$inner as CurveGroup>::Affine::deserialize_compressed(bytes)
                    .map(|p| $name(p.into()))
                    .map_err(|_| CryptoError::Decode(concat!($label, " not on curve")))
            }
        }

        impl Default for $name {
            fn default() -> Self {
                Self::identity()
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($label, "({})"), hex::encode(self.to_bytes()))
            }
        }

        impl Hash for $name {
            fn hash<H: Hasher>(&self, state: &mut H) {
                self.to_bytes().hash(state)
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                $name(self.0 + rhs.0)
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: $name) {
                self.0 += rhs.0;
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                $name(self.0 - rhs.0)
            }
        }

        impl SubAssign for $name {
            fn sub_assign(&mut self, rhs: $name) {
                self.0 -= rhs.0;
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(-self.0)
            }
        }

        impl Mul<Scalar> for $name {
            type Output = $name;
            fn mul(self, rhs: Scalar) -> $name {
                $name(self.0 * rhs.0)
            }
        }

        impl Mul<&Scalar> for &$name {
            type Output = $name;
            fn mul(self, rhs: &Scalar) -> $name {
                $name(self.0 * rhs.0)
            }
        }

        impl std::iter::Sum for $name {
            fn sum<I: Iterator<Item = $name>>(iter: I) -> $name {
                iter.fold($name::identity(), |a, b| a + b)
            }
        }
    };
}

curve_point!(G1, G1Projective, G1_BYTES, "G1");
curve_point!(G2, G2Projective, G2_BYTES, "G2");

/// Target group element, written additively like the source groups.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Gt(pub(crate) PairingOutput<Bls12_381>);

impl Gt {
    pub fn identity() -> Self {
        Gt(PairingOutput::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(GT_BYTES);
        self.0
            .serialize_compressed(&mut out)
            .expect("vec writer is infallible");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != GT_BYTES {
            return Err(CryptoError::Decode("Gt length"));
        }
        PairingOutput::<Bls12_381>::deserialize_compressed(bytes)
            .map(Gt)
            .map_err(|_| CryptoError::Decode("Gt element"))
    }
}

impl fmt::Debug for Gt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.to_bytes();
        write!(f, "Gt({}..)", hex::encode(&bytes[..16]))
    }
}

impl Add for Gt {
    type Output = Gt;
    fn add(self, rhs: Gt) -> Gt {
        Gt(self.0 + rhs.0)
    }
}

impl Sub for Gt {
    type Output = Gt;
    fn sub(self, rhs: Gt) -> Gt {
        Gt(self.0 - rhs.0)
    }
}

impl Mul<Scalar> for Gt {
    type Output = Gt;
    fn mul(self, rhs: Scalar) -> Gt {
        Gt(self.0 * rhs.0)
    }
}

pub fn pairing(a: &G1, b: &G2) -> Gt {
    Gt(Bls12_381::pairing(a.0, b.0))
}

/// Product of pairings, computed with a single final exponentiation.
pub fn multi_pairing(pairs: &[(G1, G2)]) -> Gt {
    let (a, b): (Vec<_>, Vec<_>) = pairs
        .iter()
        .map(|(p, q)| (p.0.into_affine(), q.0.into_affine()))
        .unzip();
    Gt(Bls12_381::multi_pairing(a, b))
}

pub fn hash_to_scalar(bytes: &[u8]) -> Scalar {
    let mut h = Sha512::new();
    h.update((HASH_TO_SCALAR_DST.len() as u64).to_be_bytes());
    h.update(HASH_TO_SCALAR_DST);
    h.update(bytes);
    Scalar::from_bytes_mod_order(&h.finalize())
}

/// Hashes a domain tag onto G1 with the SSWU map; the output has unknown
/// discrete log relative to the generator.
pub fn hash_to_g1(tag: &[u8]) -> G1 {
    let hasher = MapToCurveBasedHasher::<
        G1Projective,
        DefaultFieldHasher<Sha256, 128>,
        WBMap<ark_bls12_381::g1::Config>,
    >::new(HASH_TO_G1_DST)
    .expect("static domain separation tag");
    let p = hasher.hash(tag).expect("hash to curve is total");
    let p = G1(p.into());
    debug_assert!(!p.is_identity());
    p
}

/// Lowercase-hex serde for the fixed-length encodings above.
macro_rules! hex_serde {
    ($name:ident) => {
        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&hex::encode(self.to_bytes()))
            }
        }

        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = <std::borrow::Cow<'de, str>>::deserialize(d)?;
                let bytes = hex::decode(text.as_ref()).map_err(serde::de::Error::custom)?;
                $name::from_bytes(&bytes).map_err(serde::de::Error::custom)
            }
        }
    };
}

hex_serde!(Scalar);
hex_serde!(G1);
hex_serde!(G2);
hex_serde!(Gt);

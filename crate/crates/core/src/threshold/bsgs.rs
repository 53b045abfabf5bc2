//! Baby-step giant-step decoding of small exponents `g1^k`, `0 ≤ k < 2^bits`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ark_bls12_381::G1Projective;
use ark_ec::CurveGroup;

use super::ThresholdError;
use crate::crypto::G1;

/// Giant steps are normalized to affine in batches of this size.
const GIANT_BATCH: usize = 32;

struct BabyTable {
    baby_bits: u32,
    entries: HashMap<[u8; 48], u32>,
    giant_stride: G1Projective,
}

fn point_key(p: &ark_bls12_381::G1Affine) -> [u8; 48] {
    use ark_serialize::CanonicalSerialize;
    let mut key = [0u8; 48];
    p.serialize_compressed(&mut key[..])
        .expect("fixed-size buffer");
    key
}

impl BabyTable {
    fn build(bits: u32) -> Self {
        let baby_bits = bits.div_ceil(2);
        let size = 1usize << baby_bits;
        let g = G1::generator().0;
        let mut points = Vec::with_capacity(size);
        let mut acc = G1::identity().0;
        for _ in 0..size {
            points.push(acc);
            acc += g;
        }
        let affine = G1Projective::normalize_batch(&points);
        let entries = affine
            .iter()
            .enumerate()
            .map(|(j, p)| (point_key(p), j as u32))
            .collect();
        BabyTable {
            baby_bits,
            entries,
            giant_stride: acc,
        }
    }
}

fn table_for(bits: u32) -> Arc<BabyTable> {
    static TABLES: OnceLock<Mutex<HashMap<u32, Arc<BabyTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    let mut guard = tables.lock().expect("table cache poisoned");
    guard
        .entry(bits)
        .or_insert_with(|| Arc::new(BabyTable::build(bits)))
        .clone()
}

/// Returns `k` with `g1^k = point` when `k < 2^bits`; `NotInRange` otherwise.
pub fn bsgs_decode(point: &G1, bits: u32) -> Result<u64, ThresholdError> {
    if bits == 0 || bits > 40 {
        return Err(ThresholdError::UnsupportedRange { bits });
    }
    let table = table_for(bits);
    let giant_count = 1u64 << (bits - table.baby_bits);
    let bound = 1u64 << bits;

    let mut current = point.0;
    let mut i = 0u64;
    while i < giant_count {
        let batch = GIANT_BATCH.min((giant_count - i) as usize);
        let mut block = Vec::with_capacity(batch);
        for _ in 0..batch {
            block.push(current);
            current -= table.giant_stride;
        }
        for (offset, p) in G1Projective::normalize_batch(&block).iter().enumerate() {
            if let Some(&j) = table.entries.get(&point_key(p)) {
                let k = ((i + offset as u64) << table.baby_bits) + u64::from(j);
                if k < bound {
                    return Ok(k);
                }
            }
        }
        i += batch as u64;
    }
    Err(ThresholdError::NotInRange { bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::Scalar;

    fn g(k: u64) -> G1 {
        G1::generator() * Scalar::from_u64(k)
    }

    #[test]
    fn identity_decodes_to_zero() {
        assert_eq!(bsgs_decode(&G1::identity(), 16), Ok(0));
    }

    #[test]
    fn max_value_and_boundary() {
        assert_eq!(bsgs_decode(&g(65535), 16), Ok(65535));
        assert_eq!(
            bsgs_decode(&g(1 << 16), 16),
            Err(ThresholdError::NotInRange { bits: 16 })
        );
    }

    #[test]
    fn odd_bit_widths() {
        for bits in [1u32, 3, 9, 17] {
            let max = (1u64 << bits) - 1;
            for k in [0, 1, max / 2, max] {
                assert_eq!(bsgs_decode(&g(k), bits), Ok(k), "bits={bits} k={k}");
            }
            assert!(bsgs_decode(&g(max + 1), bits).is_err());
        }
    }

    #[test]
    fn sweep_small_range() {
        for k in 0..1024 {
            assert_eq!(bsgs_decode(&g(k), 10), Ok(k));
        }
    }

    #[test]
    fn large_exponent_not_in_range() {
        let p = G1::generator() * Scalar::from_u128(u128::MAX);
        assert!(bsgs_decode(&p, 16).is_err());
    }
}

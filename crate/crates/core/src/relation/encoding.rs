//! Length-prefixed segment lists: `u32 count`, then `u32 len ‖ bytes` per
//! segment, all big-endian.

use crate::crypto::{Gt, Scalar, G1, G1_BYTES, GT_BYTES, SCALAR_BYTES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("proof decode error: {0}")]
pub struct DecodeError(pub &'static str);

pub(crate) fn join(segments: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(segments.len() as u32).to_be_bytes());
    for s in segments {
        out.extend_from_slice(&(s.len() as u32).to_be_bytes());
        out.extend_from_slice(s);
    }
    out
}

pub(crate) fn split(bytes: &[u8]) -> Result<Vec<Vec<u8>>, DecodeError> {
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8], DecodeError> {
        let end = pos.checked_add(n).ok_or(DecodeError("length overflow"))?;
        let s = bytes.get(pos..end).ok_or(DecodeError("truncated"))?;
        pos = end;
        Ok(s)
    };
    let count = u32::from_be_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
    let mut out = Vec::with_capacity(count.min(4096));
    for _ in 0..count {
        let len = u32::from_be_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        out.push(take(len)?.to_vec());
    }
    if pos != bytes.len() {
        return Err(DecodeError("trailing bytes"));
    }
    Ok(out)
}

pub(crate) struct Reader<'a> {
    segments: std::slice::Iter<'a, Vec<u8>>,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(segments: &'a [Vec<u8>]) -> Self {
        Reader {
            segments: segments.iter(),
        }
    }

    fn next(&mut self, len: usize) -> Result<&'a [u8], DecodeError> {
        let s = self.segments.next().ok_or(DecodeError("missing segment"))?;
        if s.len() != len {
            return Err(DecodeError("segment length"));
        }
        Ok(s)
    }

    pub(crate) fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(
            self.next(4)?.try_into().expect("4 bytes"),
        ))
    }

    pub(crate) fn scalar(&mut self) -> Result<Scalar, DecodeError> {
        Scalar::from_bytes(self.next(SCALAR_BYTES)?).map_err(|_| DecodeError("scalar"))
    }

    pub(crate) fn g1(&mut self) -> Result<G1, DecodeError> {
        G1::from_bytes(self.next(G1_BYTES)?).map_err(|_| DecodeError("G1 point"))
    }

    pub(crate) fn gt(&mut self) -> Result<Gt, DecodeError> {
        Gt::from_bytes(self.next(GT_BYTES)?).map_err(|_| DecodeError("Gt element"))
    }

    /// Segment holding `u32 index ‖ scalar`.
    pub(crate) fn indexed_scalar(&mut self) -> Result<(usize, Scalar), DecodeError> {
        let s = self.next(4 + SCALAR_BYTES)?;
        let i = u32::from_be_bytes(s[..4].try_into().expect("4 bytes")) as usize;
        let v = Scalar::from_bytes(&s[4..]).map_err(|_| DecodeError("scalar"))?;
        Ok((i, v))
    }

    pub(crate) fn finish(mut self) -> Result<(), DecodeError> {
        match self.segments.next() {
            Some(_) => Err(DecodeError("extra segments")),
            None => Ok(()),
        }
    }
}

pub(crate) fn indexed(i: usize, bytes: &[u8]) -> Vec<u8> {
    let mut out = (i as u32).to_be_bytes().to_vec();
    out.extend_from_slice(bytes);
    out
}

//! Operand traces: the `(a, b)` pairs a run fed its multiplier.
//!
//! On disk a trace is a headerless stream of 8-byte records, each the two
//! binary32 bit patterns `a` then `b` in little-endian order.

use std::io::{self, Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::metrics::block_rng;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperandTrace {
    pub pairs: Vec<(u32, u32)>,
}

impl OperandTrace {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, a: f32, b: f32) {
        self.pairs.push((a.to_bits(), b.to_bits()));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut buf = Vec::with_capacity(self.pairs.len() * 8);
        for &(a, b) in &self.pairs {
            buf.extend_from_slice(&a.to_le_bytes());
            buf.extend_from_slice(&b.to_le_bytes());
        }
        out.write_all(&buf)?;
        out.flush()
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut buf = Vec::new();
        input.read_to_end(&mut buf)?;
        if buf.len() % 8 != 0 {
            return Err(Error::Parse(format!("trace length {} is not a multiple of 8", buf.len())));
        }
        let pairs = buf
            .chunks_exact(8)
            .map(|r| {
                let a = u32::from_le_bytes([r[0], r[1], r[2], r[3]]);
                let b = u32::from_le_bytes([r[4], r[5], r[6], r[7]]);
                (a, b)
            })
            .collect();
        Ok(OperandTrace { pairs })
    }
}

/// Picks `chunks` start offsets uniformly at random and concatenates the
/// `chunk_len` consecutive pairs following each. Chunks may overlap.
pub fn trace_sample(trace: &OperandTrace, chunks: usize, chunk_len: usize, seed: u64) -> Result<OperandTrace> {
    if trace.len() < chunk_len {
        return Err(Error::TraceTooShort { len: trace.len(), chunk_len });
    }
    let mut rng = block_rng(seed, 0);
    let last_start = trace.len() - chunk_len;
    let mut pairs = Vec::with_capacity(chunks * chunk_len);
    for _ in 0..chunks {
        let start = rng.gen_range(0..=last_start);
        pairs.extend_from_slice(&trace.pairs[start..start + chunk_len]);
    }
    Ok(OperandTrace { pairs })
}

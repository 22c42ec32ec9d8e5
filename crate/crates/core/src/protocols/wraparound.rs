//! Wrap-around layout for simulate-and-infer.
//!
//! Bits from all users form one stream. Stream position `q` is coordinate
//! `q mod L` of simulated sample `q / L`, so user `k` (starting at
//! `start_k = (l_1 + ... + l_{k-1}) mod L`) sends coordinates
//! `start_k, start_k + 1, ...` of its own `L`-dimensional vector, wrapping at
//! `L`. With equal budgets dividing `L` this is the plain block layout.

use crate::bpmt::BitSampleMatrix;
use crate::error::{Error, Result};

pub fn wraparound_starts(lengths: &[usize], dim: usize) -> Vec<usize> {
    let mut pos = 0usize;
    lengths
        .iter()
        .map(|&len| {
            let start = pos % dim;
            pos += len;
            start
        })
        .collect()
}

/// The `len` bits user-side: coordinates `(start + j) mod L` of `quantized`.
pub fn wraparound_message(quantized: &[bool], start: usize, len: usize) -> Vec<bool> {
    let dim = quantized.len();
    (0..len).map(|j| quantized[(start + j) % dim]).collect()
}

/// Rebuilds the `floor(sum l_k / L)` complete simulated samples; bits past the
/// last complete sample are dropped.
pub fn assemble_wraparound(messages: &[Vec<bool>], dim: usize) -> Result<BitSampleMatrix> {
    if dim == 0 {
        return Err(Error::Dimension("assembly dimension must be >= 1".into()));
    }
    if let Some((k, m)) = messages.iter().enumerate().find(|(_, m)| m.len() > dim) {
        return Err(Error::Parameter(format!(
            "user {k} sent {} bits, more than the assembly dimension {dim}",
            m.len()
        )));
    }
    let total: usize = messages.iter().map(Vec::len).sum();
    let n = total / dim;
    if n == 0 {
        return Err(Error::InsufficientPopulation(format!(
            "{total} bits cannot fill one {dim}-dimensional sample"
        )));
    }
    let bits: Vec<bool> = messages.iter().flatten().copied().take(n * dim).collect();
    BitSampleMatrix::new(n, dim, bits)
}

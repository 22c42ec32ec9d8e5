//! One-round protocols: every user turns its samples into a short bit message,
//! and the referee decides from the messages alone.
//!
//! All protocols sign-quantize (possibly rotated, possibly aggregated) Gaussian
//! samples and hand the resulting binary samples to the collision-statistic
//! test. They differ in how coordinates are spread across users and how many
//! shared bits they spend on rotations. Dimensions that are not powers of two
//! are zero-padded (sample padding uses fresh private noise).

mod hetero_comm;
mod hetero_samples;
mod limited_coin;
mod mix_and_match;
mod partition;
mod private_coin;
mod transcript;
mod wraparound;

pub use hetero_comm::{hetero_comm_layout, hetero_comm_protocol, HeteroCommLayout};
pub use hetero_samples::{hetero_samples_protocol, pairwise_root_sum, referee_epsilon};
pub use limited_coin::{cohort_bounds, limited_coin_dimensions, limited_coin_protocol};
pub use mix_and_match::{mix_and_match_dimension, mix_and_match_protocol};
pub use partition::{greedy_partition, Partition};
pub use private_coin::private_coin_protocol;
pub use transcript::Transcript;
pub use wraparound::{assemble_wraparound, wraparound_message, wraparound_starts};

use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bpmt::{BitSampleMatrix, Verdict};
use crate::brht::BrhtSpec;
use crate::error::{Error, Result};

/// Independent repetitions used for amplification.
pub const REPETITIONS: usize = 7;

/// Shared bits per repetition that buy one halving of the block length.
pub const BITS_PER_HALVING: usize = 4 * REPETITIONS;

/// Sample count and bit budget of one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserSpec {
    pub m: usize,
    pub ell: usize,
}

impl UserSpec {
    pub fn new(m: usize, ell: usize) -> Result<Self> {
        let spec = Self { m, ell };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.ell == 0 {
            return Err(Error::Parameter(format!(
                "user needs m >= 1 and ell >= 1, got m = {}, ell = {}",
                self.m, self.ell
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    /// Per-repetition verdicts of amplified protocols; empty otherwise.
    pub repetition_verdicts: Vec<Verdict>,
}

impl Decision {
    pub fn single(verdict: Verdict) -> Self {
        Self {
            verdict,
            repetition_verdicts: Vec::new(),
        }
    }

    /// Accepts iff every repetition accepts.
    pub fn amplified(repetition_verdicts: Vec<Verdict>) -> Self {
        let verdict = if repetition_verdicts.iter().any(|v| v.is_reject()) {
            Verdict::Reject
        } else {
            Verdict::Accept
        };
        Self {
            verdict,
            repetition_verdicts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolOutcome {
    pub decision: Decision,
    pub transcript: Transcript,
}

/// Per-user private randomness: user `k` gets stream `k` of a ChaCha generator
/// keyed by `seed`, so encodings are reproducible and independent across users.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrivateCoins {
    seed: u64,
}

impl PrivateCoins {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn user_rng(&self, user: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(user as u64);
        rng
    }
}

/// Bit `i` is set iff `x[i] > 0`.
pub fn sign_quantize(x: &[f64]) -> Vec<bool> {
    x.iter().map(|&v| v > 0.0).collect()
}

/// Scaled sum of the `rep`-th run of `block` samples (0-based `rep`):
/// `(1/sqrt(block)) sum_{j in [rep*block, (rep+1)*block)} X_j`.
pub fn aggregate_block(samples: &[Vec<f64>], rep: usize, block: usize) -> Result<Vec<f64>> {
    let mut acc = Vec::new();
    aggregate_into(&mut acc, samples, rep, block)?;
    Ok(acc)
}

pub(crate) fn aggregate_into(acc: &mut Vec<f64>, samples: &[Vec<f64>], rep: usize, block: usize) -> Result<()> {
    if block == 0 {
        return Err(Error::DegenerateInput("aggregation block of size 0".into()));
    }
    if rep >= REPETITIONS {
        return Err(Error::Parameter(format!(
            "repetition index {rep} outside 0..{REPETITIONS}"
        )));
    }
    let range = rep * block..(rep + 1) * block;
    let chunk = samples.get(range.clone()).ok_or_else(|| {
        Error::DegenerateInput(format!(
            "need samples {range:?}, only {} available",
            samples.len()
        ))
    })?;
    let dim = chunk[0].len();
    acc.clear();
    acc.resize(dim, 0.0);
    for x in chunk {
        if x.len() != dim {
            return Err(Error::Dimension("samples of different lengths".into()));
        }
        acc.iter_mut().zip(x).for_each(|(a, v)| *a += v);
    }
    let scale = 1.0 / (block as f64).sqrt();
    acc.iter_mut().for_each(|a| *a *= scale);
    Ok(())
}

/// Dimension after zero-padding to a power of two.
pub fn padded_dim(d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::Dimension("dimension must be >= 1".into()));
    }
    Ok(d.next_power_of_two())
}

/// `d' / 2^floor(s / 28)`, never below 1.
pub fn compressed_block_len(padded: usize, s: usize) -> usize {
    let halvings = (s / BITS_PER_HALVING).min(padded.trailing_zeros() as usize);
    padded >> halvings
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok(())
}

pub(crate) fn check_sample_dims<'a>(samples: impl IntoIterator<Item = &'a Vec<f64>>, d: usize) -> Result<()> {
    for x in samples {
        if x.len() != d {
            return Err(Error::Dimension(format!(
                "sample of length {} in dimension {d}",
                x.len()
            )));
        }
    }
    Ok(())
}

/// Pads `x` to `padded` (private noise for user `user`), applies `rotation` if
/// any, and sign-quantizes the first `keep` coordinates. The noise depends only
/// on the user, so re-encoding one sample always sees the same padded vector.
pub(crate) fn encode_coordinates(
    x: &[f64],
    padded: usize,
    rotation: Option<&BrhtSpec>,
    keep: usize,
    coins: &PrivateCoins,
    user: usize,
) -> Result<Vec<bool>> {
    let mut buf = x.to_vec();
    encode_buffer(&mut buf, padded, rotation, keep, &mut coins.user_rng(user))
}

/// In-place variant of [`encode_coordinates`]: `buf` holds the sample and is
/// padded with fresh noise drawn from `rng`.
pub(crate) fn encode_buffer<R: RngCore + ?Sized>(
    buf: &mut Vec<f64>,
    padded: usize,
    rotation: Option<&BrhtSpec>,
    keep: usize,
    rng: &mut R,
) -> Result<Vec<bool>> {
    while buf.len() < padded {
        buf.push(StandardNormal.sample(rng));
    }
    if let Some(r) = rotation {
        r.apply_in_place(buf)?;
    }
    Ok(sign_quantize(&buf[..keep]))
}

/// The referee needs two simulated samples for the collision statistic.
pub(crate) fn require_two(matrix: &BitSampleMatrix, what: &str) -> Result<()> {
    if matrix.n() < 2 {
        return Err(Error::InsufficientPopulation(format!(
            "{what}: {} simulated sample(s), need at least 2",
            matrix.n()
        )));
    }
    Ok(())
}

use crate::bpmt::bpmt_decide;
use crate::brht::{sample_brht, COMPRESSION_FRACTION};
use crate::error::{Error, Result};
use crate::hadamard::prev_power_of_two;
use crate::randomness::PublicSeed;

use super::{
    assemble_wraparound, check_epsilon, check_sample_dims, compressed_block_len, encode_coordinates,
    padded_dim, require_two, wraparound_message, wraparound_starts, Decision, PrivateCoins,
    ProtocolOutcome, Transcript, REPETITIONS,
};

/// Dimensions and per-repetition shares of the heterogeneous-budget protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeteroCommLayout {
    pub padded: usize,
    /// Block length `d_s` of each shared transform.
    pub block: usize,
    /// Assembly dimension `L = max(d_s, max_k l_k)` (budget rounded down to a
    /// power of two, capped at `d'`).
    pub dim: usize,
    /// Bits user `k` sends in each repetition: `min(floor(l_k / 7), L)`.
    pub shares: Vec<usize>,
}

pub fn hetero_comm_layout(ell: &[usize], d: usize, s: usize) -> Result<HeteroCommLayout> {
    let padded = padded_dim(d)?;
    if ell.is_empty() {
        return Err(Error::InsufficientPopulation("no users".into()));
    }
    if ell.contains(&0) {
        return Err(Error::Parameter("every budget must be >= 1".into()));
    }
    let block = compressed_block_len(padded, s);
    let max_ell = ell.iter().copied().max().unwrap_or(1);
    let dim = block.max(prev_power_of_two(max_ell.min(padded)));
    let shares = ell.iter().map(|&l| (l / REPETITIONS).min(dim)).collect();
    Ok(HeteroCommLayout {
        padded,
        block,
        dim,
        shares,
    })
}

/// Heterogeneous-budget protocol.
///
/// Seven repetitions, each with a fresh `(d', d_s)` transform. In every
/// repetition each user rotates its sample, keeps `L` coordinates, and sends
/// its share of `floor(l_k / 7)` bits under the wrap-around layout. The referee
/// assembles `floor(sum shares / L)` samples per repetition and tests them at
/// distance `(epsilon / sqrt 8) sqrt(L / (100 d'))`.
pub fn hetero_comm_protocol(
    samples: &[Vec<f64>],
    ell: &[usize],
    d: usize,
    epsilon: f64,
    seed: &mut PublicSeed,
    coins: &PrivateCoins,
) -> Result<ProtocolOutcome> {
    check_epsilon(epsilon)?;
    if samples.len() != ell.len() {
        return Err(Error::Parameter(format!(
            "{} samples for {} budgets",
            samples.len(),
            ell.len()
        )));
    }
    check_sample_dims(samples, d)?;
    let layout = hetero_comm_layout(ell, d, seed.remaining())?;
    let HeteroCommLayout {
        padded,
        block,
        dim,
        ref shares,
    } = layout;
    if shares.iter().sum::<usize>() < dim {
        return Err(Error::InsufficientPopulation(format!(
            "{} bits per repetition cannot fill one {dim}-dimensional sample",
            shares.iter().sum::<usize>()
        )));
    }

    let used_before = seed.consumed();
    let rotations = (0..REPETITIONS)
        .map(|_| sample_brht(seed, padded, block))
        .collect::<Result<Vec<_>>>()?;
    let starts = wraparound_starts(shares, dim);
    let distance = epsilon / 8f64.sqrt() * (COMPRESSION_FRACTION * dim as f64 / padded as f64).sqrt();

    let mut messages = vec![Vec::new(); samples.len()];
    let mut verdicts = Vec::with_capacity(REPETITIONS);
    for (rep, rotation) in rotations.iter().enumerate() {
        let pieces = samples
            .iter()
            .enumerate()
            .map(|(k, x)| {
                if shares[k] == 0 {
                    return Ok(Vec::new());
                }
                let q = encode_coordinates(x, padded, Some(rotation), dim, coins, k)?;
                Ok(wraparound_message(&q, starts[k], shares[k]))
            })
            .collect::<Result<Vec<_>>>()?;
        let matrix = assemble_wraparound(&pieces, dim)?;
        require_two(&matrix, &format!("heterogeneous-budget repetition {rep}"))?;
        verdicts.push(bpmt_decide(&matrix, distance)?);
        for (msg, piece) in messages.iter_mut().zip(pieces) {
            msg.extend(piece);
        }
    }
    Ok(ProtocolOutcome {
        decision: Decision::amplified(verdicts),
        transcript: Transcript::new(messages, seed.consumed() - used_before),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn null_samples(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect()
    }

    #[test]
    fn layout_mixed_budgets() {
        let ell = [8, 16, 32, 8];
        let l = hetero_comm_layout(&ell, 64, 28).unwrap();
        assert_eq!((l.padded, l.block, l.dim), (64, 32, 32));
        assert_eq!(l.shares, vec![1, 2, 4, 1]);
        let l0 = hetero_comm_layout(&ell, 64, 0).unwrap();
        assert_eq!(l0.dim, 64);
    }

    #[test]
    fn messages_respect_budgets() {
        let ell: Vec<usize> = (0..300).map(|k| [8, 16, 32][k % 3]).collect();
        let samples = null_samples(ell.len(), 64, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut seed = PublicSeed::from_rng(&mut rng, 28);
        let out = hetero_comm_protocol(&samples, &ell, 64, 1.0, &mut seed, &PrivateCoins::new(0)).unwrap();
        for (k, &sent) in out.transcript.bits_sent.iter().enumerate() {
            assert_eq!(sent, 7 * (ell[k] / 7));
            assert!(sent <= ell[k]);
        }
        assert_eq!(out.transcript.public_bits_used, 28);
    }

    #[test]
    fn uniform_budget_matches_block_layout() {
        let ell = vec![28; 64];
        let l = hetero_comm_layout(&ell, 16, 0).unwrap();
        assert_eq!(l.dim, 16);
        assert!(l.shares.iter().all(|&s| s == 4));
        assert_eq!(wraparound_starts(&l.shares, l.dim)[..5], [0, 4, 8, 12, 0]);
    }

    #[test]
    fn too_little_communication() {
        let samples = null_samples(3, 64, 1);
        let mut seed = PublicSeed::from_bits(vec![]);
        assert!(matches!(
            hetero_comm_protocol(&samples, &[8, 8, 8], 64, 1.0, &mut seed, &PrivateCoins::new(0)),
            Err(Error::InsufficientPopulation(_))
        ));
    }
}

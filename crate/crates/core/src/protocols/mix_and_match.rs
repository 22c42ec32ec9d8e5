use crate::brht::sample_brht;
use crate::error::{Error, Result};
use crate::hadamard::prev_power_of_two;
use crate::randomness::PublicSeed;

use super::hetero_samples::{quantized_repetitions, referee_repetitions};
use super::{
    check_epsilon, check_sample_dims, compressed_block_len, padded_dim, pairwise_root_sum,
    referee_epsilon, Partition, PrivateCoins, ProtocolOutcome, Transcript, UserSpec, REPETITIONS,
};

/// Per-repetition group dimension `L = max(d_s, floor(max_ell / 7))`, the
/// budget term rounded down to a power of two and capped at `d'`. A group must
/// pool at least `7 L` bits.
pub fn mix_and_match_dimension(d: usize, s: usize, max_ell: usize) -> Result<usize> {
    let padded = padded_dim(d)?;
    let block = compressed_block_len(padded, s);
    let per_rep = (max_ell / REPETITIONS).min(padded);
    Ok(if per_rep == 0 {
        block
    } else {
        block.max(prev_power_of_two(per_rep))
    })
}

/// Mix-and-match protocol.
///
/// Each group `P_j` acts as one virtual user holding `m'_j = min m_i` samples
/// per member and `7 L` bits. Seven `(d', d_s)` transforms are shared. In
/// repetition `t` every member aggregates its `t`-th run of `floor(m'_j / 7)`
/// samples, rotates, and quantizes `L` coordinates. The group's `7 L` stream
/// positions are filled member by member (position `q` is coordinate `q mod L`
/// of repetition `q / L`), each member sending at most its budget. The referee
/// then runs the heterogeneous-sample test over the `K` group samples.
pub fn mix_and_match_protocol(
    samples: &[Vec<Vec<f64>>],
    users: &[UserSpec],
    partition: &Partition,
    d: usize,
    epsilon: f64,
    seed: &mut PublicSeed,
    coins: &PrivateCoins,
) -> Result<ProtocolOutcome> {
    check_epsilon(epsilon)?;
    let n = users.len();
    if samples.len() != n {
        return Err(Error::Parameter(format!(
            "{} sample sets for {n} users",
            samples.len()
        )));
    }
    for u in users {
        u.validate()?;
    }
    partition.validate(n)?;
    for (k, (xs, u)) in samples.iter().zip(users).enumerate() {
        if xs.len() < u.m {
            return Err(Error::Parameter(format!(
                "user {k} declares m = {} but holds {} samples",
                u.m,
                xs.len()
            )));
        }
        check_sample_dims(xs, d)?;
    }
    let padded = padded_dim(d)?;
    let max_ell = users.iter().map(|u| u.ell).max().unwrap_or(0);
    let dim = mix_and_match_dimension(d, seed.remaining(), max_ell)?;
    let stream = REPETITIONS * dim;

    let mut group_blocks = Vec::with_capacity(partition.num_groups());
    for (j, group) in partition.groups.iter().enumerate() {
        let budget: usize = group.iter().map(|&k| users[k].ell).sum();
        if budget < stream {
            return Err(Error::InfeasiblePartition(format!(
                "group {j} pools {budget} bits, needs {stream}"
            )));
        }
        let m_min = group.iter().map(|&k| users[k].m).min().unwrap_or(0);
        if m_min < REPETITIONS {
            return Err(Error::InfeasiblePartition(format!(
                "group {j} has a member with {m_min} samples, fewer than {REPETITIONS}"
            )));
        }
        group_blocks.push(m_min / REPETITIONS);
    }
    let groups = partition.num_groups();
    if groups < 2 {
        return Err(Error::InsufficientPopulation(format!(
            "{groups} group(s), need at least 2"
        )));
    }

    let used_before = seed.consumed();
    let rotations = (0..REPETITIONS)
        .map(|_| sample_brht(seed, padded, dim))
        .collect::<Result<Vec<_>>>()?;

    let mut messages = vec![Vec::new(); n];
    let mut rows = Vec::with_capacity(groups);
    for (group, &block) in partition.groups.iter().zip(&group_blocks) {
        let mut reps: Vec<Vec<bool>> = (0..REPETITIONS).map(|_| Vec::with_capacity(dim)).collect();
        let mut filled = 0;
        for &k in group {
            let len = users[k].ell.min(stream - filled);
            if len == 0 {
                continue;
            }
            let own = quantized_repetitions(&samples[k], block, padded, &rotations, dim, coins, k)?;
            for q in filled..filled + len {
                let bit = own[q / dim][q % dim];
                reps[q / dim].push(bit);
                messages[k].push(bit);
            }
            filled += len;
        }
        debug_assert_eq!(filled, stream);
        rows.push(reps);
    }

    let pair_sum = pairwise_root_sum(&group_blocks.iter().map(|&a| a as f64).collect::<Vec<_>>());
    let eps_ref = referee_epsilon(epsilon, stream, pair_sum, padded, groups);
    let decision = referee_repetitions(&rows, eps_ref * eps_ref / 2.0)?;
    Ok(ProtocolOutcome {
        decision,
        transcript: Transcript::new(messages, seed.consumed() - used_before),
    })
}

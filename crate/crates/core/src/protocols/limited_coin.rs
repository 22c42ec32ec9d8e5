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

/// Users `[lo, hi)` of cohort `rep` when `n` users are split into seven
/// contiguous cohorts whose sizes differ by at most one.
pub fn cohort_bounds(n: usize, rep: usize) -> (usize, usize) {
    (rep * n / REPETITIONS, (rep + 1) * n / REPETITIONS)
}

/// `(d', d_s, l', L)` for the limited-coin protocol with `s` shared bits.
pub fn limited_coin_dimensions(d: usize, ell: usize, s: usize) -> Result<(usize, usize, usize, usize)> {
    let padded = padded_dim(d)?;
    if ell == 0 || ell > d {
        return Err(Error::Parameter(format!("ell = {ell} outside 1..={d}")));
    }
    let block = compressed_block_len(padded, s);
    let share = prev_power_of_two(ell);
    Ok((padded, block, share, block.max(share)))
}

/// Limited public-coin protocol.
///
/// With `s` shared bits each of the seven repetitions draws a `(d', d_s)`
/// transform, `d_s = d' / 2^floor(s/28)`, costing `4 log2(d'/d_s)` bits. Users
/// are split into seven disjoint cohorts; cohort `r` rotates with `R_r`, keeps
/// `L = max(d_s, l')` coordinates, and runs private-coin simulate-and-infer in
/// dimension `L` at distance `epsilon sqrt(L / (100 d')) / sqrt(8)`. The
/// referee accepts iff every cohort accepts.
pub fn limited_coin_protocol(
    samples: &[Vec<f64>],
    d: usize,
    ell: usize,
    epsilon: f64,
    seed: &mut PublicSeed,
    coins: &PrivateCoins,
) -> Result<ProtocolOutcome> {
    check_epsilon(epsilon)?;
    check_sample_dims(samples, d)?;
    let (padded, block, share, dim) = limited_coin_dimensions(d, ell, seed.remaining())?;
    let used_before = seed.consumed();
    let rotations = (0..REPETITIONS)
        .map(|_| sample_brht(seed, padded, block))
        .collect::<Result<Vec<_>>>()?;

    let inner_epsilon = epsilon * (COMPRESSION_FRACTION * dim as f64 / padded as f64).sqrt();
    let n = samples.len();
    let mut messages = Vec::with_capacity(n);
    let mut verdicts = Vec::with_capacity(REPETITIONS);
    for (rep, rotation) in rotations.iter().enumerate() {
        let (lo, hi) = cohort_bounds(n, rep);
        let starts = wraparound_starts(&vec![share; hi - lo], dim);
        let cohort = (lo..hi)
            .zip(starts)
            .map(|(k, start)| {
                let q = encode_coordinates(&samples[k], padded, Some(rotation), dim, coins, k)?;
                Ok(wraparound_message(&q, start, share))
            })
            .collect::<Result<Vec<_>>>()?;
        let matrix = assemble_wraparound(&cohort, dim).map_err(|e| cohort_error(e, rep))?;
        require_two(&matrix, &format!("limited-coin cohort {rep}"))?;
        verdicts.push(bpmt_decide(&matrix, inner_epsilon / 8f64.sqrt())?);
        messages.extend(cohort);
    }
    debug_assert_eq!(messages.len(), n);
    Ok(ProtocolOutcome {
        decision: Decision::amplified(verdicts),
        transcript: Transcript::new(messages, seed.consumed() - used_before),
    })
}

fn cohort_error(e: Error, rep: usize) -> Error {
    match e {
        Error::InsufficientPopulation(msg) => {
            Error::InsufficientPopulation(format!("cohort {rep}: {msg}"))
        }
        other => other,
    }
}

use crate::bpmt::{bpmt_decide_threshold, BitSampleMatrix};
use crate::brht::{sample_brht, BrhtSpec};
use crate::error::{Error, Result};
use crate::hadamard::prev_power_of_two;
use crate::randomness::PublicSeed;

use super::{
    aggregate_into, check_epsilon, check_sample_dims, encode_buffer, padded_dim, Decision, PrivateCoins, ProtocolOutcome, Transcript, REPETITIONS,
};

/// `sum_{k1 != k2} sqrt(v_k1 v_k2)`, computed as `(sum sqrt v)^2 - sum v`.
pub fn pairwise_root_sum(values: &[f64]) -> f64 {
    let roots: f64 = values.iter().map(|v| v.sqrt()).sum();
    let plain: f64 = values.iter().sum();
    roots * roots - plain
}

/// Referee distance `epsilon' = (epsilon / 80) sqrt(ell N / (7 d n (n-1)))`.
pub fn referee_epsilon(epsilon: f64, ell: usize, pair_sum: f64, d: usize, n: usize) -> f64 {
    let pairs = n as f64 * (n as f64 - 1.0);
    epsilon / 80.0 * (ell as f64 * pair_sum / (7.0 * d as f64 * pairs)).sqrt()
}

/// Runs the seven-repetition aggregate, rotate, quantize pipeline shared by the
/// heterogeneous-sample and mix-and-match protocols: returns, per repetition,
/// the `keep` quantized coordinates of user `k`'s block-`a_k` aggregate. Each
/// aggregate is padded with its own fresh noise.
pub(super) fn quantized_repetitions(
    samples: &[Vec<f64>],
    block: usize,
    padded: usize,
    rotations: &[BrhtSpec],
    keep: usize,
    coins: &PrivateCoins,
    user: usize,
) -> Result<Vec<Vec<bool>>> {
    let mut rng = coins.user_rng(user);
    let mut buf = Vec::with_capacity(padded);
    rotations
        .iter()
        .enumerate()
        .map(|(rep, r)| {
            aggregate_into(&mut buf, samples, rep, block)?;
            encode_buffer(&mut buf, padded, Some(r), keep, &mut rng)
        })
        .collect()
}

/// Per repetition: tests rows `rows[k][rep]` at threshold `tau`.
pub(super) fn referee_repetitions(
    rows: &[Vec<Vec<bool>>],
    tau: f64,
) -> Result<Decision> {
    let verdicts = (0..REPETITIONS)
        .map(|rep| {
            let rep_rows: Vec<&[bool]> = rows.iter().map(|r| r[rep].as_slice()).collect();
            let matrix = BitSampleMatrix::from_rows(&rep_rows)?;
            bpmt_decide_threshold(&matrix, tau)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decision::amplified(verdicts))
}

/// Heterogeneous-sample protocol.
///
/// User `k` holds `m_k >= 7` samples and sends `ell >= 7` bits. Let `l'` be
/// `floor(ell / 7)` rounded down to a power of two (at most `d'`). Seven
/// shared transforms with blocks of length `l'` are drawn. In repetition `t`
/// user `k` aggregates its `t`-th run of `a_k = floor(m_k / 7)` samples,
/// rotates, and quantizes the first `l'` coordinates; the seven pieces form its
/// message. The referee computes `N = sum_{k1 != k2} sqrt(a_k1 a_k2)` and
/// rejects if any repetition's statistic exceeds `epsilon'^2 / 2`.
pub fn hetero_samples_protocol(
    samples: &[Vec<Vec<f64>>],
    d: usize,
    ell: usize,
    epsilon: f64,
    seed: &mut PublicSeed,
    coins: &PrivateCoins,
) -> Result<ProtocolOutcome> {
    check_epsilon(epsilon)?;
    let padded = padded_dim(d)?;
    if ell < REPETITIONS {
        return Err(Error::Parameter(format!(
            "ell = {ell} leaves no bits for {REPETITIONS} repetitions"
        )));
    }
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientPopulation(format!("{n} user(s), need at least 2")));
    }
    let blocks: Vec<usize> = samples.iter().map(|s| s.len() / REPETITIONS).collect();
    if let Some(k) = blocks.iter().position(|&a| a == 0) {
        return Err(Error::DegenerateInput(format!(
            "user {k} holds {} samples, fewer than {REPETITIONS}",
            samples[k].len()
        )));
    }
    for user in samples {
        check_sample_dims(user, d)?;
    }
    let keep = prev_power_of_two((ell / REPETITIONS).min(padded));

    let used_before = seed.consumed();
    let rotations = (0..REPETITIONS)
        .map(|_| sample_brht(seed, padded, keep))
        .collect::<Result<Vec<_>>>()?;

    let rows = samples
        .iter()
        .zip(&blocks)
        .enumerate()
        .map(|(k, (xs, &a))| quantized_repetitions(xs, a, padded, &rotations, keep, coins, k))
        .collect::<Result<Vec<_>>>()?;

    let pair_sum = pairwise_root_sum(&blocks.iter().map(|&a| a as f64).collect::<Vec<_>>());
    let eps_ref = referee_epsilon(epsilon, REPETITIONS * keep, pair_sum, padded, n);
    let decision = referee_repetitions(&rows, eps_ref * eps_ref / 2.0)?;

    let messages = rows.into_iter().map(|r| r.concat()).collect();
    Ok(ProtocolOutcome {
        decision,
        transcript: Transcript::new(messages, seed.consumed() - used_before),
    })
}

use crate::bpmt::bpmt_decide;
use crate::error::{Error, Result};
use crate::hadamard::prev_power_of_two;

use super::{
    assemble_wraparound, check_epsilon, check_sample_dims, encode_coordinates, padded_dim,
    require_two, wraparound_message, wraparound_starts, Decision, PrivateCoins, ProtocolOutcome,
    Transcript,
};

/// Private-coin simulate-and-infer.
///
/// The budget is rounded down to a power of two `l'`; every group of `d' / l'`
/// consecutive users jointly delivers one sign-quantized `d'`-dimensional
/// sample, user `j` of a group sending coordinates `[j l', (j+1) l')`. The
/// referee tests the `floor(n l' / d')` simulated samples at distance
/// `epsilon / sqrt(8)`. Users of an incomplete trailing group still send
/// their block, which the referee ignores.
pub fn private_coin_protocol(
    samples: &[Vec<f64>],
    d: usize,
    ell: usize,
    epsilon: f64,
    coins: &PrivateCoins,
) -> Result<ProtocolOutcome> {
    check_epsilon(epsilon)?;
    let padded = padded_dim(d)?;
    if ell == 0 || ell > d {
        return Err(Error::Parameter(format!("ell = {ell} outside 1..={d}")));
    }
    check_sample_dims(samples, d)?;
    let share = prev_power_of_two(ell);

    let lengths = vec![share; samples.len()];
    let starts = wraparound_starts(&lengths, padded);
    let messages = samples
        .iter()
        .zip(&starts)
        .enumerate()
        .map(|(k, (x, &start))| {
            let q = encode_coordinates(x, padded, None, padded, coins, k)?;
            Ok(wraparound_message(&q, start, share))
        })
        .collect::<Result<Vec<_>>>()?;

    let matrix = assemble_wraparound(&messages, padded)?;
    require_two(&matrix, "private-coin protocol")?;
    let verdict = bpmt_decide(&matrix, epsilon / 8f64.sqrt())?;
    Ok(ProtocolOutcome {
        decision: Decision::single(verdict),
        transcript: Transcript::new(messages, 0),
    })
}

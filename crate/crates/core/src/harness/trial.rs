use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::protocols::{
    hetero_comm_protocol, hetero_samples_protocol, limited_coin_protocol, mix_and_match_protocol,
    private_coin_protocol, Decision, PrivateCoins, Transcript,
};
use crate::randomness::PublicSeed;

use super::data::gaussian_sample;
use super::{gen_gaussian_samples, make_mean, MeanMode, MeanSpec, PopulationConfig, ProtocolKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub decision: Decision,
    pub transcript: Transcript,
}

/// Seeds of one trial, derived from `(master, trial, mode)` alone so that any
/// trial can be replayed in isolation and in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub data: u64,
    pub private: u64,
    pub public: u64,
}

impl TrialSeeds {
    pub fn derive(master: u64, trial: usize, mode: MeanMode) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(trial as u64 * MeanMode::ALL.len() as u64 + mode.index());
        Self {
            data: rng.next_u64(),
            private: rng.next_u64(),
            public: rng.next_u64(),
        }
    }

    pub fn public_seed(&self, s: usize) -> PublicSeed {
        PublicSeed::from_rng(&mut ChaCha8Rng::seed_from_u64(self.public), s)
    }
}

/// Draws the mean and every user's samples, then runs the configured protocol.
pub fn run_trial(config: &PopulationConfig, mode: MeanMode, master_seed: u64, trial: usize) -> Result<TrialOutcome> {
    config.validate()?;
    let seeds = TrialSeeds::derive(master_seed, trial, mode);
    let mut data_rng = Xoshiro256PlusPlus::seed_from_u64(seeds.data);
    let mu = make_mean(&MeanSpec::new(mode, config.epsilon), config.d, &mut data_rng);
    let coins = PrivateCoins::new(seeds.private);
    let mut seed = seeds.public_seed(config.s);
    let (d, eps) = (config.d, config.epsilon);

    let outcome = if config.protocol.uses_sample_counts() {
        let samples: Vec<Vec<Vec<f64>>> = config
            .users
            .iter()
            .map(|u| gen_gaussian_samples(&mu, u.m, &mut data_rng))
            .collect();
        match config.protocol {
            ProtocolKind::HeteroSamples => {
                hetero_samples_protocol(&samples, d, config.uniform_ell()?, eps, &mut seed, &coins)?
            }
            _ => {
                let partition = config.resolved_partition()?;
                mix_and_match_protocol(&samples, &config.users, &partition, d, eps, &mut seed, &coins)?
            }
        }
    } else {
        let samples: Vec<Vec<f64>> = config
            .users
            .iter()
            .map(|_| gaussian_sample(&mu, &mut data_rng))
            .collect();
        match config.protocol {
            ProtocolKind::Private => private_coin_protocol(&samples, d, config.uniform_ell()?, eps, &coins)?,
            ProtocolKind::Limited => {
                limited_coin_protocol(&samples, d, config.uniform_ell()?, eps, &mut seed, &coins)?
            }
            _ => {
                let ell: Vec<usize> = config.users.iter().map(|u| u.ell).collect();
                hetero_comm_protocol(&samples, &ell, d, eps, &mut seed, &coins)?
            }
        }
    };
    Ok(TrialOutcome {
        decision: outcome.decision,
        transcript: outcome.transcript,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditViolation {
    Communication { user: usize, sent: usize, budget: usize },
    MessageLength { user: usize, declared: usize, actual: usize },
    UserCount { transcript: usize, config: usize },
    PublicRandomness { used: usize, budget: usize },
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Communication { user, sent, budget } => {
                write!(f, "user {user} sent {sent} bits over a budget of {budget}")
            }
            Self::MessageLength { user, declared, actual } => {
                write!(f, "user {user} declares {declared} bits but its message has {actual}")
            }
            Self::UserCount { transcript, config } => {
                write!(f, "transcript has {transcript} users, config {config}")
            }
            Self::PublicRandomness { used, budget } => {
                write!(f, "public seed over-drawn: {used} bits used of {budget}")
            }
        }
    }
}

/// Checks exact per-user bit counts and the shared-bit total.
pub fn budget_audit(transcript: &Transcript, config: &PopulationConfig) -> std::result::Result<(), AuditViolation> {
    if transcript.bits_sent.len() != config.n() || transcript.messages.len() != config.n() {
        return Err(AuditViolation::UserCount {
            transcript: transcript.bits_sent.len(),
            config: config.n(),
        });
    }
    for (user, ((&sent, msg), spec)) in transcript
        .bits_sent
        .iter()
        .zip(&transcript.messages)
        .zip(&config.users)
        .enumerate()
    {
        if sent != msg.len() {
            return Err(AuditViolation::MessageLength {
                user,
                declared: sent,
                actual: msg.len(),
            });
        }
        if sent > spec.ell {
            return Err(AuditViolation::Communication {
                user,
                sent,
                budget: spec.ell,
            });
        }
    }
    if transcript.public_bits_used > config.s {
        return Err(AuditViolation::PublicRandomness {
            used: transcript.public_bits_used,
            budget: config.s,
        });
    }
    Ok(())
}

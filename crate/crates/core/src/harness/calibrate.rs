use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::prev_power_of_two;
use crate::protocols::{compressed_block_len, mix_and_match_dimension, padded_dim, pairwise_root_sum};

use super::{estimate_error, ErrorEstimate, EstimateOptions, PopulationConfig, ProtocolKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalibrationOptions {
    pub estimate: EstimateOptions,
    pub start_multiplier: usize,
    pub max_multiplier: usize,
    /// Stop before the scaled population would exceed this many users.
    pub max_users: Option<usize>,
}

impl CalibrationOptions {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            estimate: EstimateOptions::new(trials, master_seed),
            start_multiplier: 1,
            max_multiplier: 1 << 16,
            max_users: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStep {
    pub multiplier: usize,
    pub n_users: usize,
    /// `None` when the population was too small to run at all.
    pub worst_rate: Option<f64>,
    pub audit_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub multiplier: usize,
    pub n_users: usize,
    pub worst_rate: f64,
    /// Achieved constant relative to the protocol's theoretical scaling.
    pub constant: f64,
    pub steps: Vec<CalibrationStep>,
    pub estimate: ErrorEstimate,
}

/// Population size over its theoretical requirement.
///
/// * private: `n l eps^2 / d^(3/2)`
/// * limited: `n l eps^2 / (d sqrt L)` with `L = max(d_s, l)`
/// * heterogeneous samples: `(sum_{k != k'} sqrt(m_k m_k') / n) sqrt(l) eps^2 / d`
/// * heterogeneous budgets: `(|l|_1 / sqrt |l|_inf) eps^2 / d`
/// * mix-and-match: `(sum_{j != j'} sqrt(m'_j m'_j') / K) sqrt(L) eps^2 / d`
///
/// Dimensions and budgets are taken after power-of-two rounding.
pub fn theoretical_constant(config: &PopulationConfig) -> Result<f64> {
    config.validate()?;
    let d = padded_dim(config.d)? as f64;
    let eps2 = config.epsilon * config.epsilon;
    let n = config.n() as f64;
    Ok(match config.protocol {
        ProtocolKind::Private => {
            let ell = prev_power_of_two(config.uniform_ell()?) as f64;
            n * ell * eps2 / d.powf(1.5)
        }
        ProtocolKind::Limited => {
            let ell = prev_power_of_two(config.uniform_ell()?);
            let block = compressed_block_len(d as usize, config.s);
            let l = block.max(ell) as f64;
            n * ell as f64 * eps2 / (d * l.sqrt())
        }
        ProtocolKind::HeteroSamples => {
            let ell = config.uniform_ell()? as f64;
            let m: Vec<f64> = config.users.iter().map(|u| u.m as f64).collect();
            pairwise_root_sum(&m) / n * ell.sqrt() * eps2 / d
        }
        ProtocolKind::HeteroComm => {
            let total: usize = config.users.iter().map(|u| u.ell).sum();
            total as f64 / (config.max_ell() as f64).sqrt() * eps2 / d
        }
        ProtocolKind::MixAndMatch => {
            let partition = config.resolved_partition()?;
            let mins: Vec<f64> = partition
                .groups
                .iter()
                .map(|g| g.iter().map(|&k| config.users[k].m).min().unwrap_or(0) as f64)
                .collect();
            let l = mix_and_match_dimension(config.d, config.s, config.max_ell())? as f64;
            pairwise_root_sum(&mins) / mins.len() as f64 * l.sqrt() * eps2 / d
        }
    })
}

/// Doubling search over the population multiplier until the worst error rate
/// is at most `target`. Populations too small for the protocol count as
/// failures.
pub fn calibrate(template: &PopulationConfig, target: f64, opts: &CalibrationOptions) -> Result<CalibrationResult> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::Parameter(format!("target error must lie in (0, 0.5), got {target}")));
    }
    if opts.start_multiplier == 0 {
        return Err(Error::Parameter("start multiplier must be >= 1".into()));
    }
    template.validate()?;
    let mut steps = Vec::new();
    let mut mult = opts.start_multiplier;
    while mult <= opts.max_multiplier {
        let config = template.scaled(mult);
        if opts.max_users.is_some_and(|cap| config.n() > cap) {
            break;
        }
        match estimate_error(&config, &opts.estimate) {
            Ok(est) => {
                let worst = est.worst_rate();
                steps.push(CalibrationStep {
                    multiplier: mult,
                    n_users: config.n(),
                    worst_rate: Some(worst),
                    audit_violations: est.audit_violations.len(),
                });
                if worst <= target {
                    return Ok(CalibrationResult {
                        multiplier: mult,
                        n_users: config.n(),
                        worst_rate: worst,
                        constant: theoretical_constant(&config)?,
                        steps,
                        estimate: est,
                    });
                }
            }
            Err(e) if e.is_infeasible() => steps.push(CalibrationStep {
                multiplier: mult,
                n_users: config.n(),
                worst_rate: None,
                audit_violations: 0,
            }),
            Err(e) => return Err(e),
        }
        mult = mult.saturating_mul(2);
    }
    let last = steps
        .last()
        .map(|s| format!("{} users, worst rate {:?}", s.n_users, s.worst_rate))
        .unwrap_or_else(|| "no step ran".into());
    Err(Error::CalibrationFailed(format!(
        "target {target} not reached within the cap ({last})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::UserSpec;

    #[test]
    fn target_must_be_in_range() {
        let c = PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::Private, 8, 1, 8);
        let opts = CalibrationOptions::new(5, 0);
        for bad in [0.0, 0.5, -0.1, f64::NAN] {
            assert!(matches!(calibrate(&c, bad, &opts), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn cap_gives_calibration_failure() {
        let c = PopulationConfig::homogeneous(64, 0.1, 0, ProtocolKind::Private, 2, 1, 64);
        let mut opts = CalibrationOptions::new(5, 0);
        opts.max_multiplier = 4;
        assert!(matches!(calibrate(&c, 0.1, &opts), Err(Error::CalibrationFailed(_))));
    }

    #[test]
    fn easy_problem_converges() {
        let c = PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::Private, 4, 1, 8);
        let r = calibrate(&c, 0.2, &CalibrationOptions::new(40, 3)).unwrap();
        assert!(r.worst_rate <= 0.2);
        assert_eq!(r.n_users, 4 * r.multiplier);
        assert!(r.steps.iter().all(|s| s.multiplier <= r.multiplier));
        assert!(r.constant > 0.0);
    }

    #[test]
    fn constants() {
        let c = PopulationConfig::homogeneous(64, 1.0, 0, ProtocolKind::Private, 512, 1, 8);
        assert!((theoretical_constant(&c).unwrap() - 8.0).abs() < 1e-12);
        let c = PopulationConfig::homogeneous(16, 1.0, 56, ProtocolKind::Limited, 64, 1, 4);
        // L = max(16 / 4, 4) = 4
        assert!((theoretical_constant(&c).unwrap() - 64.0 * 4.0 / (16.0 * 2.0)).abs() < 1e-12);
        let c = PopulationConfig::new(
            16,
            1.0,
            0,
            ProtocolKind::HeteroComm,
            vec![UserSpec { m: 1, ell: 4 }, UserSpec { m: 1, ell: 16 }],
        );
        assert!((theoretical_constant(&c).unwrap() - 20.0 / 4.0 / 16.0).abs() < 1e-12);
        let c = PopulationConfig::homogeneous(16, 1.0, 0, ProtocolKind::HeteroSamples, 3, 4, 16);
        // pairwise sum = 3 * 2 * 4 = 24
        assert!((theoretical_constant(&c).unwrap() - 24.0 / 3.0 * 4.0 / 16.0).abs() < 1e-12);
    }
}

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bpmt::Verdict;
use crate::error::{Error, Result};

use super::{budget_audit, run_trial, AuditViolation, MeanMode, PopulationConfig, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateOptions {
    pub trials: usize,
    pub master_seed: u64,
    /// Record wall-clock time per trial. Off by default so output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl EstimateOptions {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            timing: false,
        }
    }
}

/// One row of the decision log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub mean_mode: MeanMode,
    pub verdict: Verdict,
    pub bits_total: usize,
    pub public_bits_used: usize,
    pub wall_micros: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRate {
    pub mode: MeanMode,
    pub trials: usize,
    /// Wrong decisions: rejections under the null, acceptances otherwise.
    pub errors: usize,
    pub rate: f64,
    pub ci_halfwidth: f64,
}

impl ModeRate {
    pub fn from_counts(mode: MeanMode, trials: usize, errors: usize) -> Self {
        let rate = errors as f64 / trials as f64;
        Self {
            mode,
            trials,
            errors,
            rate,
            ci_halfwidth: ci_halfwidth(rate, trials),
        }
    }
}

/// 95% normal-approximation half-width `1.96 sqrt(r (1 - r) / trials)`.
pub fn ci_halfwidth(rate: f64, trials: usize) -> f64 {
    1.96 * (rate * (1.0 - rate) / trials as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub trials: usize,
    pub n_users: usize,
    pub rates: Vec<ModeRate>,
    pub audit_violations: Vec<(usize, MeanMode, AuditViolation)>,
    #[serde(skip)]
    pub log: Vec<TrialRecord>,
}

impl ErrorEstimate {
    /// Rebuilds the rates from a decision log.
    pub fn from_log(log: Vec<TrialRecord>, modes: &[MeanMode], n_users: usize) -> Self {
        let rates = modes
            .iter()
            .map(|&mode| {
                let rows: Vec<&TrialRecord> = log.iter().filter(|r| r.mean_mode == mode).collect();
                let errors = rows
                    .iter()
                    .filter(|r| r.verdict.is_reject() == mode.is_null())
                    .count();
                ModeRate::from_counts(mode, rows.len(), errors)
            })
            .collect();
        let trials = log.len() / modes.len().max(1);
        Self {
            trials,
            n_users,
            rates,
            audit_violations: Vec::new(),
            log,
        }
    }

    pub fn rate(&self, mode: MeanMode) -> Option<f64> {
        self.rates.iter().find(|r| r.mode == mode).map(|r| r.rate)
    }

    pub fn type1_rate(&self) -> Option<f64> {
        self.rate(MeanMode::Null)
    }

    /// Acceptance rates under each alternative mode.
    pub fn type2_rates(&self) -> Vec<(MeanMode, f64)> {
        self.rates
            .iter()
            .filter(|r| !r.mode.is_null())
            .map(|r| (r.mode, r.rate))
            .collect()
    }

    /// Empirical two-sided error: the worst rate over all modes.
    pub fn worst_rate(&self) -> f64 {
        self.rates.iter().map(|r| r.rate).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.log {
            w.serialize(row).map_err(io_error)?;
        }
        w.flush().map_err(|e| Error::Parameter(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

fn io_error(e: csv::Error) -> Error {
    Error::Parameter(format!("csv: {e}"))
}

/// `trials` independent trials per configured mean mode, audited.
pub fn estimate_error(config: &PopulationConfig, opts: &EstimateOptions) -> Result<ErrorEstimate> {
    estimate_error_with(config, opts, run_trial)
}

/// As [`estimate_error`] with a custom trial runner.
pub fn estimate_error_with<F>(config: &PopulationConfig, opts: &EstimateOptions, runner: F) -> Result<ErrorEstimate>
where
    F: Fn(&PopulationConfig, MeanMode, u64, usize) -> Result<TrialOutcome> + Sync,
{
    if opts.trials == 0 {
        return Err(Error::Parameter("trials must be >= 1".into()));
    }
    config.validate()?;
    let jobs: Vec<(MeanMode, usize)> = config
        .mean_modes
        .iter()
        .flat_map(|&m| (0..opts.trials).map(move |t| (m, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(mode, trial)| {
            let start = Instant::now();
            let out = runner(config, mode, opts.master_seed, trial)?;
            let wall_micros = if opts.timing {
                start.elapsed().as_micros() as u64
            } else {
                0
            };
            let audit = budget_audit(&out.transcript, config).err();
            let record = TrialRecord {
                trial,
                mean_mode: mode,
                verdict: out.decision.verdict,
                bits_total: out.transcript.total_bits(),
                public_bits_used: out.transcript.public_bits_used,
                wall_micros,
            };
            Ok((record, audit))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    let mut log = Vec::with_capacity(results.len());
    for (record, audit) in results {
        if let Some(v) = audit {
            violations.push((record.trial, record.mean_mode, v));
        }
        log.push(record);
    }
    let mut est = ErrorEstimate::from_log(log, &config.mean_modes, config.n());
    est.audit_violations = violations;
    Ok(est)
}

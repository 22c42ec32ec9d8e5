//! Monte Carlo harness: population configs, Gaussian data, trial runs with
//! budget audits, error-rate estimation, and calibration of population size.
//!
//! Every trial derives its data, private and public seeds from
//! `(master seed, trial index, mean mode)`, so runs are reproducible and
//! trials can execute in any order.

mod calibrate;
mod config;
mod data;
mod estimate;
mod trial;

pub use calibrate::{calibrate, theoretical_constant, CalibrationOptions, CalibrationResult, CalibrationStep};
pub use config::{MeanMode, PopulationConfig, ProtocolKind};
pub use data::{gen_gaussian_samples, make_mean, sign_flip_prob, MeanSpec};
pub use estimate::{
    ci_halfwidth, estimate_error, estimate_error_with, ErrorEstimate, EstimateOptions, ModeRate, TrialRecord,
};
pub use trial::{budget_audit, run_trial, AuditViolation, TrialOutcome, TrialSeeds};

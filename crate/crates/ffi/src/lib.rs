//! C interface to the `dgmt` library.
//!
//! Every fallible call returns a [`DgmtStatus`]; on failure the message is
//! kept per thread and can be read with [`dgmt_last_error_message`]. Objects
//! are opaque handles owned by the caller and released with their `_free`
//! function. Strings returned by the library are released with
//! [`dgmt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dgmt::bpmt::{collision_statistic, BitSampleMatrix};
use dgmt::hadamard::fwht_in_place;
use dgmt::harness::{budget_audit, estimate_error, run_trial, ErrorEstimate, EstimateOptions, MeanMode, PopulationConfig, TrialOutcome};
use dgmt::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgmtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    Dimension = 3,
    BudgetExhausted = 4,
    DegenerateInput = 5,
    Parameter = 6,
    InsufficientPopulation = 7,
    InfeasiblePartition = 8,
    CalibrationFailed = 9,
    Transcript = 10,
    AuditViolation = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgmtMeanMode {
    Null = 0,
    Spike = 1,
    Spread = 2,
    RandomDirection = 3,
}

impl From<DgmtMeanMode> for MeanMode {
    fn from(m: DgmtMeanMode) -> Self {
        match m {
            DgmtMeanMode::Null => MeanMode::Null,
            DgmtMeanMode::Spike => MeanMode::Spike,
            DgmtMeanMode::Spread => MeanMode::Spread,
            DgmtMeanMode::RandomDirection => MeanMode::RandomDirection,
        }
    }
}

/// A validated population config.
pub struct DgmtConfig(PopulationConfig);

/// The decision and transcript of one trial.
pub struct DgmtTrial(TrialOutcome);

/// Error-rate estimate over many trials.
pub struct DgmtEstimate(ErrorEstimate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: DgmtStatus, msg: impl Into<String>) -> DgmtStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> DgmtStatus {
    let status = match e {
        Error::Dimension(_) => DgmtStatus::Dimension,
        Error::BudgetExhausted { .. } => DgmtStatus::BudgetExhausted,
        Error::DegenerateInput(_) => DgmtStatus::DegenerateInput,
        Error::Parameter(_) => DgmtStatus::Parameter,
        Error::InsufficientPopulation(_) => DgmtStatus::InsufficientPopulation,
        Error::InfeasiblePartition(_) => DgmtStatus::InfeasiblePartition,
        Error::CalibrationFailed(_) => DgmtStatus::CalibrationFailed,
        Error::Transcript(_) => DgmtStatus::Transcript,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `DgmtStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), DgmtStatus>) -> DgmtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DgmtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(DgmtStatus::Panic, "internal panic"),
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), DgmtStatus> {
    if p.is_null() {
        Err(fail(DgmtStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dgmt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn dgmt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dgmt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Normalized Walsh-Hadamard transform of `data[0..len]` in place.
///
/// # Safety
/// `data` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dgmt_fwht(data: *mut f64, len: usize) -> DgmtStatus {
    guard(|| {
        non_null(data, "data")?;
        let v = std::slice::from_raw_parts_mut(data, len);
        fwht_in_place(v).map_err(from_error)
    })
}

/// Collision statistic of `n` binary rows of length `dim`, stored row-major
/// as one byte per bit (nonzero means 1).
///
/// # Safety
/// `bits` must point to `n * dim` readable bytes and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn dgmt_collision_statistic(
    bits: *const u8,
    n: usize,
    dim: usize,
    out: *mut f64,
) -> DgmtStatus {
    guard(|| {
        non_null(bits, "bits")?;
        non_null(out, "out")?;
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| fail(DgmtStatus::Dimension, "n * dim overflows"))?;
        let bits: Vec<bool> = std::slice::from_raw_parts(bits, len).iter().map(|&b| b != 0).collect();
        let matrix = BitSampleMatrix::new(n, dim, bits).map_err(from_error)?;
        *out = collision_statistic(&matrix).map_err(from_error)?;
        Ok(())
    })
}

/// Parses and validates a JSON population config.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgmt_config_from_json(json: *const c_char, out: *mut *mut DgmtConfig) -> DgmtStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| fail(DgmtStatus::InvalidString, e.to_string()))?;
        let config = PopulationConfig::from_json(text).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DgmtConfig(config)));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from [`dgmt_config_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dgmt_config_free(config: *mut DgmtConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Number of users, or 0 for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgmt_config_num_users(config: *const DgmtConfig) -> usize {
    config.as_ref().map_or(0, |c| c.0.n())
}

/// Config serialized as JSON; free with [`dgmt_string_free`]. Null on failure.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgmt_config_to_json(config: *const DgmtConfig) -> *mut c_char {
    config.as_ref().map_or(ptr::null_mut(), |c| into_c_string(c.0.to_json()))
}

/// Runs one trial. The same `(config, mode, seed, trial)` always gives the
/// same result.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgmt_run_trial(
    config: *const DgmtConfig,
    mode: DgmtMeanMode,
    master_seed: u64,
    trial: usize,
    out: *mut *mut DgmtTrial,
) -> DgmtStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let outcome = run_trial(&(*config).0, mode.into(), master_seed, trial).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DgmtTrial(outcome)));
        Ok(())
    })
}

/// # Safety
/// `trial` must be null or a handle from [`dgmt_run_trial`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dgmt_trial_free(trial: *mut DgmtTrial) {
    if !trial.is_null() {
        drop(Box::from_raw(trial));
    }
}

/// Writes true to `rejects` if the referee rejected the null.
///
/// # Safety
/// `trial` must be a live handle; `rejects` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgmt_trial_rejects(trial: *const DgmtTrial, rejects: *mut bool) -> DgmtStatus {
    guard(|| {
        non_null(trial, "trial")?;
        non_null(rejects, "rejects")?;
        *rejects = (*trial).0.decision.verdict.is_reject();
        Ok(())
    })
}

/// Total message bits and shared bits consumed by the trial.
///
/// # Safety
/// `trial` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgmt_trial_bits(
    trial: *const DgmtTrial,
    bits_total: *mut usize,
    public_bits_used: *mut usize,
) -> DgmtStatus {
    guard(|| {
        non_null(trial, "trial")?;
        non_null(bits_total, "bits_total")?;
        non_null(public_bits_used, "public_bits_used")?;
        let t = &(*trial).0.transcript;
        *bits_total = t.total_bits();
        *public_bits_used = t.public_bits_used;
        Ok(())
    })
}

/// Copies the binary transcript into `buf`. `len` always receives the
/// required size; pass a null `buf` to query it. Returns `BufferTooSmall`
/// if `cap < *len`.
///
/// # Safety
/// `trial` must be a live handle, `len` writable, and `buf` null or valid for
/// `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn dgmt_trial_transcript(
    trial: *const DgmtTrial,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> DgmtStatus {
    guard(|| {
        non_null(trial, "trial")?;
        non_null(len, "len")?;
        let bytes = (*trial).0.transcript.to_bytes();
        *len = bytes.len();
        if buf.is_null() {
            return Ok(());
        }
        if cap < bytes.len() {
            return Err(fail(
                DgmtStatus::BufferTooSmall,
                format!("transcript needs {} bytes, buffer has {cap}", bytes.len()),
            ));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

/// Checks the trial's transcript against the config's budgets.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn dgmt_trial_audit(trial: *const DgmtTrial, config: *const DgmtConfig) -> DgmtStatus {
    guard(|| {
        non_null(trial, "trial")?;
        non_null(config, "config")?;
        budget_audit(&(*trial).0.transcript, &(*config).0)
            .map_err(|v| fail(DgmtStatus::AuditViolation, v.to_string()))
    })
}

/// Runs `trials` trials per configured mean mode.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_error(
    config: *const DgmtConfig,
    trials: usize,
    master_seed: u64,
    out: *mut *mut DgmtEstimate,
) -> DgmtStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let est = estimate_error(&(*config).0, &EstimateOptions::new(trials, master_seed)).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DgmtEstimate(est)));
        Ok(())
    })
}

/// # Safety
/// `est` must be null or a handle from [`dgmt_estimate_error`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_free(est: *mut DgmtEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Error rate of one mean mode. `Parameter` if the mode was not run.
///
/// # Safety
/// `est` must be a live handle; `rate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_rate(est: *const DgmtEstimate, mode: DgmtMeanMode, rate: *mut f64) -> DgmtStatus {
    guard(|| {
        non_null(est, "est")?;
        non_null(rate, "rate")?;
        let mode = MeanMode::from(mode);
        *rate = (*est)
            .0
            .rate(mode)
            .ok_or_else(|| fail(DgmtStatus::Parameter, format!("mode {mode} was not run")))?;
        Ok(())
    })
}

/// Largest error rate over the modes run; NaN for a null handle.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_worst_rate(est: *const DgmtEstimate) -> f64 {
    est.as_ref().map_or(f64::NAN, |e| e.0.worst_rate())
}

/// Number of trials whose transcript failed the budget audit.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_audit_violations(est: *const DgmtEstimate) -> usize {
    est.as_ref().map_or(0, |e| e.0.audit_violations.len())
}

/// JSON summary; free with [`dgmt_string_free`]. Null on failure.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_summary_json(est: *const DgmtEstimate) -> *mut c_char {
    est.as_ref().map_or(ptr::null_mut(), |e| into_c_string(e.0.summary_json()))
}

/// Per-trial decision log as CSV; free with [`dgmt_string_free`]. Null on failure.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgmt_estimate_csv(est: *const DgmtEstimate) -> *mut c_char {
    let Some(e) = est.as_ref() else {
        return ptr::null_mut();
    };
    let mut buf = Vec::new();
    if let Err(err) = e.0.write_csv(&mut buf) {
        set_error(err.to_string());
        return ptr::null_mut();
    }
    String::from_utf8(buf).map_or(ptr::null_mut(), into_c_string)
}

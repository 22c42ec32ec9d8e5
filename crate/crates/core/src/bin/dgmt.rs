use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use dgmt::harness::{calibrate, estimate_error, CalibrationOptions, ErrorEstimate, EstimateOptions, PopulationConfig};
use dgmt::Error;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

const EXIT_FAILURE: u8 = 1;
const EXIT_AUDIT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "dgmt", version, about = "Distributed Gaussian mean testing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials for every mean mode; write the decision log as CSV and print a JSON summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 300)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination ("-" for stdout).
        #[arg(long)]
        out: PathBuf,
        /// Fill the wall_micros column (makes the CSV non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Double the user population until the worst error rate meets the target.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        target: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 16)]
        max_multiplier: usize,
        #[arg(long)]
        max_users: Option<usize>,
    },
    /// Re-run the config with one parameter varied; prints one JSON line per value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of d, epsilon, s, ell, m, scale.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_infeasible() { EXIT_INFEASIBLE } else { EXIT_FAILURE })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run {
            config,
            trials,
            seed,
            out,
            timing,
        } => {
            let config = PopulationConfig::load(&config)?;
            let mut opts = EstimateOptions::new(trials, seed);
            opts.timing = timing;
            let est = estimate_error(&config, &opts)?;
            if out.as_os_str() == "-" {
                est.write_csv(io::stdout().lock())?;
            } else {
                let file = File::create(&out).map_err(|e| Error::Parameter(format!("{}: {e}", out.display())))?;
                est.write_csv(BufWriter::new(file))?;
            }
            println!("{}", est.summary_json());
            Ok(audit_exit(&est))
        }
        Command::Calibrate {
            config,
            target,
            trials,
            seed,
            max_multiplier,
            max_users,
        } => {
            let config = PopulationConfig::load(&config)?;
            let mut opts = CalibrationOptions::new(trials, seed);
            opts.max_multiplier = max_multiplier;
            opts.max_users = max_users;
            let result = calibrate(&config, target, &opts)?;
            let code = audit_exit(&result.estimate);
            println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
            Ok(code)
        }
        Command::Sweep {
            config,
            param,
            values,
            trials,
            seed,
        } => {
            let base = PopulationConfig::load(&config)?;
            let opts = EstimateOptions::new(trials, seed);
            let mut code = ExitCode::SUCCESS;
            let stdout = io::stdout();
            for value in &values {
                let config = with_param(&base, &param, value)?;
                let est = estimate_error(&config, &opts)?;
                if !est.audit_violations.is_empty() {
                    code = ExitCode::from(EXIT_AUDIT);
                }
                let line = json!({
                    "param": param,
                    "value": value,
                    "n_users": est.n_users,
                    "worst_rate": est.worst_rate(),
                    "rates": est.rates,
                    "audit_violations": est.audit_violations.len(),
                });
                writeln!(stdout.lock(), "{line}").map_err(|e| Error::Parameter(e.to_string()))?;
            }
            Ok(code)
        }
    }
}

fn audit_exit(est: &ErrorEstimate) -> ExitCode {
    for (trial, mode, v) in &est.audit_violations {
        eprintln!("audit violation (trial {trial}, {mode}): {v}");
    }
    if est.audit_violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_AUDIT)
    }
}

fn with_param(base: &PopulationConfig, param: &str, value: &str) -> Result<PopulationConfig, Error> {
    let bad = |e: &dyn std::fmt::Display| Error::Parameter(format!("{param} = {value}: {e}"));
    let int = || value.parse::<usize>().map_err(|e| bad(&e));
    let mut c = base.clone();
    match param {
        "d" => c.d = int()?,
        "epsilon" => c.epsilon = value.parse().map_err(|e| bad(&e))?,
        "s" => c.s = int()?,
        "ell" => {
            let ell = int()?;
            c.users.iter_mut().for_each(|u| u.ell = ell);
        }
        "m" => {
            let m = int()?;
            c.users.iter_mut().for_each(|u| u.m = m);
        }
        "scale" => c = base.scaled(int()?),
        other => return Err(Error::Parameter(format!("unknown sweep parameter {other:?}"))),
    }
    c.validate()?;
    Ok(c)
}

use std::path::Path;
use std::process::{Command, Output};

use dgmt::harness::{PopulationConfig, ProtocolKind};
use dgmt::UserSpec;

fn dgmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgmt")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, config: &PopulationConfig) -> String {
    let path = dir.join(name);
    std::fs::write(&path, config.to_json()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn small_private() -> PopulationConfig {
    PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::Private, 64, 1, 4)
}

#[test]
fn run_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_private());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = dgmt(&["run", "--config", &cfg, "--trials", "20", "--seed", "4", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(summary["n_users"], 64);
        assert_eq!(summary["rates"].as_array().unwrap().len(), 4);
    }
    let csv = std::fs::read(&a).unwrap();
    assert_eq!(csv, std::fs::read(&b).unwrap());
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,mean_mode,verdict,bits_total,public_bits_used,wall_micros"
    );
    assert_eq!(lines.count(), 80);
}

#[test]
fn run_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_private());
    let o = dgmt(&["run", "--config", &cfg, "--trials", "3", "--out", "-"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("trial,mean_mode"));
}

#[test]
fn too_few_users_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let config = PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::Private, 1, 1, 4);
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = dgmt(&["run", "--config", &cfg, "--trials", "2", "--out", "-"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient population"));
}

#[test]
fn infeasible_partition_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let users = vec![UserSpec { m: 7, ell: 4 }; 3];
    let config = PopulationConfig::new(8, 1.0, 0, ProtocolKind::MixAndMatch, users);
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = dgmt(&["run", "--config", &cfg, "--trials", "2", "--out", "-"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_config_is_plain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let o = dgmt(&["run", "--config", path.to_str().unwrap(), "--out", "-"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn calibrate_prints_result() {
    let dir = tempfile::tempdir().unwrap();
    let config = PopulationConfig::homogeneous(8, 1.0, 0, ProtocolKind::Private, 4, 1, 8);
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = dgmt(&["calibrate", "--config", &cfg, "--target", "0.2", "--trials", "30", "--seed", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(result["worst_rate"].as_f64().unwrap() <= 0.2);
    assert_eq!(result["n_users"].as_u64().unwrap(), 4 * result["multiplier"].as_u64().unwrap());
}

#[test]
fn calibrate_cap_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = PopulationConfig::homogeneous(64, 0.1, 0, ProtocolKind::Private, 2, 1, 64);
    let cfg = write_config(dir.path(), "c.json", &config);
    let o = dgmt(&["calibrate", "--config", &cfg, "--trials", "5", "--max-multiplier", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("calibration failed"));
}

#[test]
fn sweep_emits_one_line_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_private());
    let o = dgmt(&["sweep", "--config", &cfg, "--param", "scale", "--values", "1,2", "--trials", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["n_users"], 64);
    assert_eq!(lines[1]["n_users"], 128);

    let o = dgmt(&["sweep", "--config", &cfg, "--param", "colour", "--values", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

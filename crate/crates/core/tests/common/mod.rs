#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use plcsec::experiment::ExperimentConfig;
use plcsec::spectral::make_grid;

/// Small grid and ensemble so every command finishes in seconds.
#[allow(clippy::field_reassign_with_default)]
pub fn reduced_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.grid = make_grid(64, 1.7e6, 86e6).unwrap();
    c.ensemble_size = 40;
    c.power_sweep_dbm = vec![-30.0, 0.0, 30.0];
    c.rate_sweep = vec![0.0, 0.5, 1.0, 2.0, 4.0];
    c.outage_powers_dbm = vec![0.0, 30.0];
    c.outage_rates = vec![0.5, 1.0];
    c.generator.calibration.samples = 300;
    c.master_seed = 11;
    c
}

pub fn write_config(dir: &Path, config: &ExperimentConfig) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

pub fn plcsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plcsec"))
        .args(args)
        .env_remove("PLCSEC_OUT_DIR")
        .env_remove("PLCSEC_THREADS")
        .output()
        .expect("binary runs")
}

/// Data rows of a CSV written by the tool, without its comment line.
pub fn csv_body(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(
        text.starts_with("# plcsec config_hash="),
        "{}",
        path.display()
    );
    text.split_once('\n').unwrap().1.to_string()
}

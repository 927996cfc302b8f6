//! Subcommand implementations. Each writes its outputs under `out_dir`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{spec_hash, EnsembleSource, ExperimentConfig};
use super::study::{
    calibrate_families, family_stats, ordering_violations, CalibratedFamilies, OutagePowerRow,
    OutageRateRow, RateRow, StatsRow, Study,
};
use super::ExperimentError;
use crate::dataset::{ensemble_stats, write_ensemble, NsnrStats};
use crate::exec::Execution;
use crate::metrics::{BobBin, Scenario, Side};
use crate::synthesis::generate_ensemble_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Calibrate,
    SweepRate,
    SweepOutageR,
    SweepOutagePt,
    Stats,
}

pub const RATE_CSV: &str = "sweep_rate.csv";
pub const OUTAGE_R_CSV: &str = "sweep_outage_r.csv";
pub const OUTAGE_PT_CSV: &str = "sweep_outage_pt.csv";
pub const STATS_CSV: &str = "stats.csv";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const CALIBRATION_JSON: &str = "calibration.json";

const ASSUMPTIONS: [&str; 3] = [
    "Bob and Eve realizations are drawn independently; joint statistics of co-located links are not modeled.",
    "SP and LP ensembles of a bin share their Bob realizations and the geometry of Eve's conducted segment.",
    "Eve's noise follows the same power-law family as Bob's.",
];

pub fn ensemble_path(dir: &Path, scenario: Scenario, bin: BobBin) -> PathBuf {
    dir.join(format!("ensemble_{scenario}_{bin}.bin"))
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn prepare_out_dir(config: &ExperimentConfig) -> Result<&Path, ExperimentError> {
    let dir = config.out_dir.as_path();
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    Ok(dir)
}

/// CSV with a leading `# plcsec config_hash=... master_seed=...` comment.
fn write_csv<T: Serialize>(
    path: &Path,
    config: &ExperimentConfig,
    rows: &[T],
) -> Result<(), ExperimentError> {
    let mut w = BufWriter::new(File::create(path).map_err(io(path))?);
    writeln!(
        w,
        "# plcsec config_hash={} master_seed={}",
        config.config_hash(),
        config.master_seed
    )
    .map_err(io(path))?;
    let csv_err = |source| ExperimentError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_writer(w);
    for row in rows {
        writer.serialize(row).map_err(csv_err)?;
    }
    writer.flush().map_err(io(path))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io(path))
}

/// Configuration as recorded in outputs: locations are blanked so that
/// reruns elsewhere produce identical files.
fn recorded(config: &ExperimentConfig) -> ExperimentConfig {
    let mut c = config.clone();
    c.out_dir = PathBuf::new();
    if let EnsembleSource::Load { dir } = &mut c.ensemble {
        *dir = PathBuf::new();
    }
    c
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestFile {
    pub file: String,
    pub scenario: Scenario,
    pub bin: BobBin,
    pub count: usize,
    pub generator_hash: String,
    pub bob_nsnr: NsnrStats,
    pub eve_nsnr: NsnrStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub master_seed: u64,
    pub assumptions: Vec<String>,
    pub families: CalibratedFamilies,
    pub files: Vec<ManifestFile>,
    pub config: ExperimentConfig,
}

/// One ensemble file per (scenario, bin) and a manifest with seeds,
/// calibrated parameters and achieved statistics.
pub fn cmd_generate(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<Manifest, ExperimentError> {
    config.validate()?;
    if config.ensemble != EnsembleSource::Generate {
        return Err(ExperimentError::Config(
            "generate needs the generate ensemble source".into(),
        ));
    }
    let dir = prepare_out_dir(config)?;
    let families = calibrate_families(config, exec)?;
    let mut files = Vec::new();
    for &scenario in &config.scenarios {
        for &bin in &config.bins {
            let spec = families.spec(config, scenario, bin);
            let hash = spec_hash(&spec);
            let pairs =
                generate_ensemble_with(&spec, config.ensemble_size, config.master_seed, exec)?;
            let path = ensemble_path(dir, scenario, bin);
            write_ensemble(&path, &pairs, &hash, config.master_seed)?;
            files.push(ManifestFile {
                file: path
                    .file_name()
                    .expect("ensemble path has a file name")
                    .to_string_lossy()
                    .into_owned(),
                scenario,
                bin,
                count: pairs.len(),
                generator_hash: hash,
                bob_nsnr: ensemble_stats(&pairs, Side::Bob)?,
                eve_nsnr: ensemble_stats(&pairs, Side::Eve)?,
            });
        }
    }
    let manifest = Manifest {
        config_hash: config.config_hash(),
        master_seed: config.master_seed,
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        families,
        files,
        config: recorded(config),
    };
    write_json(&dir.join(MANIFEST_JSON), &manifest)?;
    Ok(manifest)
}

/// Calibration reports, also written as JSON.
pub fn cmd_calibrate(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<CalibratedFamilies, ExperimentError> {
    config.validate()?;
    let dir = prepare_out_dir(config)?;
    let mut forced = config.clone();
    forced.generator.calibrate = true;
    let families = calibrate_families(&forced, exec)?;
    write_json(&dir.join(CALIBRATION_JSON), &families)?;
    Ok(families)
}

#[derive(Debug, Clone)]
pub struct RateSweep {
    pub rows: Vec<RateRow>,
    /// Points where LP leaked more than SP.
    pub violations: Vec<String>,
}

pub fn cmd_sweep_rate(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<RateSweep, ExperimentError> {
    let dir = prepare_out_dir(config)?;
    let study = Study::run(config, &config.power_sweep_dbm, exec)?;
    let rows = study.rate_rows(&config.power_sweep_dbm);
    write_csv(&dir.join(RATE_CSV), config, &rows)?;
    let violations = ordering_violations(&rows);
    Ok(RateSweep { rows, violations })
}

pub fn cmd_sweep_outage_r(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<Vec<OutageRateRow>, ExperimentError> {
    let dir = prepare_out_dir(config)?;
    let study = Study::run(config, &config.outage_powers_dbm, exec)?;
    let rows = study.outage_rate_rows(&config.outage_powers_dbm, &config.rate_sweep);
    write_csv(&dir.join(OUTAGE_R_CSV), config, &rows)?;
    Ok(rows)
}

pub fn cmd_sweep_outage_pt(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<Vec<OutagePowerRow>, ExperimentError> {
    let dir = prepare_out_dir(config)?;
    let study = Study::run(config, &config.power_sweep_dbm, exec)?;
    let rows = study.outage_power_rows(&config.outage_rates, &config.power_sweep_dbm);
    write_csv(&dir.join(OUTAGE_PT_CSV), config, &rows)?;
    Ok(rows)
}

pub fn cmd_stats(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<Vec<StatsRow>, ExperimentError> {
    let dir = prepare_out_dir(config)?;
    let rows = family_stats(config, exec)?;
    write_csv(&dir.join(STATS_CSV), config, &rows)?;
    Ok(rows)
}

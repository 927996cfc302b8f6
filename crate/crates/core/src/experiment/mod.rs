//! Batch sweeps over scenarios, bins, allocators, powers and target rates.
//!
//! Every command is a pure function of the configuration: ensembles are drawn
//! from seeded per-pair streams, per-pair capacities are collected in index
//! order and reduced with compensated sums, so outputs are byte-identical for
//! any worker count.

pub mod commands;
pub mod config;
pub mod study;

use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::DatasetError;
use crate::metrics::MetricsError;
use crate::synthesis::SynthesisError;

pub use commands::{
    cmd_calibrate, cmd_generate, cmd_stats, cmd_sweep_outage_pt, cmd_sweep_outage_r,
    cmd_sweep_rate, ensemble_path, Command, Manifest, ManifestFile, RateSweep, CALIBRATION_JSON,
    MANIFEST_JSON, OUTAGE_PT_CSV, OUTAGE_R_CSV, RATE_CSV, STATS_CSV,
};
pub use config::{spec_hash, EnsembleSource, ExperimentConfig, GeneratorConfig};
pub use study::{
    calibrate_families, family_stats, ordering_violations, CalibratedFamilies, CellCapacities,
    OutagePowerRow, OutageRateRow, RateRow, StatsRow, Study, REFERENCE_LABEL,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing ensemble file {path}; run `generate` first or point --ensemble-dir at it")]
    MissingEnsemble { path: PathBuf },
    #[error("{path}: {reason}")]
    EnsembleMismatch { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

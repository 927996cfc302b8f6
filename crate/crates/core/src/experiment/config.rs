//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentError;
use crate::allocation::Allocator;
use crate::metrics::{BobBin, Scenario};
use crate::spectral::SpectralGrid;
use crate::synthesis::{CalibrationOptions, HybridFamily, NoiseModel, PlcFamily, ScenarioSpec};

/// Where the channel ensembles come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum EnsembleSource {
    /// Calibrate the families (unless disabled) and draw in memory.
    Generate,
    /// Read the files written by `generate` from `dir`.
    Load { dir: PathBuf },
}

/// Family templates ahead of calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub bob: PlcFamily,
    pub eve_short_path: HybridFamily,
    pub eve_long_path: HybridFamily,
    pub bob_noise: NoiseModel,
    pub eve_noise: NoiseModel,
    pub reference_power_dbm: f64,
    pub calibrate: bool,
    pub calibration: CalibrationOptions,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            bob: PlcFamily::in_home(),
            eve_short_path: HybridFamily::short_path(),
            eve_long_path: HybridFamily::long_path(),
            bob_noise: NoiseModel::in_home(),
            eve_noise: NoiseModel::in_home(),
            reference_power_dbm: 0.0,
            calibrate: true,
            calibration: CalibrationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: SpectralGrid,
    pub scenarios: Vec<Scenario>,
    pub bins: Vec<BobBin>,
    pub allocators: Vec<Allocator>,
    /// Transmit powers of the rate and outage-vs-power sweeps, dBm.
    pub power_sweep_dbm: Vec<f64>,
    /// Target rates of the outage-vs-rate sweep, bits/s/Hz.
    pub rate_sweep: Vec<f64>,
    /// Transmit powers at which outage is swept over rate, dBm.
    pub outage_powers_dbm: Vec<f64>,
    /// Target rates at which outage is swept over power, bits/s/Hz.
    pub outage_rates: Vec<f64>,
    pub ensemble_size: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub ensemble: EnsembleSource,
    pub generator: GeneratorConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: SpectralGrid::broadband_plc(),
            scenarios: Scenario::ALL.to_vec(),
            bins: BobBin::ALL.to_vec(),
            allocators: vec![Allocator::Optimal, Allocator::Uniform],
            power_sweep_dbm: (-6..=6).map(|i| 5.0 * i as f64).collect(),
            rate_sweep: (0..=32).map(|i| 0.25 * i as f64).collect(),
            outage_powers_dbm: vec![-30.0, 0.0, 30.0],
            outage_rates: vec![0.25, 0.5, 1.0],
            ensemble_size: 2000,
            master_seed: 2024,
            out_dir: PathBuf::from("results"),
            ensemble: EnsembleSource::Generate,
            generator: GeneratorConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.scenarios.is_empty() || self.bins.is_empty() || self.allocators.is_empty() {
            return bad("scenario, bin and allocator lists must be non-empty");
        }
        if self.power_sweep_dbm.is_empty()
            || self.rate_sweep.is_empty()
            || self.outage_powers_dbm.is_empty()
            || self.outage_rates.is_empty()
        {
            return bad("every sweep needs at least one point");
        }
        if self.ensemble_size == 0 {
            return bad("ensemble_size must be at least 1");
        }
        let powers = self.power_sweep_dbm.iter().chain(&self.outage_powers_dbm);
        if powers.clone().any(|p| !p.is_finite()) {
            return bad("transmit powers must be finite");
        }
        let rates = self.rate_sweep.iter().chain(&self.outage_rates);
        if rates.clone().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad("target rates must be finite and non-negative");
        }
        if has_duplicates(&self.scenarios)
            || has_duplicates(&self.bins)
            || has_duplicates(&self.allocators)
        {
            return bad("scenario, bin and allocator lists may not repeat entries");
        }
        self.generator.bob.validate()?;
        self.generator.eve_short_path.conducted.validate()?;
        self.generator.eve_long_path.conducted.validate()?;
        Ok(())
    }

    /// Uncalibrated spec of one cell.
    pub fn template(&self, scenario: Scenario, bob_bin: BobBin) -> ScenarioSpec {
        let g = &self.generator;
        ScenarioSpec {
            grid: self.grid,
            scenario,
            bob_bin,
            bob_model: g.bob.clone(),
            eve_model: match scenario {
                Scenario::ShortPath => g.eve_short_path.clone(),
                Scenario::LongPath => g.eve_long_path.clone(),
            },
            bob_noise: g.bob_noise.clone(),
            eve_noise: g.eve_noise.clone(),
            reference_power_dbm: g.reference_power_dbm,
        }
    }

    /// Transmit powers needed by any sweep, in first-seen order.
    pub fn all_powers_dbm(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &p in self.power_sweep_dbm.iter().chain(&self.outage_powers_dbm) {
            if !out.iter().any(|q| q.to_bits() == p.to_bits()) {
                out.push(p);
            }
        }
        out
    }

    /// SHA-256 over the configuration, excluding where files live.
    pub fn config_hash(&self) -> String {
        let mut view = self.clone();
        view.out_dir = PathBuf::new();
        if let EnsembleSource::Load { dir } = &mut view.ensemble {
            *dir = PathBuf::new();
        }
        let bytes = serde_json::to_vec(&view).expect("config serializes");
        hex(&Sha256::digest(bytes))
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items
        .iter()
        .enumerate()
        .any(|(i, a)| items[..i].contains(a))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hex SHA-256 of a spec's JSON form.
pub fn spec_hash(spec: &ScenarioSpec) -> String {
    hex(&Sha256::digest(
        serde_json::to_vec(spec).expect("spec serializes"),
    ))
}

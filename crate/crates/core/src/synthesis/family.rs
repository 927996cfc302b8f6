//! Random families of channel models and the per-(scenario, bin) spec.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::models::{HybridLinkModel, NoiseModel, PlcPathModel};
use super::SynthesisError;
use crate::metrics::{BobBin, Scenario};
use crate::spectral::SpectralGrid;

/// Closed interval sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRange {
    pub min: f64,
    pub max: f64,
}

impl UniformRange {
    pub const fn new(min: f64, max: f64) -> Self {
        UniformRange { min, max }
    }

    fn validate(&self, what: &str) -> Result<(), SynthesisError> {
        if self.min.is_finite() && self.max.is_finite() && self.min <= self.max {
            Ok(())
        } else {
            Err(SynthesisError::InvalidModel(format!(
                "{what} range [{}, {}] is not a finite interval",
                self.min, self.max
            )))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Always consume one draw so streams stay aligned across families.
        let u: f64 = rng.random();
        self.min + (self.max - self.min) * u
    }
}

/// Random echo-model links.
///
/// Each draw has a unit-gain direct path and `paths - 1` echoes with gains in
/// `[-echo_gain_max, echo_gain_max]`, all scaled by a log-normal level
/// `10^((-level_offset_db + level_spread_db * z) / 20)`, `z ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlcFamily {
    pub paths_min: usize,
    pub paths_max: usize,
    pub direct_length_m: UniformRange,
    pub echo_excess_m: UniformRange,
    pub echo_gain_max: f64,
    pub attenuation_a0: f64,
    pub attenuation_a1: f64,
    pub attenuation_exponent: f64,
    pub propagation_velocity: f64,
    pub level_offset_db: f64,
    pub level_spread_db: f64,
}

impl PlcFamily {
    /// In-home conducted links between two outlets, calibrated to the PLC
    /// reference statistics.
    pub fn in_home() -> Self {
        PlcFamily {
            paths_min: 2,
            paths_max: 4,
            direct_length_m: UniformRange::new(20.0, 30.0),
            echo_excess_m: UniformRange::new(2.0, 20.0),
            echo_gain_max: 0.3,
            attenuation_a0: 0.0,
            attenuation_a1: 2.2e-5,
            attenuation_exponent: 0.5,
            propagation_velocity: 2e8,
            level_offset_db: 22.17,
            level_spread_db: 8.70,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if self.paths_min == 0 || self.paths_min > self.paths_max {
            return Err(SynthesisError::InvalidModel(format!(
                "path count range {}..={} is empty or allows zero paths",
                self.paths_min, self.paths_max
            )));
        }
        self.direct_length_m.validate("direct length")?;
        self.echo_excess_m.validate("echo excess length")?;
        if !(self.direct_length_m.min > 0.0 && self.echo_excess_m.min >= 0.0) {
            return Err(SynthesisError::InvalidModel(
                "path lengths must be strictly positive".into(),
            ));
        }
        if !(self.echo_gain_max.is_finite() && self.echo_gain_max >= 0.0) {
            return Err(SynthesisError::InvalidModel(
                "echo gain bound must be non-negative".into(),
            ));
        }
        if !(self.level_offset_db.is_finite()
            && self.level_spread_db.is_finite()
            && self.level_spread_db >= 0.0)
        {
            return Err(SynthesisError::InvalidModel(
                "level offset must be finite and spread non-negative".into(),
            ));
        }
        Ok(())
    }

    /// One concrete link. The number of draws depends only on the path count.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PlcPathModel, SynthesisError> {
        self.validate()?;
        let n = rng.random_range(self.paths_min..=self.paths_max);
        let d0 = self.direct_length_m.sample(rng);
        let mut lengths = Vec::with_capacity(n);
        let mut gains = Vec::with_capacity(n);
        lengths.push(d0);
        gains.push(1.0);
        for _ in 1..n {
            lengths.push(d0 + self.echo_excess_m.sample(rng));
            let u: f64 = rng.random();
            gains.push(self.echo_gain_max * (2.0 * u - 1.0));
        }
        let z: f64 = rng.sample(StandardNormal);
        let level = 10f64.powf((-self.level_offset_db + self.level_spread_db * z) / 20.0);
        for g in &mut gains {
            *g *= level;
        }
        let model = PlcPathModel {
            path_gains: gains,
            path_lengths: lengths,
            attenuation_a0: self.attenuation_a0,
            attenuation_a1: self.attenuation_a1,
            attenuation_exponent: self.attenuation_exponent,
            propagation_velocity: self.propagation_velocity,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Random radiated side channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridFamily {
    pub conducted: PlcFamily,
    pub radiation_loss_db: f64,
    pub radiation_slope_db_per_decade: f64,
    pub fading_sigma: f64,
    pub fading_coherence_bins: usize,
}

impl HybridFamily {
    fn radiated(radiation_loss_db: f64, level_spread_db: f64) -> Self {
        HybridFamily {
            conducted: PlcFamily {
                direct_length_m: UniformRange::new(20.0, 26.0),
                level_offset_db: 0.0,
                level_spread_db,
                ..PlcFamily::in_home()
            },
            radiation_loss_db,
            radiation_slope_db_per_decade: 0.0,
            fading_sigma: 1.0,
            fading_coherence_bins: 16,
        }
    }

    /// Eavesdropper within 2 m of the transmitter.
    pub fn short_path() -> Self {
        Self::radiated(34.74, 1.35)
    }

    /// Eavesdropper within 2 m of the legitimate receiver.
    pub fn long_path() -> Self {
        Self::radiated(48.68, 3.20)
    }

    pub fn for_scenario(scenario: Scenario) -> Self {
        match scenario {
            Scenario::ShortPath => Self::short_path(),
            Scenario::LongPath => Self::long_path(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<HybridLinkModel, SynthesisError> {
        let model = HybridLinkModel {
            base: self.conducted.draw(rng)?,
            radiation_loss_db: self.radiation_loss_db,
            radiation_slope_db_per_decade: self.radiation_slope_db_per_decade,
            fading_sigma: self.fading_sigma,
            fading_coherence_bins: self.fading_coherence_bins,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Everything needed to draw the pairs of one (scenario, Bob bin) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub grid: SpectralGrid,
    pub scenario: Scenario,
    pub bob_bin: BobBin,
    pub bob_model: PlcFamily,
    pub eve_model: HybridFamily,
    pub bob_noise: NoiseModel,
    pub eve_noise: NoiseModel,
    /// Transmit power quoted alongside nSNR diagnostics. Binning itself is
    /// power-free.
    pub reference_power_dbm: f64,
}

impl ScenarioSpec {
    /// Calibrated defaults on the 2048-bin, 1.7-86 MHz grid.
    pub fn preset(scenario: Scenario, bob_bin: BobBin) -> Self {
        ScenarioSpec {
            grid: SpectralGrid::broadband_plc(),
            scenario,
            bob_bin,
            bob_model: PlcFamily::in_home(),
            eve_model: HybridFamily::for_scenario(scenario),
            bob_noise: NoiseModel::in_home(),
            eve_noise: NoiseModel::in_home(),
            reference_power_dbm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        self.bob_model.validate()?;
        self.eve_model.conducted.validate()?;
        self.bob_noise.validate()?;
        self.eve_noise.validate()?;
        if !self.reference_power_dbm.is_finite() {
            return Err(SynthesisError::InvalidModel(
                "reference power must be finite".into(),
            ));
        }
        Ok(())
    }
}

//! Synthetic PLC and hybrid PLC-wireless channel ensembles.
//!
//! Conducted links follow a multipath echo model; the radiated side channel
//! is a conducted segment followed by a coupling loss and frequency-correlated
//! Rayleigh-like fading. Family parameters are calibrated so that ensemble
//! nSNR statistics match the measured reference values in [`calibrate`].

pub mod calibrate;
pub mod ensemble;
pub mod family;
pub mod models;

use thiserror::Error;

use crate::metrics::{BobBin, MetricsError};
use crate::spectral::SpectralError;

pub use calibrate::{
    calibrate, calibrate_with, family_label, CalibrationOptions, CalibrationReport, NsnrTargets,
    HYBRID_LP_TARGETS, HYBRID_SP_TARGETS, PLC_TARGETS,
};
pub use ensemble::{
    draw_bob, draw_eve, generate_ensemble, generate_ensemble_with, sample_family_nsnr, stream_rng,
    Stream, ATTEMPT_BUDGET,
};
pub use family::{HybridFamily, PlcFamily, ScenarioSpec, UniformRange};
pub use models::{
    fading_sequence, synth_hybrid_cfr, synth_noise, synth_plc_cfr, HybridLinkModel, NoiseModel,
    PlcPathModel,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,
    #[error(
        "pair {index}: no Bob realization fell in {bin} after {attempts} attempts \
         (last nSNR {last_nsnr_db:.2} dB); the generator is likely mis-calibrated"
    )]
    RejectionBudget {
        index: usize,
        bin: BobBin,
        attempts: usize,
        last_nsnr_db: f64,
    },
    #[error(
        "{family} calibration did not converge: mean residual {mean_residual_db:.3} dB, \
         SD residual {sd_residual_db:.3} dB"
    )]
    NonConvergence {
        family: String,
        mean_residual_db: f64,
        sd_residual_db: f64,
        best: Box<family::ScenarioSpec>,
    },
}

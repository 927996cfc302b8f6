//! Deterministic and stochastic channel and noise generators.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SynthesisError;
use crate::spectral::{dbm_to_watts, SpectralGrid};

/// Multipath echo model of a conducted power-line link.
///
/// `H(f) = sum_i g_i exp(-(a0 + a1 f^K) d_i) exp(-j 2 pi f d_i / v_p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlcPathModel {
    pub path_gains: Vec<f64>,
    /// Meters.
    pub path_lengths: Vec<f64>,
    /// 1/m.
    pub attenuation_a0: f64,
    /// s^K/m.
    pub attenuation_a1: f64,
    pub attenuation_exponent: f64,
    /// m/s.
    pub propagation_velocity: f64,
}

impl PlcPathModel {
    pub fn n_paths(&self) -> usize {
        self.path_gains.len()
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if self.path_gains.is_empty() {
            return Err(SynthesisError::InvalidModel(
                "at least one path is required".into(),
            ));
        }
        if self.path_gains.len() != self.path_lengths.len() {
            return Err(SynthesisError::InvalidModel(format!(
                "{} path gains but {} path lengths",
                self.path_gains.len(),
                self.path_lengths.len()
            )));
        }
        if self.path_gains.iter().any(|g| !g.is_finite()) {
            return Err(SynthesisError::InvalidModel(
                "path gains must be finite".into(),
            ));
        }
        if self
            .path_lengths
            .iter()
            .any(|d| !(d.is_finite() && *d > 0.0))
        {
            return Err(SynthesisError::InvalidModel(
                "path lengths must be strictly positive".into(),
            ));
        }
        let v = self.propagation_velocity;
        if !(v > 0.0 && v <= 3e8) {
            return Err(SynthesisError::InvalidModel(format!(
                "propagation velocity {v} m/s is outside (0, 3e8]"
            )));
        }
        if !(self.attenuation_a0.is_finite()
            && self.attenuation_a1.is_finite()
            && self.attenuation_exponent.is_finite())
        {
            return Err(SynthesisError::InvalidModel(
                "attenuation parameters must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Frequency response of the echo model at the grid's bin centers.
pub fn synth_plc_cfr(
    model: &PlcPathModel,
    grid: &SpectralGrid,
) -> Result<Vec<Complex64>, SynthesisError> {
    model.validate()?;
    let a0 = model.attenuation_a0;
    let a1 = model.attenuation_a1;
    let k = model.attenuation_exponent;
    let v = model.propagation_velocity;
    let cfr = grid
        .bin_centers()
        .map(|f| {
            let alpha = a0 + a1 * f.abs().powf(k);
            model
                .path_gains
                .iter()
                .zip(&model.path_lengths)
                .map(|(&g, &d)| {
                    let mag = g * (-alpha * d).exp();
                    Complex64::from_polar(mag, -2.0 * PI * f * d / v)
                })
                .sum()
        })
        .collect();
    Ok(cfr)
}

/// Conducted segment followed by radiation into the air and small-scale fading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridLinkModel {
    pub base: PlcPathModel,
    /// Coupling loss at the lowest bin center, dB.
    pub radiation_loss_db: f64,
    /// Additional loss per decade of frequency above the lowest bin center.
    pub radiation_slope_db_per_decade: f64,
    pub fading_sigma: f64,
    pub fading_coherence_bins: usize,
}

impl HybridLinkModel {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        self.base.validate()?;
        if !(self.radiation_loss_db.is_finite() && self.radiation_loss_db >= 0.0) {
            return Err(SynthesisError::InvalidModel(format!(
                "radiation loss {} dB must be non-negative",
                self.radiation_loss_db
            )));
        }
        if !self.radiation_slope_db_per_decade.is_finite() {
            return Err(SynthesisError::InvalidModel(
                "radiation slope must be finite".into(),
            ));
        }
        if !(self.fading_sigma.is_finite() && self.fading_sigma >= 0.0) {
            return Err(SynthesisError::InvalidModel(format!(
                "fading sigma {} must be non-negative",
                self.fading_sigma
            )));
        }
        if self.fading_coherence_bins == 0 {
            return Err(SynthesisError::InvalidModel(
                "fading coherence must span at least one bin".into(),
            ));
        }
        Ok(())
    }
}

/// Hybrid response: conducted CFR times a deterministic radiation profile
/// times `1 + sigma * w[k]`, where `w` is unit-power circular complex Gaussian
/// noise smoothed by a boxcar of `fading_coherence_bins` taps.
pub fn synth_hybrid_cfr<R: Rng + ?Sized>(
    model: &HybridLinkModel,
    grid: &SpectralGrid,
    rng: &mut R,
) -> Result<Vec<Complex64>, SynthesisError> {
    model.validate()?;
    let mut cfr = synth_plc_cfr(&model.base, grid)?;
    let f_ref = grid.bin_center(0);
    let slope = model.radiation_slope_db_per_decade;
    if slope != 0.0 && !(f_ref > 0.0) {
        return Err(SynthesisError::InvalidModel(
            "a radiation slope needs strictly positive bin frequencies".into(),
        ));
    }
    for (h, f) in cfr.iter_mut().zip(grid.bin_centers()) {
        let tilt = if slope == 0.0 {
            0.0
        } else {
            slope * (f / f_ref).log10()
        };
        *h *= 10f64.powf(-(model.radiation_loss_db + tilt) / 20.0);
    }
    if model.fading_sigma > 0.0 {
        let fading = fading_sequence(
            grid.n_subchannels(),
            model.fading_sigma,
            model.fading_coherence_bins,
            rng,
        );
        for (h, a) in cfr.iter_mut().zip(fading) {
            *h *= a;
        }
    }
    Ok(cfr)
}

/// `1 + sigma * c[k]` with `c[k] = L^{-1/2} sum_{j=k}^{k+L-1} w[j]`, `w ~ CN(0, 1)`.
/// Lags at or beyond `L` are uncorrelated.
pub fn fading_sequence<R: Rng + ?Sized>(
    n: usize,
    sigma: f64,
    coherence_bins: usize,
    rng: &mut R,
) -> Vec<Complex64> {
    let taps = coherence_bins.max(1);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let white: Vec<Complex64> = (0..n + taps - 1)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    let norm = 1.0 / (taps as f64).sqrt();
    let mut window: Complex64 = white[..taps].iter().sum();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            window += white[k + taps - 1] - white[k - 1];
        }
        out.push(Complex64::new(1.0, 0.0) + window * (sigma * norm));
    }
    out
}

/// Power-law background noise PSD in dBm/Hz, `a + b (f / 1 MHz)^c`, plus a
/// per-realization log-normal jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub psd_a_dbm_hz: f64,
    pub psd_b: f64,
    pub psd_c: f64,
    /// Standard deviation of the jitter, dB.
    pub dispersion_db: f64,
}

impl NoiseModel {
    /// In-home background noise, falling from about -128 dBm/Hz at 1.7 MHz
    /// to -140.5 dBm/Hz at 86 MHz.
    pub fn in_home() -> Self {
        NoiseModel {
            psd_a_dbm_hz: -145.0,
            psd_b: 20.0,
            psd_c: -0.337,
            dispersion_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if !(self.psd_a_dbm_hz.is_finite() && self.psd_b.is_finite() && self.psd_c.is_finite()) {
            return Err(SynthesisError::InvalidModel(
                "noise PSD parameters must be finite".into(),
            ));
        }
        if !(self.dispersion_db.is_finite() && self.dispersion_db >= 0.0) {
            return Err(SynthesisError::InvalidModel(
                "noise dispersion must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn psd_dbm_hz(&self, f_hz: f64) -> f64 {
        if self.psd_b == 0.0 {
            self.psd_a_dbm_hz
        } else {
            self.psd_a_dbm_hz + self.psd_b * (f_hz / 1e6).powf(self.psd_c)
        }
    }
}

/// Per-bin noise power in watts. Draws from `rng` only when dispersion is set.
pub fn synth_noise<R: Rng + ?Sized>(
    model: &NoiseModel,
    grid: &SpectralGrid,
    rng: &mut R,
) -> Result<Vec<f64>, SynthesisError> {
    model.validate()?;
    if model.psd_b != 0.0 && !(grid.bin_center(0) > 0.0) {
        return Err(SynthesisError::InvalidModel(
            "a frequency-dependent noise PSD needs positive bin frequencies".into(),
        ));
    }
    let jitter = if model.dispersion_db > 0.0 {
        model.dispersion_db * rng.sample::<f64, _>(StandardNormal)
    } else {
        0.0
    };
    let width = grid.bin_width();
    let noise: Vec<f64> = grid
        .bin_centers()
        .map(|f| dbm_to_watts(model.psd_dbm_hz(f) + jitter) * width)
        .collect();
    if let Some(bin) = noise.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(SynthesisError::InvalidModel(format!(
            "noise power at bin {bin} is {} W",
            noise[bin]
        )));
    }
    Ok(noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_path(g: f64, d: f64, a0: f64, v: f64) -> PlcPathModel {
        PlcPathModel {
            path_gains: vec![g],
            path_lengths: vec![d],
            attenuation_a0: a0,
            attenuation_a1: 0.0,
            attenuation_exponent: 1.0,
            propagation_velocity: v,
        }
    }

    #[test]
    fn lossless_zero_delay_is_flat_unity() {
        // d / v_p is as close to zero as the invariants allow.
        let grid = SpectralGrid::new(16, 0.0, 16.0).unwrap();
        let cfr = synth_plc_cfr(&single_path(1.0, 1e-300, 0.0, 3e8), &grid).unwrap();
        for h in cfr {
            assert!((h - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn flat_attenuation_halves_magnitude() {
        let grid = SpectralGrid::broadband_plc();
        let model = single_path(1.0, 10.0, std::f64::consts::LN_2 / 10.0, 2e8);
        for h in synth_plc_cfr(&model, &grid).unwrap() {
            assert!((h.norm() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn two_equal_paths_notch_at_half_period() {
        // Delay difference tau = 1 us puts nulls at f = (m + 1/2) MHz.
        let v = 2e8;
        let tau = 1e-6;
        let model = PlcPathModel {
            path_gains: vec![1.0, 1.0],
            path_lengths: vec![10.0, 10.0 + tau * v],
            attenuation_a0: 0.0,
            attenuation_a1: 0.0,
            attenuation_exponent: 1.0,
            propagation_velocity: v,
        };
        // Bin centers 0.5, 1.0, 1.5, ... MHz.
        let grid = SpectralGrid::new(8, 0.25e6, 4.25e6).unwrap();
        let cfr = synth_plc_cfr(&model, &grid).unwrap();
        for (k, (h, f)) in cfr.iter().zip(grid.bin_centers()).enumerate() {
            let expected = 2.0 * (PI * f * tau).cos().abs();
            assert!((h.norm() - expected).abs() < 1e-9, "bin {k}");
        }
        assert!(cfr[0].norm() < 1e-9);
        assert!((cfr[1].norm() - 2.0).abs() < 1e-9);
        assert!(cfr[2].norm() < 1e-9);
    }

    #[test]
    fn invalid_models_rejected() {
        let grid = SpectralGrid::broadband_plc();
        assert!(synth_plc_cfr(&single_path(1.0, 0.0, 0.0, 2e8), &grid).is_err());
        assert!(synth_plc_cfr(&single_path(1.0, 1.0, 0.0, 4e8), &grid).is_err());
        let mut m = single_path(1.0, 1.0, 0.0, 2e8);
        m.path_lengths.push(2.0);
        assert!(synth_plc_cfr(&m, &grid).is_err());
    }

    fn hybrid(loss: f64, sigma: f64, coherence: usize) -> HybridLinkModel {
        HybridLinkModel {
            base: PlcPathModel {
                path_gains: vec![1.0, -0.3],
                path_lengths: vec![15.0, 27.0],
                attenuation_a0: 0.0,
                attenuation_a1: 2e-5,
                attenuation_exponent: 0.5,
                propagation_velocity: 2e8,
            },
            radiation_loss_db: loss,
            radiation_slope_db_per_decade: 0.0,
            fading_sigma: sigma,
            fading_coherence_bins: coherence,
        }
    }

    #[test]
    fn transparent_radiation_stage() {
        let grid = SpectralGrid::broadband_plc();
        let m = hybrid(0.0, 0.0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = synth_hybrid_cfr(&m, &grid, &mut rng).unwrap();
        assert_eq!(h, synth_plc_cfr(&m.base, &grid).unwrap());
    }

    #[test]
    fn flat_twenty_db_loss() {
        let grid = SpectralGrid::broadband_plc();
        let m = hybrid(20.0, 0.0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = synth_hybrid_cfr(&m, &grid, &mut rng).unwrap();
        let base = synth_plc_cfr(&m.base, &grid).unwrap();
        for (a, b) in h.iter().zip(&base) {
            assert!((a.norm() - 0.1 * b.norm()).abs() <= 1e-14 * b.norm());
        }
    }

    #[test]
    fn radiation_loss_is_monotone_per_bin() {
        let grid = SpectralGrid::new(256, 1.7e6, 86e6).unwrap();
        let mut prev: Option<Vec<Complex64>> = None;
        for loss in [0.0, 3.0, 10.0, 40.0] {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let h = synth_hybrid_cfr(&hybrid(loss, 1.0, 8), &grid, &mut rng).unwrap();
            if let Some(p) = &prev {
                for (a, b) in h.iter().zip(p) {
                    assert!(a.norm() < b.norm());
                }
            }
            prev = Some(h);
        }
    }

    #[test]
    fn radiation_slope_tilts_response() {
        let grid = SpectralGrid::new(64, 1e6, 101e6).unwrap();
        let mut m = hybrid(0.0, 0.0, 1);
        m.radiation_slope_db_per_decade = 10.0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = synth_hybrid_cfr(&m, &grid, &mut rng).unwrap();
        let base = synth_plc_cfr(&m.base, &grid).unwrap();
        let f0 = grid.bin_center(0);
        for ((a, b), f) in h.iter().zip(&base).zip(grid.bin_centers()) {
            let expected = 10f64.powf(-10.0 * (f / f0).log10() / 20.0);
            assert!((a.norm() / b.norm() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_flat_psd_conversion() {
        let grid = SpectralGrid::broadband_plc();
        let model = NoiseModel {
            psd_a_dbm_hz: -120.0,
            psd_b: 0.0,
            psd_c: 0.0,
            dispersion_db: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = synth_noise(&model, &grid, &mut rng).unwrap();
        // 1e-15 W/Hz over 41,162.109375 Hz.
        for v in &noise {
            assert!((v - 4.116_210_937_5e-11).abs() < 1e-24);
        }
        let mut other = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(noise, synth_noise(&model, &grid, &mut other).unwrap());
    }

    #[test]
    fn noise_decreasing_for_negative_exponent() {
        let grid = SpectralGrid::broadband_plc();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = synth_noise(&NoiseModel::in_home(), &grid, &mut rng).unwrap();
        assert!(noise.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn noise_dispersion_draws_per_realization() {
        let grid = SpectralGrid::new(32, 1e6, 2e6).unwrap();
        let model = NoiseModel {
            dispersion_db: 3.0,
            ..NoiseModel::in_home()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = synth_noise(&model, &grid, &mut rng).unwrap();
        let b = synth_noise(&model, &grid, &mut rng).unwrap();
        assert_ne!(a, b);
        // A single jitter shifts every bin by the same factor.
        let r0 = a[0] / b[0];
        assert!(a
            .iter()
            .zip(&b)
            .all(|(x, y)| ((x / y) / r0 - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fading_mean_is_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = fading_sequence(200_000, 0.5, 4, &mut rng);
        let mean: Complex64 = f.iter().sum::<Complex64>() / f.len() as f64;
        assert!((mean - Complex64::new(1.0, 0.0)).norm() < 0.01);
        let var = f.iter().map(|x| (x - 1.0).norm_sqr()).sum::<f64>() / f.len() as f64;
        assert!((var - 0.25).abs() < 0.01);
    }
}

//! Subchannel grid, channel realizations, power profiles and unit helpers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid needs at least one subchannel")]
    NoSubchannels,
    #[error("grid span must be positive and finite: f_start = {f_start} Hz, f_stop = {f_stop} Hz")]
    InvalidSpan { f_start: f64, f_stop: f64 },
    #[error("{what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("noise power at bin {bin} must be positive and finite, got {value}")]
    InvalidNoise { bin: usize, value: f64 },
    #[error("channel gain at bin {bin} is not finite")]
    InvalidGain { bin: usize },
    #[error("transmit power at bin {bin} must be finite and non-negative, got {value}")]
    InvalidPower { bin: usize, value: f64 },
    #[error("power must be positive to express in dBm, got {0} W")]
    NonPositivePower(f64),
}

/// Uniform lattice of `n_subchannels` bins spanning `[f_start, f_stop]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct SpectralGrid {
    n_subchannels: usize,
    f_start: f64,
    f_stop: f64,
}

#[derive(Deserialize)]
struct RawGrid {
    n_subchannels: usize,
    f_start: f64,
    f_stop: f64,
}

impl TryFrom<RawGrid> for SpectralGrid {
    type Error = SpectralError;

    fn try_from(raw: RawGrid) -> Result<Self, Self::Error> {
        SpectralGrid::new(raw.n_subchannels, raw.f_start, raw.f_stop)
    }
}

impl SpectralGrid {
    pub fn new(n_subchannels: usize, f_start: f64, f_stop: f64) -> Result<Self, SpectralError> {
        if n_subchannels == 0 {
            return Err(SpectralError::NoSubchannels);
        }
        if !(f_start.is_finite() && f_stop.is_finite() && f_stop > f_start) {
            return Err(SpectralError::InvalidSpan { f_start, f_stop });
        }
        let grid = SpectralGrid {
            n_subchannels,
            f_start,
            f_stop,
        };
        if !(grid.bin_width() > 0.0) {
            return Err(SpectralError::InvalidSpan { f_start, f_stop });
        }
        Ok(grid)
    }

    /// The 2048-bin 1.7-86 MHz broadband in-home band.
    pub fn broadband_plc() -> Self {
        SpectralGrid {
            n_subchannels: 2048,
            f_start: 1.7e6,
            f_stop: 86e6,
        }
    }

    pub fn n_subchannels(&self) -> usize {
        self.n_subchannels
    }

    pub fn f_start(&self) -> f64 {
        self.f_start
    }

    pub fn f_stop(&self) -> f64 {
        self.f_stop
    }

    pub fn bandwidth(&self) -> f64 {
        self.f_stop - self.f_start
    }

    pub fn bin_width(&self) -> f64 {
        self.bandwidth() / self.n_subchannels as f64
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.f_start + (k as f64 + 0.5) * self.bin_width()
    }

    pub fn bin_centers(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_subchannels).map(move |k| self.bin_center(k))
    }
}

/// Shorthand matching the `make_grid(n, f_start, f_stop)` operation.
pub fn make_grid(n: usize, f_start: f64, f_stop: f64) -> Result<SpectralGrid, SpectralError> {
    SpectralGrid::new(n, f_start, f_stop)
}

/// One receiver's complex frequency response and per-bin noise power (W).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    grid: SpectralGrid,
    cfr: Vec<Complex64>,
    noise_power: Vec<f64>,
}

impl ChannelRealization {
    pub fn new(
        grid: SpectralGrid,
        cfr: Vec<Complex64>,
        noise_power: Vec<f64>,
    ) -> Result<Self, SpectralError> {
        let n = grid.n_subchannels();
        if cfr.len() != n {
            return Err(SpectralError::LengthMismatch {
                what: "CFR",
                expected: n,
                got: cfr.len(),
            });
        }
        if noise_power.len() != n {
            return Err(SpectralError::LengthMismatch {
                what: "noise power",
                expected: n,
                got: noise_power.len(),
            });
        }
        if let Some(bin) = cfr.iter().position(|h| !h.norm().is_finite()) {
            return Err(SpectralError::InvalidGain { bin });
        }
        if let Some(bin) = noise_power
            .iter()
            .position(|&v| !(v.is_finite() && v > 0.0))
        {
            return Err(SpectralError::InvalidNoise {
                bin,
                value: noise_power[bin],
            });
        }
        Ok(ChannelRealization {
            grid,
            cfr,
            noise_power,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn cfr(&self) -> &[Complex64] {
        &self.cfr
    }

    pub fn noise_power(&self) -> &[f64] {
        &self.noise_power
    }

    pub fn len(&self) -> usize {
        self.cfr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cfr.is_empty()
    }

    /// Power-free per-bin gain `|H[k]|^2 / P_V[k]`, in 1/W.
    pub fn gains(&self) -> Vec<f64> {
        self.cfr
            .iter()
            .zip(&self.noise_power)
            .map(|(h, pv)| h.norm_sqr() / pv)
            .collect()
    }

    /// Same noise, response scaled by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        ChannelRealization {
            grid: self.grid,
            cfr: self.cfr.iter().map(|h| h * factor).collect(),
            noise_power: self.noise_power.clone(),
        }
    }
}

/// Per-bin transmit powers (W) and the budget they were drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    powers: Vec<f64>,
    total: f64,
}

impl PowerAllocation {
    pub fn new(powers: Vec<f64>, total: f64) -> Result<Self, SpectralError> {
        if let Some(bin) = powers.iter().position(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(SpectralError::InvalidPower {
                bin,
                value: powers[bin],
            });
        }
        Ok(PowerAllocation { powers, total })
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn allocated(&self) -> f64 {
        crate::numeric::compensated_sum(self.powers.iter().copied())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> Result<f64, SpectralError> {
    if !(watts > 0.0) {
        return Err(SpectralError::NonPositivePower(watts));
    }
    Ok(10.0 * watts.log10() + 30.0)
}

pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Per-bin SNR `P[k] |H[k]|^2 / P_V[k]`.
pub fn per_bin_snr(
    ch: &ChannelRealization,
    alloc: &PowerAllocation,
) -> Result<Vec<f64>, SpectralError> {
    if alloc.len() != ch.len() {
        return Err(SpectralError::LengthMismatch {
            what: "power allocation",
            expected: ch.len(),
            got: alloc.len(),
        });
    }
    Ok(ch
        .cfr()
        .iter()
        .zip(ch.noise_power())
        .zip(alloc.powers())
        .map(|((h, pv), p)| p * h.norm_sqr() / pv)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn channel(h2: &[f64], pv: &[f64]) -> ChannelRealization {
        let grid = SpectralGrid::new(h2.len(), 0.0, h2.len() as f64).unwrap();
        let cfr = h2.iter().map(|g| Complex64::new(g.sqrt(), 0.0)).collect();
        ChannelRealization::new(grid, cfr, pv.to_vec()).unwrap()
    }

    #[test]
    fn broadband_grid_dimensions() {
        let g = make_grid(2048, 1.7e6, 86e6).unwrap();
        assert!((g.bandwidth() - 84.3e6).abs() < 1e-6);
        assert!((g.bin_width() - 41_162.109_375).abs() < 1e-6);
        assert_eq!(g, SpectralGrid::broadband_plc());
    }

    #[test]
    fn degenerate_and_small_grids() {
        let g = make_grid(1, 0.0, 1.0).unwrap();
        assert_eq!(g.bin_width(), 1.0);
        let g = make_grid(4, 0.0, 4.0).unwrap();
        let centers: Vec<f64> = g.bin_centers().collect();
        assert_eq!(centers, vec![0.5, 1.5, 2.5, 3.5]);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert_eq!(make_grid(0, 0.0, 1.0), Err(SpectralError::NoSubchannels));
        assert!(matches!(
            make_grid(4, 1.0, 1.0),
            Err(SpectralError::InvalidSpan { .. })
        ));
        assert!(matches!(
            make_grid(4, 2.0, 1.0),
            Err(SpectralError::InvalidSpan { .. })
        ));
        assert!(make_grid(4, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn dbm_reference_points() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(-30.0) - 1e-6).abs() < 1e-21);
        assert!(watts_to_dbm(0.0).is_err());
        assert!(watts_to_dbm(-1.0).is_err());
    }

    #[test]
    fn snr_direct_evaluation() {
        let ch = channel(&[1.0, 4.0], &[1.0, 2.0]);
        let alloc = PowerAllocation::new(vec![1.0, 1.0], 2.0).unwrap();
        assert_eq!(per_bin_snr(&ch, &alloc).unwrap(), vec![1.0, 2.0]);
        let zero = PowerAllocation::new(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(per_bin_snr(&ch, &zero).unwrap(), vec![0.0, 0.0]);
        let dead = channel(&[0.0, 4.0], &[1.0, 2.0]);
        assert_eq!(per_bin_snr(&dead, &alloc).unwrap()[0], 0.0);
        let short = PowerAllocation::new(vec![1.0], 1.0).unwrap();
        assert!(matches!(
            per_bin_snr(&ch, &short),
            Err(SpectralError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn realization_validates_vectors() {
        let grid = make_grid(2, 0.0, 2.0).unwrap();
        let cfr = vec![Complex64::new(1.0, 0.0); 2];
        assert!(matches!(
            ChannelRealization::new(grid, cfr.clone(), vec![1.0, 0.0]),
            Err(SpectralError::InvalidNoise { bin: 1, .. })
        ));
        assert!(matches!(
            ChannelRealization::new(grid, cfr.clone(), vec![1.0]),
            Err(SpectralError::LengthMismatch { .. })
        ));
        let bad = vec![Complex64::new(f64::INFINITY, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(
            ChannelRealization::new(grid, bad, vec![1.0, 1.0]),
            Err(SpectralError::InvalidGain { bin: 0 })
        ));
    }

    proptest! {
        #[test]
        fn dbm_round_trip(w in 1e-9f64..1e3) {
            let back = dbm_to_watts(watts_to_dbm(w).unwrap());
            prop_assert!(((back - w) / w).abs() <= 1e-12);
        }

        #[test]
        fn snr_linear_in_power(p in 0.0f64..10.0, h2 in 0.0f64..100.0, pv in 1e-6f64..10.0) {
            let ch = channel(&[h2], &[pv]);
            let a = PowerAllocation::new(vec![p], p).unwrap();
            let b = PowerAllocation::new(vec![2.0 * p], 2.0 * p).unwrap();
            let sa = per_bin_snr(&ch, &a).unwrap()[0];
            let sb = per_bin_snr(&ch, &b).unwrap()[0];
            prop_assert_eq!(sb, 2.0 * sa);
        }

        #[test]
        fn bin_centers_inside_and_increasing(n in 1usize..4096, f0 in -1e6f64..1e8, span in 1e-3f64..1e8) {
            let g = make_grid(n, f0, f0 + span).unwrap();
            let c: Vec<f64> = g.bin_centers().collect();
            prop_assert!(c[0] > g.f_start());
            prop_assert!(c[n - 1] < g.f_stop());
            prop_assert!(c.windows(2).all(|w| w[1] > w[0]));
        }
    }
}

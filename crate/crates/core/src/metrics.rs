//! Secrecy quantities of the hybrid wiretap channel.
//!
//! Capacities are in bits per N-block use, secrecy rates in bits/s/Hz and
//! ergodic rates in bits/s. Capacities are always evaluated in the log domain,
//! which keeps the determinant forms finite at N = 2048.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocation::{AllocationError, Allocator};
use crate::exec::Execution;
use crate::numeric::{compensated_sum, mean, sample_sd, wilson_interval, Z_95};
use crate::spectral::{lin_to_db, ChannelRealization, PowerAllocation, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("Bob and Eve realizations differ in length ({bob} vs {eve} bins)")]
    PairMismatch { bob: usize, eve: usize },
    #[error("target secrecy rate must be finite and non-negative, got {0}")]
    InvalidTarget(f64),
    #[error("pair {index}: {source}")]
    AtPair {
        index: usize,
        #[source]
        source: Box<MetricsError>,
    },
}

/// Where the eavesdropper sits: within 2 m of Alice (short path) or of Bob
/// (long path).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "SP")]
    ShortPath,
    #[serde(rename = "LP")]
    LongPath,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::ShortPath, Scenario::LongPath];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::ShortPath => "SP",
            Scenario::LongPath => "LP",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SP" | "sp" => Ok(Scenario::ShortPath),
            "LP" | "lp" => Ok(Scenario::LongPath),
            other => Err(format!("unknown scenario {other:?}, expected SP or LP")),
        }
    }
}

/// Range of Bob's normalized SNR, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BobBin {
    /// `[51.1, 61.1)` dB
    #[serde(rename = "bin1")]
    Low,
    /// `[61.1, 72.3)` dB
    #[serde(rename = "bin2")]
    Mid,
    /// `[72.3, 82.9]` dB
    #[serde(rename = "bin3")]
    High,
}

impl BobBin {
    pub const ALL: [BobBin; 3] = [BobBin::Low, BobBin::Mid, BobBin::High];

    pub fn label(self) -> &'static str {
        match self {
            BobBin::Low => "bin1",
            BobBin::Mid => "bin2",
            BobBin::High => "bin3",
        }
    }

    /// Lower and upper edge in dB.
    pub fn edges_db(self) -> (f64, f64) {
        match self {
            BobBin::Low => (51.1, 61.1),
            BobBin::Mid => (61.1, 72.3),
            BobBin::High => (72.3, 82.9),
        }
    }

    pub fn contains(self, nsnr_db: f64) -> bool {
        classify_bin(nsnr_db) == Some(self)
    }
}

impl std::fmt::Display for BobBin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for BobBin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bin1" => Ok(BobBin::Low),
            "bin2" => Ok(BobBin::Mid),
            "bin3" => Ok(BobBin::High),
            other => Err(format!(
                "unknown bin {other:?}, expected bin1, bin2 or bin3"
            )),
        }
    }
}

/// Half-open partition `[51.1, 61.1)`, `[61.1, 72.3)`, closed `[72.3, 82.9]`.
/// Anything else, including non-finite input, is out of range.
pub fn classify_bin(nsnr_db: f64) -> Option<BobBin> {
    if !nsnr_db.is_finite() {
        return None;
    }
    if (51.1..61.1).contains(&nsnr_db) {
        Some(BobBin::Low)
    } else if (61.1..72.3).contains(&nsnr_db) {
        Some(BobBin::Mid)
    } else if (72.3..=82.9).contains(&nsnr_db) {
        Some(BobBin::High)
    } else {
        None
    }
}

/// Which receiver of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Bob,
    Eve,
}

/// A Bob and an Eve realization on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WiretapPair {
    bob: ChannelRealization,
    eve: ChannelRealization,
    scenario: Scenario,
    bob_bin: BobBin,
}

impl WiretapPair {
    pub fn new(
        bob: ChannelRealization,
        eve: ChannelRealization,
        scenario: Scenario,
        bob_bin: BobBin,
    ) -> Result<Self, MetricsError> {
        if bob.grid() != eve.grid() {
            return Err(MetricsError::PairMismatch {
                bob: bob.len(),
                eve: eve.len(),
            });
        }
        Ok(WiretapPair {
            bob,
            eve,
            scenario,
            bob_bin,
        })
    }

    pub fn bob(&self) -> &ChannelRealization {
        &self.bob
    }

    pub fn eve(&self) -> &ChannelRealization {
        &self.eve
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn bob_bin(&self) -> BobBin {
        self.bob_bin
    }

    pub fn n_subchannels(&self) -> usize {
        self.bob.len()
    }

    pub fn side(&self, side: Side) -> &ChannelRealization {
        match side {
            Side::Bob => &self.bob,
            Side::Eve => &self.eve,
        }
    }

    /// Same pair with Eve's response zeroed, i.e. an eavesdropper far away.
    pub fn without_eavesdropper(&self) -> Self {
        WiretapPair {
            eve: self.eve.scaled(0.0),
            ..self.clone()
        }
    }
}

/// Capacities of one pair under one allocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecrecyOutcome {
    pub c_b: f64,
    pub c_e: f64,
    /// `max(0, (c_b - c_e) / N)` in bits/s/Hz.
    pub r_s: f64,
    /// `r_s < target`.
    pub outage: bool,
}

impl SecrecyOutcome {
    pub fn from_capacities(c_b: f64, c_e: f64, n: usize, target_rate: f64) -> Self {
        let r_s = ((c_b - c_e) / n as f64).max(0.0);
        SecrecyOutcome {
            c_b,
            c_e,
            r_s,
            outage: r_s < target_rate,
        }
    }
}

fn capacity_from_gains(gains: impl Iterator<Item = f64>) -> f64 {
    compensated_sum(gains.map(f64::ln_1p)) / LN_2
}

/// `C_l = sum_k log2(1 + P[k] |H_l[k]|^2 / P_V[k])`.
pub fn link_capacity(
    ch: &ChannelRealization,
    alloc: &PowerAllocation,
) -> Result<f64, MetricsError> {
    let snr = crate::spectral::per_bin_snr(ch, alloc)?;
    Ok(capacity_from_gains(snr.into_iter()))
}

/// Normalized multichannel SNR, `det(I + diag(|H|^2 / P_V))^(1/N) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Nsnr(pub f64);

impl Nsnr {
    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        lin_to_db(self.0)
    }
}

/// Geometric-mean SNR over bins, evaluated as `exp(mean ln(1 + g)) - 1`.
pub fn nsnr(ch: &ChannelRealization) -> Nsnr {
    let n = ch.len() as f64;
    let mean_log = compensated_sum(
        ch.cfr()
            .iter()
            .zip(ch.noise_power())
            .map(|(h, pv)| (h.norm_sqr() / pv).ln_1p()),
    ) / n;
    Nsnr(mean_log.exp_m1())
}

/// Capacities and secrecy rate of a pair under an allocation derived from Bob.
pub fn secrecy_outcome(
    pair: &WiretapPair,
    alloc: &PowerAllocation,
    target_rate: f64,
) -> Result<SecrecyOutcome, MetricsError> {
    let c_b = link_capacity(pair.bob(), alloc)?;
    let c_e = link_capacity(pair.eve(), alloc)?;
    Ok(SecrecyOutcome::from_capacities(
        c_b,
        c_e,
        pair.n_subchannels(),
        target_rate,
    ))
}

/// `R_S = [C_B - C_E]^+ / N`, both capacities under the same allocation.
pub fn secrecy_rate(pair: &WiretapPair, alloc: &PowerAllocation) -> Result<f64, MetricsError> {
    Ok(secrecy_outcome(pair, alloc, 0.0)?.r_s)
}

/// Per-pair capacities under `allocator` at `total_power`, in ensemble order.
pub fn evaluate_ensemble(
    pairs: &[WiretapPair],
    allocator: Allocator,
    total_power: f64,
    exec: Execution,
) -> Result<Vec<SecrecyOutcome>, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyEnsemble);
    }
    exec.try_map(pairs.len(), |i| {
        let pair = &pairs[i];
        allocator
            .allocate(pair.bob(), total_power)
            .map_err(MetricsError::from)
            .and_then(|alloc| secrecy_outcome(pair, &alloc, 0.0))
            .map_err(|e| MetricsError::AtPair {
                index: i,
                source: Box::new(e),
            })
    })
}

/// Ergodic secrecy rate `B_w E[R_S]` with the standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicRate {
    pub mean_bps: f64,
    pub stderr_bps: f64,
}

impl ErgodicRate {
    pub fn from_rates(secrecy_rates: &[f64], bandwidth: f64) -> Self {
        let m = secrecy_rates.len() as f64;
        ErgodicRate {
            mean_bps: bandwidth * mean(secrecy_rates),
            stderr_bps: bandwidth * sample_sd(secrecy_rates) / m.sqrt(),
        }
    }
}

pub fn ergodic_secrecy_rate(
    pairs: &[WiretapPair],
    allocator: Allocator,
    total_power: f64,
    bandwidth: f64,
) -> Result<ErgodicRate, MetricsError> {
    let outcomes = evaluate_ensemble(pairs, allocator, total_power, Execution::default())?;
    let rates: Vec<f64> = outcomes.iter().map(|o| o.r_s).collect();
    Ok(ErgodicRate::from_rates(&rates, bandwidth))
}

/// Fraction of pairs in outage with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub probability: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub outages: usize,
    pub trials: usize,
}

impl OutageEstimate {
    pub fn from_rates(secrecy_rates: &[f64], target_rate: f64) -> Self {
        let trials = secrecy_rates.len();
        let outages = secrecy_rates.iter().filter(|&&r| r < target_rate).count();
        let (ci_lo, ci_hi) = wilson_interval(outages, trials, Z_95);
        OutageEstimate {
            probability: outages as f64 / trials as f64,
            ci_lo,
            ci_hi,
            outages,
            trials,
        }
    }
}

/// `P{R_S < R}` over the ensemble. `R_S = R` is not an outage.
pub fn outage_probability(
    pairs: &[WiretapPair],
    allocator: Allocator,
    total_power: f64,
    target_rate: f64,
) -> Result<OutageEstimate, MetricsError> {
    if !(target_rate.is_finite() && target_rate >= 0.0) {
        return Err(MetricsError::InvalidTarget(target_rate));
    }
    let outcomes = evaluate_ensemble(pairs, allocator, total_power, Execution::default())?;
    let rates: Vec<f64> = outcomes.iter().map(|o| o.r_s).collect();
    Ok(OutageEstimate::from_rates(&rates, target_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;
    use num_complex::Complex64;

    fn realization(snr: &[f64]) -> ChannelRealization {
        let grid = SpectralGrid::new(snr.len(), 0.0, 1.0).unwrap();
        let cfr = snr.iter().map(|s| Complex64::new(s.sqrt(), 0.0)).collect();
        ChannelRealization::new(grid, cfr, vec![1.0; snr.len()]).unwrap()
    }

    fn unit_power(n: usize) -> PowerAllocation {
        PowerAllocation::new(vec![1.0; n], n as f64).unwrap()
    }

    #[test]
    fn capacity_examples() {
        let c = link_capacity(&realization(&[1.0; 4]), &unit_power(4)).unwrap();
        assert!((c - 4.0).abs() < 1e-15);
        let zero = PowerAllocation::new(vec![0.0; 2], 1.0).unwrap();
        assert_eq!(
            link_capacity(&realization(&[3.0, 1.0]), &zero).unwrap(),
            0.0
        );
        let c = link_capacity(&realization(&[3.0, 1.0]), &unit_power(2)).unwrap();
        assert!((c - 3.0).abs() < 1e-15);
    }

    #[test]
    fn nsnr_examples() {
        let flat = nsnr(&realization(&[7.5; 16]));
        assert!((flat.linear() - 7.5).abs() <= 7.5 * 1e-12);
        let two = nsnr(&realization(&[1.0, 3.0]));
        assert!((two.linear() - (8f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(nsnr(&realization(&[0.0, 0.0])).linear(), 0.0);
    }

    #[test]
    fn bin_edges() {
        assert_eq!(classify_bin(70.2), Some(BobBin::Mid));
        assert_eq!(classify_bin(61.1), Some(BobBin::Mid));
        assert_eq!(classify_bin(51.1), Some(BobBin::Low));
        assert_eq!(classify_bin(72.3), Some(BobBin::High));
        assert_eq!(classify_bin(82.9), Some(BobBin::High));
        assert_eq!(classify_bin(51.0999), None);
        assert_eq!(classify_bin(82.9001), None);
        assert_eq!(classify_bin(90.0), None);
        assert_eq!(classify_bin(f64::NEG_INFINITY), None);
        assert_eq!(classify_bin(f64::NAN), None);
    }

    #[test]
    fn secrecy_rate_examples() {
        let bob = realization(&[3.0, 1.0]);
        let pair = WiretapPair::new(
            bob.clone(),
            realization(&[1.0, 0.0]),
            Scenario::ShortPath,
            BobBin::Low,
        )
        .unwrap();
        let alloc = unit_power(2);
        assert!((secrecy_rate(&pair, &alloc).unwrap() - 1.0).abs() < 1e-15);

        let same =
            WiretapPair::new(bob.clone(), bob.clone(), Scenario::LongPath, BobBin::Low).unwrap();
        assert_eq!(secrecy_rate(&same, &alloc).unwrap(), 0.0);

        let blind = same.without_eavesdropper();
        let c_b = link_capacity(&bob, &alloc).unwrap();
        assert_eq!(secrecy_rate(&blind, &alloc).unwrap(), c_b / 2.0);
    }

    #[test]
    fn pair_requires_shared_grid() {
        let r = WiretapPair::new(
            realization(&[1.0, 1.0]),
            realization(&[1.0]),
            Scenario::ShortPath,
            BobBin::Low,
        );
        assert!(matches!(r, Err(MetricsError::PairMismatch { .. })));
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        assert_eq!(
            ergodic_secrecy_rate(&[], Allocator::Uniform, 1.0, 1.0),
            Err(MetricsError::EmptyEnsemble)
        );
        assert_eq!(
            outage_probability(&[], Allocator::Uniform, 1.0, 0.5),
            Err(MetricsError::EmptyEnsemble)
        );
    }

    #[test]
    fn boundary_rate_is_not_outage() {
        let o = SecrecyOutcome::from_capacities(4.0, 2.0, 2, 1.0);
        assert_eq!(o.r_s, 1.0);
        assert!(!o.outage);
        let o = SecrecyOutcome::from_capacities(1.0, 3.0, 2, 0.0);
        assert_eq!(o.r_s, 0.0);
        assert!(!o.outage);
    }

    #[test]
    fn outage_counts_exactly() {
        let rates = [0.0, 0.1, 0.5, 0.9, 1.0, 2.0];
        let est = OutageEstimate::from_rates(&rates, 1.0);
        assert_eq!(est.outages, 4);
        assert_eq!(est.probability, 4.0 / 6.0);
        assert!(est.ci_lo <= est.probability && est.probability <= est.ci_hi);
        assert_eq!(OutageEstimate::from_rates(&rates, 0.0).probability, 0.0);
    }
}

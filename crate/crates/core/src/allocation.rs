//! Transmit power allocation over subchannels under a total power budget.
//!
//! [`waterfill`] maximizes `sum_k log2(1 + P_k g_k)` subject to
//! `sum_k P_k <= P_T`, `P_k >= 0`, where `g_k = |H_B[k]|^2 / P_V[k]` are Bob's
//! power-free gains. [`uniform`] spreads the budget evenly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::compensated_sum;
use crate::spectral::{ChannelRealization, PowerAllocation};

/// Gains at or below this value are treated as dead subchannels.
pub const GAIN_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocationError {
    #[error("total power must be positive and finite, got {0} W")]
    InvalidBudget(f64),
    #[error("gain at bin {bin} must be finite and non-negative, got {value}")]
    InvalidGain { bin: usize, value: f64 },
    #[error("every subchannel gain is zero; no allocation can carry information")]
    AllZeroGains,
    #[error("allocation needs at least one subchannel")]
    NoSubchannels,
    #[error("mask has {got} entries, expected {expected}")]
    MaskLength { expected: usize, got: usize },
    #[error("mask selects no active subchannel")]
    EmptyMask,
}

/// Power allocation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Allocator {
    /// Water-filling on Bob's gains.
    #[serde(rename = "OA")]
    Optimal,
    /// Equal power on every subchannel.
    #[serde(rename = "UA")]
    Uniform,
}

impl Allocator {
    pub fn label(self) -> &'static str {
        match self {
            Allocator::Optimal => "OA",
            Allocator::Uniform => "UA",
        }
    }

    /// Allocation for a link whose receiver is `bob`. Eve never enters.
    pub fn allocate(
        self,
        bob: &ChannelRealization,
        total_power: f64,
    ) -> Result<PowerAllocation, AllocationError> {
        self.allocate_gains(&bob.gains(), total_power)
    }

    /// Same as [`Allocator::allocate`] from precomputed `|H_B|^2 / P_V`.
    pub fn allocate_gains(
        self,
        gains: &[f64],
        total_power: f64,
    ) -> Result<PowerAllocation, AllocationError> {
        match self {
            Allocator::Optimal => Ok(waterfill(gains, total_power)?.allocation),
            Allocator::Uniform => uniform(gains.len(), total_power, None),
        }
    }
}

impl std::fmt::Display for Allocator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Allocator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "OA" | "oa" => Ok(Allocator::Optimal),
            "UA" | "ua" => Ok(Allocator::Uniform),
            other => Err(format!("unknown allocator {other:?}, expected OA or UA")),
        }
    }
}

/// Water-filling solution with its KKT certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution {
    pub allocation: PowerAllocation,
    /// Water level: `P_k + 1/g_k` on every active bin.
    pub level: f64,
    /// Active bins in the order they entered (ascending `1/g`, ties by index).
    pub active: Vec<usize>,
}

/// Exact sort-based water-filling.
///
/// Inverse gains are sorted ascending and the active set is grown one bin at a
/// time; for `m` active bins the level is `(P_T + sum of their 1/g) / m` and the
/// next bin joins only while its `1/g` lies strictly below that level.
pub fn waterfill(gains: &[f64], total_power: f64) -> Result<WaterfillSolution, AllocationError> {
    if !(total_power.is_finite() && total_power > 0.0) {
        return Err(AllocationError::InvalidBudget(total_power));
    }
    if gains.is_empty() {
        return Err(AllocationError::NoSubchannels);
    }
    if let Some(bin) = gains.iter().position(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(AllocationError::InvalidGain {
            bin,
            value: gains[bin],
        });
    }

    let mut order: Vec<(f64, usize)> = gains
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > GAIN_FLOOR)
        .map(|(k, &g)| (1.0 / g, k))
        .collect();
    if order.is_empty() {
        return Err(AllocationError::AllZeroGains);
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Grow the active prefix with a compensated running sum of 1/g.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut active = 0usize;
    let mut level = f64::INFINITY;
    for (m, &(inv, _)) in order.iter().enumerate() {
        if m > 0 && inv >= level {
            break;
        }
        let t = sum + inv;
        if sum.abs() >= inv.abs() {
            comp += (sum - t) + inv;
        } else {
            comp += (inv - t) + sum;
        }
        sum = t;
        active = m + 1;
        level = (total_power + (sum + comp)) / active as f64;
    }

    // Powers as share plus deviation from the mean 1/g, which avoids the
    // cancellation in `level - 1/g` when the level dwarfs the budget.
    let prefix = &order[..active];
    let m = active as f64;
    let mean_inv = (sum + comp) / m;
    let mut powers = vec![0.0; gains.len()];
    let fill = |share: f64, powers: &mut [f64]| {
        for &(inv, k) in prefix {
            powers[k] = (share + (mean_inv - inv)).max(0.0);
        }
    };
    let mut share = total_power / m;
    fill(share, &mut powers);
    let used = compensated_sum(prefix.iter().map(|&(_, k)| powers[k]));
    let corrected = share + (total_power - used) / m;
    if corrected.is_finite() && corrected > 0.0 && used != total_power {
        share = corrected;
        fill(share, &mut powers);
    }
    level = share + mean_inv;

    let allocation = PowerAllocation::new(powers, total_power)
        .expect("water-filling powers are finite and non-negative");
    Ok(WaterfillSolution {
        allocation,
        level,
        active: prefix.iter().map(|&(_, k)| k).collect(),
    })
}

/// Equal split of `total_power` over the active bins (all bins without a mask).
pub fn uniform(
    n: usize,
    total_power: f64,
    active_mask: Option<&[bool]>,
) -> Result<PowerAllocation, AllocationError> {
    if n == 0 {
        return Err(AllocationError::NoSubchannels);
    }
    if !(total_power.is_finite() && total_power > 0.0) {
        return Err(AllocationError::InvalidBudget(total_power));
    }
    let powers = match active_mask {
        None => vec![total_power / n as f64; n],
        Some(mask) => {
            if mask.len() != n {
                return Err(AllocationError::MaskLength {
                    expected: n,
                    got: mask.len(),
                });
            }
            let count = mask.iter().filter(|&&on| on).count();
            if count == 0 {
                return Err(AllocationError::EmptyMask);
            }
            let share = total_power / count as f64;
            mask.iter()
                .map(|&on| if on { share } else { 0.0 })
                .collect()
        }
    };
    Ok(PowerAllocation::new(powers, total_power).expect("uniform split is valid"))
}

/// `sum_k log2(1 + P_k g_k)`.
pub fn sum_rate(gains: &[f64], powers: &[f64]) -> f64 {
    compensated_sum(gains.iter().zip(powers).map(|(g, p)| (p * g).ln_1p())) / std::f64::consts::LN_2
}

//! Capacity tables and the rows derived from them.

use serde::Serialize;

use super::commands::ensemble_path;
use super::config::{EnsembleSource, ExperimentConfig};
use super::ExperimentError;
use crate::allocation::{sum_rate, Allocator};
use crate::dataset::{read_ensemble, NsnrStats};
use crate::exec::Execution;
use crate::metrics::{
    nsnr, BobBin, ErgodicRate, MetricsError, OutageEstimate, Scenario, Side, WiretapPair,
};
use crate::spectral::dbm_to_watts;
use crate::synthesis::{
    calibrate_with, family_label, generate_ensemble_with, sample_family_nsnr, CalibrationReport,
    HybridFamily, NsnrTargets, PlcFamily, ScenarioSpec,
};

/// Scenario label of the no-eavesdropper reference series.
pub const REFERENCE_LABEL: &str = "CE0";

/// Family parameters after calibration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibratedFamilies {
    pub bob: PlcFamily,
    pub eve_short_path: HybridFamily,
    pub eve_long_path: HybridFamily,
    pub reports: Vec<CalibrationReport>,
}

impl CalibratedFamilies {
    pub fn spec(&self, config: &ExperimentConfig, scenario: Scenario, bin: BobBin) -> ScenarioSpec {
        ScenarioSpec {
            bob_model: self.bob.clone(),
            eve_model: match scenario {
                Scenario::ShortPath => self.eve_short_path.clone(),
                Scenario::LongPath => self.eve_long_path.clone(),
            },
            ..config.template(scenario, bin)
        }
    }
}

/// Calibrates Bob's family and the radiated family of every configured
/// scenario. With calibration disabled the templates pass through.
pub fn calibrate_families(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<CalibratedFamilies, ExperimentError> {
    let g = &config.generator;
    let mut out = CalibratedFamilies {
        bob: g.bob.clone(),
        eve_short_path: g.eve_short_path.clone(),
        eve_long_path: g.eve_long_path.clone(),
        reports: Vec::new(),
    };
    if !g.calibrate {
        return Ok(out);
    }
    let first = config.scenarios[0];
    let template = config.template(first, config.bins[0]);
    let report = calibrate_with(
        &template,
        Side::Bob,
        &NsnrTargets::for_family(Side::Bob, first),
        &g.calibration,
        exec,
    )?;
    out.bob = report.spec.bob_model.clone();
    out.reports.push(report);
    for &scenario in &config.scenarios {
        let template = config.template(scenario, config.bins[0]);
        let report = calibrate_with(
            &template,
            Side::Eve,
            &NsnrTargets::for_family(Side::Eve, scenario),
            &g.calibration,
            exec,
        )?;
        match scenario {
            Scenario::ShortPath => out.eve_short_path = report.spec.eve_model.clone(),
            Scenario::LongPath => out.eve_long_path = report.spec.eve_model.clone(),
        }
        out.reports.push(report);
    }
    Ok(out)
}

/// Per-pair Bob and Eve capacities at one (allocator, power) point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCapacities {
    pub c_b: Vec<f64>,
    pub c_e: Vec<f64>,
}

/// Capacities of one (scenario, bin) ensemble over allocators and powers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCapacities {
    pub scenario: Scenario,
    pub bin: BobBin,
    pub n_subchannels: usize,
    /// Indexed `[allocator][power]`.
    pub points: Vec<Vec<PointCapacities>>,
}

impl CellCapacities {
    pub fn evaluate(
        pairs: &[WiretapPair],
        allocators: &[Allocator],
        powers_dbm: &[f64],
        exec: Execution,
    ) -> Result<Self, ExperimentError> {
        let first = pairs.first().ok_or(MetricsError::EmptyEnsemble)?;
        let per_pair = exec.try_map(pairs.len(), |i| {
            let pair = &pairs[i];
            let gb = pair.bob().gains();
            let ge = pair.eve().gains();
            let mut caps = Vec::with_capacity(allocators.len() * powers_dbm.len());
            for &a in allocators {
                for &p in powers_dbm {
                    let alloc = a.allocate_gains(&gb, dbm_to_watts(p)).map_err(|e| {
                        MetricsError::AtPair {
                            index: i,
                            source: Box::new(e.into()),
                        }
                    })?;
                    caps.push((sum_rate(&gb, alloc.powers()), sum_rate(&ge, alloc.powers())));
                }
            }
            Ok::<_, MetricsError>(caps)
        })?;
        let mut points = Vec::with_capacity(allocators.len());
        for ai in 0..allocators.len() {
            let mut row = Vec::with_capacity(powers_dbm.len());
            for pi in 0..powers_dbm.len() {
                let j = ai * powers_dbm.len() + pi;
                row.push(PointCapacities {
                    c_b: per_pair.iter().map(|c| c[j].0).collect(),
                    c_e: per_pair.iter().map(|c| c[j].1).collect(),
                });
            }
            points.push(row);
        }
        Ok(CellCapacities {
            scenario: first.scenario(),
            bin: first.bob_bin(),
            n_subchannels: first.n_subchannels(),
            points,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub scenario: String,
    pub bin: String,
    pub allocator: String,
    pub p_t_dbm: f64,
    pub ergodic_rate_bps: f64,
    pub stderr_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageRateRow {
    pub scenario: String,
    pub bin: String,
    pub allocator: String,
    pub p_t_dbm: f64,
    pub target_r: f64,
    pub p_s: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutagePowerRow {
    pub scenario: String,
    pub bin: String,
    pub allocator: String,
    pub target_r: f64,
    pub p_t_dbm: f64,
    pub p_s: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Capacity tables of every configured cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub scenarios: Vec<Scenario>,
    pub bins: Vec<BobBin>,
    pub allocators: Vec<Allocator>,
    pub powers_dbm: Vec<f64>,
    pub bandwidth: f64,
    pub cells: Vec<CellCapacities>,
    pub calibration: Option<CalibratedFamilies>,
}

/// Loads one ensemble file and checks it against the configuration.
pub(crate) fn load_cell(
    config: &ExperimentConfig,
    dir: &std::path::Path,
    scenario: Scenario,
    bin: BobBin,
) -> Result<Vec<WiretapPair>, ExperimentError> {
    let path = ensemble_path(dir, scenario, bin);
    if !path.exists() {
        return Err(ExperimentError::MissingEnsemble { path });
    }
    let file = read_ensemble(&path)?;
    let mismatch = |reason: String| ExperimentError::EnsembleMismatch {
        path: path.clone(),
        reason,
    };
    if file.header.scenario != scenario || file.header.bob_bin != bin {
        return Err(mismatch(format!(
            "holds {}/{} pairs, expected {scenario}/{bin}",
            file.header.scenario, file.header.bob_bin
        )));
    }
    if file.header.grid != config.grid {
        return Err(mismatch("grid differs from the configured grid".into()));
    }
    Ok(file.pairs)
}

impl Study {
    /// Capacities at `powers_dbm` for every configured cell, one ensemble in
    /// memory at a time.
    pub fn run(
        config: &ExperimentConfig,
        powers_dbm: &[f64],
        exec: Execution,
    ) -> Result<Study, ExperimentError> {
        config.validate()?;
        let calibration = match &config.ensemble {
            EnsembleSource::Generate => Some(calibrate_families(config, exec)?),
            EnsembleSource::Load { .. } => None,
        };
        let mut cells = Vec::new();
        for &scenario in &config.scenarios {
            for &bin in &config.bins {
                let pairs = match (&config.ensemble, &calibration) {
                    (EnsembleSource::Load { dir }, _) => load_cell(config, dir, scenario, bin)?,
                    (EnsembleSource::Generate, Some(cal)) => generate_ensemble_with(
                        &cal.spec(config, scenario, bin),
                        config.ensemble_size,
                        config.master_seed,
                        exec,
                    )?,
                    (EnsembleSource::Generate, None) => unreachable!("generate source calibrates"),
                };
                cells.push(CellCapacities::evaluate(
                    &pairs,
                    &config.allocators,
                    powers_dbm,
                    exec,
                )?);
            }
        }
        Ok(Study {
            scenarios: config.scenarios.clone(),
            bins: config.bins.clone(),
            allocators: config.allocators.clone(),
            powers_dbm: powers_dbm.to_vec(),
            bandwidth: config.grid.bandwidth(),
            cells,
            calibration,
        })
    }

    fn point(
        &self,
        scenario: Scenario,
        bin: BobBin,
        a: Allocator,
        p: f64,
    ) -> (&CellCapacities, &PointCapacities) {
        let cell = self
            .cells
            .iter()
            .find(|c| c.scenario == scenario && c.bin == bin)
            .expect("cell was evaluated");
        let ai = self
            .allocators
            .iter()
            .position(|&x| x == a)
            .expect("allocator configured");
        let pi = self
            .powers_dbm
            .iter()
            .position(|q| q.to_bits() == p.to_bits())
            .expect("power evaluated");
        (cell, &cell.points[ai][pi])
    }

    /// `R_S` of every pair of a cell.
    pub fn secrecy_rates(
        &self,
        scenario: Scenario,
        bin: BobBin,
        a: Allocator,
        p_dbm: f64,
    ) -> Vec<f64> {
        let (cell, pt) = self.point(scenario, bin, a, p_dbm);
        let n = cell.n_subchannels as f64;
        pt.c_b
            .iter()
            .zip(&pt.c_e)
            .map(|(b, e)| ((b - e) / n).max(0.0))
            .collect()
    }

    /// `C_B / N` over the distinct Bob ensembles of a bin. Scenarios whose
    /// Bob capacities coincide (shared realizations) count once.
    pub fn reference_rates(&self, bin: BobBin, a: Allocator, p_dbm: f64) -> Vec<f64> {
        let mut seen: Vec<&Vec<f64>> = Vec::new();
        let mut out = Vec::new();
        for &s in &self.scenarios {
            let (cell, pt) = self.point(s, bin, a, p_dbm);
            if seen.iter().any(|v| **v == pt.c_b) {
                continue;
            }
            seen.push(&pt.c_b);
            let n = cell.n_subchannels as f64;
            out.extend(pt.c_b.iter().map(|b| b / n));
        }
        out
    }

    /// Ergodic rate per (scenario, bin, allocator, power), followed by the
    /// reference series.
    pub fn rate_rows(&self, powers_dbm: &[f64]) -> Vec<RateRow> {
        let mut rows = Vec::new();
        let mut push = |scenario: &str, bin: BobBin, a: Allocator, p: f64, rates: &[f64]| {
            let e = ErgodicRate::from_rates(rates, self.bandwidth);
            rows.push(RateRow {
                scenario: scenario.to_string(),
                bin: bin.label().to_string(),
                allocator: a.label().to_string(),
                p_t_dbm: p,
                ergodic_rate_bps: e.mean_bps,
                stderr_bps: e.stderr_bps,
            });
        };
        for &s in &self.scenarios {
            for &bin in &self.bins {
                for &a in &self.allocators {
                    for &p in powers_dbm {
                        push(s.label(), bin, a, p, &self.secrecy_rates(s, bin, a, p));
                    }
                }
            }
        }
        for &bin in &self.bins {
            for &a in &self.allocators {
                for &p in powers_dbm {
                    push(REFERENCE_LABEL, bin, a, p, &self.reference_rates(bin, a, p));
                }
            }
        }
        rows
    }

    pub fn outage_rate_rows(&self, powers_dbm: &[f64], rates: &[f64]) -> Vec<OutageRateRow> {
        let mut rows = Vec::new();
        for &s in &self.scenarios {
            for &bin in &self.bins {
                for &a in &self.allocators {
                    for &p in powers_dbm {
                        let rs = self.secrecy_rates(s, bin, a, p);
                        for &r in rates {
                            let o = OutageEstimate::from_rates(&rs, r);
                            rows.push(OutageRateRow {
                                scenario: s.label().to_string(),
                                bin: bin.label().to_string(),
                                allocator: a.label().to_string(),
                                p_t_dbm: p,
                                target_r: r,
                                p_s: o.probability,
                                ci_lo: o.ci_lo,
                                ci_hi: o.ci_hi,
                            });
                        }
                    }
                }
            }
        }
        rows
    }

    pub fn outage_power_rows(&self, rates: &[f64], powers_dbm: &[f64]) -> Vec<OutagePowerRow> {
        let mut rows = Vec::new();
        for &s in &self.scenarios {
            for &bin in &self.bins {
                for &a in &self.allocators {
                    let per_power: Vec<Vec<f64>> = powers_dbm
                        .iter()
                        .map(|&p| self.secrecy_rates(s, bin, a, p))
                        .collect();
                    for &r in rates {
                        for (&p, rs) in powers_dbm.iter().zip(&per_power) {
                            let o = OutageEstimate::from_rates(rs, r);
                            rows.push(OutagePowerRow {
                                scenario: s.label().to_string(),
                                bin: bin.label().to_string(),
                                allocator: a.label().to_string(),
                                target_r: r,
                                p_t_dbm: p,
                                p_s: o.probability,
                                ci_lo: o.ci_lo,
                                ci_hi: o.ci_hi,
                            });
                        }
                    }
                }
            }
        }
        rows
    }
}

/// Points where the long-path eavesdropper leaks more than the short-path one.
pub fn ordering_violations(rows: &[RateRow]) -> Vec<String> {
    let find = |s: &str, r: &RateRow| {
        rows.iter().find(|x| {
            x.scenario == s
                && x.bin == r.bin
                && x.allocator == r.allocator
                && x.p_t_dbm == r.p_t_dbm
        })
    };
    rows.iter()
        .filter(|r| r.scenario == Scenario::ShortPath.label())
        .filter_map(|sp| {
            let lp = find(Scenario::LongPath.label(), sp)?;
            (lp.ergodic_rate_bps < sp.ergodic_rate_bps).then(|| {
                format!(
                    "{}/{} at {} dBm: LP {} bps < SP {} bps",
                    sp.bin, sp.allocator, sp.p_t_dbm, lp.ergodic_rate_bps, sp.ergodic_rate_bps
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub family: String,
    pub maximum_db: f64,
    pub mean_db: f64,
    pub minimum_db: f64,
    pub sd_db: f64,
    pub p90_db: f64,
    pub count: usize,
}

impl StatsRow {
    fn new(family: &str, s: NsnrStats) -> Self {
        StatsRow {
            family: family.to_string(),
            maximum_db: s.max_db,
            mean_db: s.mean_db,
            minimum_db: s.min_db,
            sd_db: s.sd_db,
            p90_db: s.p90_db,
            count: s.count,
        }
    }
}

/// nSNR statistics per family: PLC first, then one radiated family per
/// scenario.
///
/// Generated ensembles are summarized from `ensemble_size` unbinned family
/// draws. Loaded ensembles pool every file of a family; Bob ensembles that
/// repeat across scenarios count once.
pub fn family_stats(
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<Vec<StatsRow>, ExperimentError> {
    config.validate()?;
    let mut rows = Vec::new();
    match &config.ensemble {
        EnsembleSource::Generate => {
            let cal = calibrate_families(config, exec)?;
            let bin = config.bins[0];
            let first = config.scenarios[0];
            let v = sample_family_nsnr(
                &cal.spec(config, first, bin),
                Side::Bob,
                config.ensemble_size,
                config.master_seed,
                exec,
            )?;
            rows.push(StatsRow::new(
                family_label(Side::Bob, first),
                NsnrStats::from_db(&v)?,
            ));
            for &s in &config.scenarios {
                let v = sample_family_nsnr(
                    &cal.spec(config, s, bin),
                    Side::Eve,
                    config.ensemble_size,
                    config.master_seed,
                    exec,
                )?;
                rows.push(StatsRow::new(
                    family_label(Side::Eve, s),
                    NsnrStats::from_db(&v)?,
                ));
            }
        }
        EnsembleSource::Load { dir } => {
            let mut bob_sets: Vec<Vec<f64>> = Vec::new();
            let mut eve: Vec<(Scenario, Vec<f64>)> = Vec::new();
            for &s in &config.scenarios {
                let mut eve_s = Vec::new();
                for &bin in &config.bins {
                    let pairs = load_cell(config, dir, s, bin)?;
                    let bob: Vec<f64> = pairs.iter().map(|p| nsnr(p.bob()).db()).collect();
                    if !bob_sets.contains(&bob) {
                        bob_sets.push(bob);
                    }
                    eve_s.extend(pairs.iter().map(|p| nsnr(p.eve()).db()));
                }
                eve.push((s, eve_s));
            }
            let bob: Vec<f64> = bob_sets.concat();
            rows.push(StatsRow::new("PLC", NsnrStats::from_db(&bob)?));
            for (s, v) in eve {
                rows.push(StatsRow::new(
                    family_label(Side::Eve, s),
                    NsnrStats::from_db(&v)?,
                ));
            }
        }
    }
    Ok(rows)
}

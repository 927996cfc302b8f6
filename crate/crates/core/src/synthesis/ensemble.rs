//! Seeded ensemble generation.
//!
//! Every realization owns a ChaCha8 stream keyed by `(master_seed, stream,
//! bin, index)`. Bob's stream ignores the scenario, so the SP and LP ensembles
//! of a bin share their Bob realizations. Eve's stream ignores it as well: the
//! two radiated families differ only in level, so SP and LP eavesdroppers are
//! coupled draws of the same geometry.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::family::ScenarioSpec;
use super::models::{synth_hybrid_cfr, synth_noise, synth_plc_cfr};
use super::SynthesisError;
use crate::exec::Execution;
use crate::metrics::{nsnr, BobBin, Side, WiretapPair};
use crate::spectral::ChannelRealization;

/// Bob draws allowed per accepted realization.
pub const ATTEMPT_BUDGET: usize = 1000;

/// Independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Bob realizations of a binned ensemble.
    Bob,
    /// Eve realizations of a binned ensemble.
    Eve,
    /// Unbinned draws from the conducted family.
    PlcFamily,
    /// Unbinned draws from a radiated family.
    HybridFamily,
}

impl Stream {
    fn domain(self) -> u64 {
        match self {
            Stream::Bob => 0xB0B,
            Stream::Eve => 0xE7E,
            Stream::PlcFamily => 0x91C,
            Stream::HybridFamily => 0x4EB,
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for one realization. `cell` distinguishes ensembles within a stream.
pub fn stream_rng(master_seed: u64, stream: Stream, cell: u64, index: u64) -> ChaCha8Rng {
    let mut h = splitmix64(master_seed);
    for word in [stream.domain(), cell, index] {
        h = splitmix64(h ^ word);
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn bin_cell(bin: BobBin) -> u64 {
    match bin {
        BobBin::Low => 1,
        BobBin::Mid => 2,
        BobBin::High => 3,
    }
}

/// One unconditioned Bob realization.
pub fn draw_bob(
    spec: &ScenarioSpec,
    rng: &mut ChaCha8Rng,
) -> Result<ChannelRealization, SynthesisError> {
    let model = spec.bob_model.draw(rng)?;
    let cfr = synth_plc_cfr(&model, &spec.grid)?;
    let noise = synth_noise(&spec.bob_noise, &spec.grid, rng)?;
    Ok(ChannelRealization::new(spec.grid, cfr, noise)?)
}

/// One Eve realization from the scenario's radiated family.
pub fn draw_eve(
    spec: &ScenarioSpec,
    rng: &mut ChaCha8Rng,
) -> Result<ChannelRealization, SynthesisError> {
    let model = spec.eve_model.draw(rng)?;
    let cfr = synth_hybrid_cfr(&model, &spec.grid, rng)?;
    let noise = synth_noise(&spec.eve_noise, &spec.grid, rng)?;
    Ok(ChannelRealization::new(spec.grid, cfr, noise)?)
}

fn binned_pair(
    spec: &ScenarioSpec,
    master_seed: u64,
    index: usize,
) -> Result<WiretapPair, SynthesisError> {
    let cell = bin_cell(spec.bob_bin);
    let mut rng = stream_rng(master_seed, Stream::Bob, cell, index as u64);
    let mut last = f64::NAN;
    let mut bob = None;
    for _ in 0..ATTEMPT_BUDGET {
        let candidate = draw_bob(spec, &mut rng)?;
        last = nsnr(&candidate).db();
        if spec.bob_bin.contains(last) {
            bob = Some(candidate);
            break;
        }
    }
    let bob = bob.ok_or(SynthesisError::RejectionBudget {
        index,
        bin: spec.bob_bin,
        attempts: ATTEMPT_BUDGET,
        last_nsnr_db: last,
    })?;
    let mut rng = stream_rng(master_seed, Stream::Eve, cell, index as u64);
    let eve = draw_eve(spec, &mut rng)?;
    Ok(WiretapPair::new(bob, eve, spec.scenario, spec.bob_bin)?)
}

/// `count` pairs whose Bob nSNR lies in the scenario's bin. Pair `i` depends only
/// on `(spec, master_seed, i)`.
pub fn generate_ensemble(
    spec: &ScenarioSpec,
    count: usize,
    master_seed: u64,
) -> Result<Vec<WiretapPair>, SynthesisError> {
    generate_ensemble_with(spec, count, master_seed, Execution::default())
}

pub fn generate_ensemble_with(
    spec: &ScenarioSpec,
    count: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<WiretapPair>, SynthesisError> {
    if count == 0 {
        return Err(SynthesisError::EmptyEnsemble);
    }
    spec.validate()?;
    exec.try_map(count, |i| binned_pair(spec, master_seed, i))
}

/// nSNR (dB) of `count` unbinned draws from one side's family.
pub fn sample_family_nsnr(
    spec: &ScenarioSpec,
    side: Side,
    count: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<f64>, SynthesisError> {
    if count == 0 {
        return Err(SynthesisError::EmptyEnsemble);
    }
    spec.validate()?;
    exec.try_map(count, |i| {
        let ch = match side {
            Side::Bob => draw_bob(
                spec,
                &mut stream_rng(master_seed, Stream::PlcFamily, 0, i as u64),
            )?,
            Side::Eve => draw_eve(
                spec,
                &mut stream_rng(master_seed, Stream::HybridFamily, 0, i as u64),
            )?,
        };
        Ok(nsnr(&ch).db())
    })
}

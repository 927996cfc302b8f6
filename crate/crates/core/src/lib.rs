//! Physical-layer secrecy analysis for broadband multicarrier power-line links.
//!
//! The crate models a legitimate power-line receiver (Bob) and a wireless
//! eavesdropper (Eve) that picks up the signal radiated by unshielded cables.
//! It provides:
//!
//! * [`spectral`]: the subchannel grid, channel realizations and unit helpers.
//! * [`synthesis`]: calibrated generators for power-line and hybrid
//!   power-line/wireless channel ensembles.
//! * [`dataset`]: the binary ensemble container, CSV import of measured data
//!   and ensemble statistics.
//! * [`allocation`]: water-filling and uniform power allocation.
//! * [`metrics`]: link capacity, normalized multichannel SNR, achievable and
//!   ergodic secrecy rates, and secrecy outage probability.
//! * [`experiment`]: the batch sweeps behind the `plcsec` command line tool.
//!
//! Batch work runs on rayon when the `parallel` feature is enabled (the
//! default) and sequentially otherwise; results are identical either way.

// `!(x > 0.0)` style guards are how NaN gets rejected alongside bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod dataset;
pub mod exec;
pub mod experiment;
pub mod metrics;
pub mod numeric;
pub mod spectral;
pub mod synthesis;

pub use allocation::{uniform, waterfill, AllocationError, Allocator, WaterfillSolution};
pub use exec::Execution;
pub use metrics::{
    classify_bin, ergodic_secrecy_rate, link_capacity, nsnr, outage_probability, secrecy_rate,
    BobBin, MetricsError, Nsnr, Scenario, SecrecyOutcome, Side, WiretapPair,
};
pub use spectral::{
    dbm_to_watts, per_bin_snr, watts_to_dbm, ChannelRealization, PowerAllocation, SpectralError,
    SpectralGrid,
};

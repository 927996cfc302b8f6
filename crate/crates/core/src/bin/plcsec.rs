use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plcsec::experiment::{
    cmd_calibrate, cmd_generate, cmd_stats, cmd_sweep_outage_pt, cmd_sweep_outage_r,
    cmd_sweep_rate, EnsembleSource, ExperimentConfig, ExperimentError, CALIBRATION_JSON,
    MANIFEST_JSON, OUTAGE_PT_CSV, OUTAGE_R_CSV, RATE_CSV, STATS_CSV,
};
use plcsec::Execution;

/// Secrecy of broadband power-line links against a radiated eavesdropper.
#[derive(Debug, Parser)]
#[command(name = "plcsec", version, about)]
struct Cli {
    /// JSON experiment configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "PLCSEC_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "PLCSEC_THREADS")]
    threads: Option<usize>,
    /// Read ensembles from this directory instead of generating them.
    #[arg(long, global = true)]
    ensemble_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Calibrate, draw and save one ensemble per (scenario, bin) plus a manifest.
    Generate,
    /// Fit family levels to the reference nSNR statistics.
    Calibrate,
    /// Ergodic secrecy rate over transmit power.
    SweepRate,
    /// Outage probability over target rate.
    SweepOutageR,
    /// Outage probability over transmit power.
    SweepOutagePt,
    /// nSNR statistics per channel family.
    Stats,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, ExperimentError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        config.out_dir = dir.clone();
    }
    if let Some(dir) = &cli.ensemble_dir {
        config.ensemble = EnsembleSource::Load { dir: dir.clone() };
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli, config: &ExperimentConfig) -> Result<(), ExperimentError> {
    let exec = Execution::default();
    let out = &config.out_dir;
    match cli.command {
        Cmd::Generate => {
            let manifest = cmd_generate(config, exec)?;
            for f in &manifest.files {
                println!(
                    "{}: {} pairs, Bob nSNR {:.2} dB, Eve nSNR {:.2} dB",
                    out.join(&f.file).display(),
                    f.count,
                    f.bob_nsnr.mean_db,
                    f.eve_nsnr.mean_db
                );
            }
            println!("{}", out.join(MANIFEST_JSON).display());
        }
        Cmd::Calibrate => {
            let families = cmd_calibrate(config, exec)?;
            for r in &families.reports {
                println!(
                    "{}: mean {:.3} dB (target {}), SD {:.3} dB (target {}), {} updates",
                    r.family,
                    r.achieved_mean_db,
                    r.targets.mean_db,
                    r.achieved_sd_db,
                    r.targets.sd_db,
                    r.iterations
                );
            }
            println!("{}", out.join(CALIBRATION_JSON).display());
        }
        Cmd::SweepRate => {
            let sweep = cmd_sweep_rate(config, exec)?;
            for v in &sweep.violations {
                eprintln!("warning: {v}");
            }
            println!("{}", out.join(RATE_CSV).display());
        }
        Cmd::SweepOutageR => {
            cmd_sweep_outage_r(config, exec)?;
            println!("{}", out.join(OUTAGE_R_CSV).display());
        }
        Cmd::SweepOutagePt => {
            cmd_sweep_outage_pt(config, exec)?;
            println!("{}", out.join(OUTAGE_PT_CSV).display());
        }
        Cmd::Stats => {
            for row in cmd_stats(config, exec)? {
                println!(
                    "{}: max {:.2}, mean {:.2}, min {:.2}, SD {:.2}, p90 {:.2} dB",
                    row.family, row.maximum_db, row.mean_db, row.minimum_db, row.sd_db, row.p90_db
                );
            }
            println!("{}", out.join(STATS_CSV).display());
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(
    _threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, String> {
    Ok(f())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match with_threads(cli.threads, || run(&cli, &config)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            ExitCode::FAILURE
        }
    }
}

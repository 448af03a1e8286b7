//! `riccati-spectra`: run the experiments from a TOML config and write CSV tables
//! plus a `manifest.json` into the output directory.

mod artifacts;
mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::artifacts::Artifacts;
use crate::config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "riccati-spectra", version, about = "Riccati-diffusion spectral experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed base; replica i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exit-time law and Poisson counts of the stationary diffusion.
    StationaryExit(Common),
    /// Lowest-level CDF at small β against the Gumbel limit.
    TwGumbel(Common),
    /// CDF of the point with index k at small β.
    KthMarginal(Common),
    /// Hill ground state and the integrated density of states.
    Hill(Common),
    /// Small-β eigenvalue density and the Airy kernel density.
    Density(Common),
    /// m(a), J0, J0' and the large-a ratio.
    QuadratureTables(Common),
    /// Top eigenvalue of tridiagonal β-ensembles against the Gumbel prediction.
    Tridiag(Common),
    /// Recorded trajectories of a shared-noise family.
    CoupledPaths(Common),
}

type Runner = fn(&ExperimentConfig, &mut Artifacts) -> Result<()>;

impl Command {
    fn parts(&self) -> (&'static str, usize, Runner, &Common) {
        match self {
            Command::StationaryExit(c) => ("stationary-exit", 1, experiments::stationary_exit, c),
            Command::TwGumbel(c) => ("tw-gumbel", 400, experiments::tw_gumbel, c),
            Command::KthMarginal(c) => ("kth-marginal", 400, experiments::kth_marginal, c),
            Command::Hill(c) => ("hill", 200, experiments::hill, c),
            Command::Density(c) => ("density", 1, experiments::density, c),
            Command::QuadratureTables(c) => ("quadrature-tables", 1, experiments::quadrature_tables, c),
            Command::Tridiag(c) => ("tridiag", 2000, experiments::tridiag, c),
            Command::CoupledPaths(c) => ("coupled-paths", 1, experiments::coupled_paths, c),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (name, default_replicas, runner, common) = cli.command.parts();
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(r) = common.replicas {
        cfg.replicas = Some(r);
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    let cfg = cfg.resolve(name, default_replicas)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
        .context("starting the worker pool")?;

    let mut out = Artifacts::new(&cfg)?;
    runner(&cfg, &mut out).with_context(|| format!("{name} failed"))?;
    let dir = out.dir().display().to_string();
    out.finish(&cfg)?;
    eprintln!("{name}: wrote {dir}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

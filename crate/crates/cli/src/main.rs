mod bundle;
mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Numerical laboratory for damped waves on model surfaces.
#[derive(Parser)]
#[command(name = "dampwave", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// RNG seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap for parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Eigenfrequency table of the damped wave pencil.
    Spectrum,
    /// Resolvent norms on a rectangle of spectral parameters.
    ResolventScan,
    /// Spectral band summary against the trajectory-average infimum.
    Band,
    /// Zoll cluster partition of a sphere spectrum.
    Clusters,
    /// Geometric control check over a sampled phase-space grid.
    Control,
    /// Damping averages A(T) along the geodesic flow.
    Averages,
    /// Linearized Poincare map of a closed geodesic.
    Poincare,
    /// Modal (and on the sphere, cluster) expansion of the propagator.
    Expansion,
    /// Energy decay rate fit against the band formula.
    Decay,
}

impl From<Sub> for commands::Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Spectrum => commands::Command::Spectrum,
            Sub::ResolventScan => commands::Command::ResolventScan,
            Sub::Band => commands::Command::Band,
            Sub::Clusters => commands::Command::Clusters,
            Sub::Control => commands::Command::Control,
            Sub::Averages => commands::Command::Averages,
            Sub::Poincare => commands::Command::Poincare,
            Sub::Expansion => commands::Command::Expansion,
            Sub::Decay => commands::Command::Decay,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // the worker pool reads this on first use
        std::env::set_var("RAYON_NUM_THREADS", n.to_string());
    }
    let cfg = match config::load(cli.config.as_deref(), cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            std::process::exit(2);
        }
    };
    match commands::run(cli.command.into(), &cfg, &cli.out) {
        Ok(path) => println!("report: {}", path.display()),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(3);
        }
    }
}

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use oam_cgh_cli::commands;
use oam_cgh_cli::config::{parse_i_max_mode, ExperimentConfig};

/// Holographic OAM-MUB state generation: figure data and images.
///
/// Output directory precedence: --out, then the OAM_CGH_OUT environment
/// variable, then the config file, then ./out.
#[derive(Parser)]
#[command(name = "oam-cgh", version, about)]
struct Cli {
    /// Flat key = value config file applied over the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Grid size as ROWSxCOLS, e.g. 768x1024.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Aperture diameter as a fraction of the shorter grid side.
    #[arg(long, global = true)]
    aperture_fraction: Option<f64>,

    /// sigma' values (comma separated). Single-value commands use the first.
    #[arg(long, global = true, value_delimiter = ',')]
    sigma_prime: Option<Vec<f64>>,

    /// Reference tilts in waves across the aperture (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    tilt: Option<Vec<f64>>,

    /// Which variant the per-tilt images show (the CSV always has both).
    #[arg(long, global = true)]
    precondition: Option<bool>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Display gamma for far-field images.
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Intensity normalization: analytic | grid-max.
    #[arg(long, global = true)]
    imax_mode: Option<String>,

    /// State label (a0..c3).
    #[arg(long, global = true)]
    state: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Theory and artifact-bearing amplitude/phase images per sigma'.
    Fig1,
    /// Analytic probability-vs-sigma' CSV for all twelve states.
    Fig2,
    /// Per-tilt hologram/far-field/pupil images plus the tilt CSV.
    Fig3,
    /// Probability-vs-tilt CSV only.
    Fig4,
    /// Irradiance and synthetic interferograms.
    Fig6,
    /// Quick end-to-end sanity checks.
    Selftest,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Ok(dir) = std::env::var("OAM_CGH_OUT") {
        cfg.out_dir = PathBuf::from(dir);
    }
    if let Some(grid) = &cli.grid {
        let (rows, cols) = grid
            .split_once(['x', 'X'])
            .context("grid must be ROWSxCOLS")?;
        cfg.rows = rows.trim().parse().context("grid rows")?;
        cfg.cols = cols.trim().parse().context("grid cols")?;
    }
    if let Some(f) = cli.aperture_fraction {
        cfg.aperture_fraction = f;
    }
    if let Some(sp) = &cli.sigma_prime {
        cfg.fig1_sigma_primes = sp.clone();
        cfg.sigma_prime = sp[0];
    }
    if let Some(tilts) = &cli.tilt {
        cfg.tilts = tilts.clone();
    }
    if let Some(p) = cli.precondition {
        cfg.precondition = p;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(g) = cli.gamma {
        cfg.gamma = g;
    }
    if let Some(mode) = &cli.imax_mode {
        cfg.i_max_mode = parse_i_max_mode(mode)?;
    }
    if let Some(state) = &cli.state {
        cfg.state = state.clone();
    }
    Ok(cfg)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = build_config(&cli)?;
    let written = match cli.command {
        Command::Fig1 => commands::cmd_fig1(&cfg)?,
        Command::Fig2 => commands::cmd_fig2(&cfg)?,
        Command::Fig3 => commands::cmd_fig3(&cfg)?,
        Command::Fig4 => commands::cmd_fig4(&cfg)?,
        Command::Fig6 => commands::cmd_fig6(&cfg)?,
        Command::Selftest => {
            commands::cmd_selftest()?;
            println!("selftest: all checks passed");
            Vec::new()
        }
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

//! Experiment configuration: defaults, flat key=value files, validation.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use oam_cgh_core::{
    build_mub_tables, GridGeometry, HologramParams, IMaxMode, StateLabel, SuperpositionState,
    BESSEL_DOMAIN_LIMIT,
};

/// Everything a figure command needs. Defaults reproduce the reference
/// configuration, so every command runs with no arguments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    pub aperture_fraction: f64,
    /// Phase scaling used by the numeric pipeline and preconditioning.
    pub sigma_prime: f64,
    /// Phase scalings of the artifact image set.
    pub fig1_sigma_primes: Vec<f64>,
    pub tilts: Vec<f64>,
    pub state: String,
    pub out_dir: PathBuf,
    /// Display gamma for far-field images.
    pub gamma: f64,
    pub i_max_mode: IMaxMode,
    /// Which variant the per-tilt image set shows (the probability CSV
    /// always carries both).
    pub precondition: bool,
    /// Reference tilt of the synthetic interferograms.
    pub interferogram_tilt: f64,
    /// Optional CSV wavefront-error map in waves.
    pub wfe_map: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            rows: 768,
            cols: 1024,
            aperture_fraction: 0.9,
            sigma_prime: 1.72,
            fig1_sigma_primes: vec![0.610, 1.84, 3.13, 3.83],
            tilts: vec![10.0, 30.0, 50.0, 75.0, 100.0],
            state: "c3".into(),
            out_dir: PathBuf::from("out"),
            gamma: 0.3,
            i_max_mode: IMaxMode::Analytic,
            precondition: true,
            interferogram_tilt: 10.0,
            wfe_map: None,
        }
    }
}

fn parse_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{s}`"))
        })
        .collect()
}

pub fn parse_i_max_mode(value: &str) -> Result<IMaxMode> {
    match value.trim() {
        "analytic" => Ok(IMaxMode::Analytic),
        "grid-max" => Ok(IMaxMode::GridMax),
        other => bail!("unknown imax_mode `{other}` (expected analytic | grid-max)"),
    }
}

impl ExperimentConfig {
    /// Reads a flat `key = value` file on top of the defaults. Blank lines
    /// and `#` comments are ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
            config
                .apply(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(config)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "rows" => self.rows = value.parse()?,
            "cols" => self.cols = value.parse()?,
            "aperture_fraction" => self.aperture_fraction = value.parse()?,
            "sigma_prime" => self.sigma_prime = value.parse()?,
            "fig1_sigma_primes" => self.fig1_sigma_primes = parse_list(value)?,
            "tilts" => self.tilts = parse_list(value)?,
            "state" => self.state = value.to_string(),
            "out" => self.out_dir = PathBuf::from(value),
            "gamma" => self.gamma = value.parse()?,
            "imax_mode" => self.i_max_mode = parse_i_max_mode(value)?,
            "precondition" => self.precondition = value.parse()?,
            "interferogram_tilt" => self.interferogram_tilt = value.parse()?,
            "wfe_map" => self.wfe_map = Some(PathBuf::from(value)),
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridGeometry> {
        GridGeometry::from_fraction(self.rows, self.cols, self.aperture_fraction)
            .context("grid geometry")
    }

    /// Looks the configured state up in the MUB table.
    pub fn resolve_state(&self) -> Result<SuperpositionState> {
        let label: StateLabel = self
            .state
            .parse()
            .with_context(|| format!("state `{}`", self.state))?;
        Ok(build_mub_tables().by_label(label).clone())
    }

    /// Checks every value against the preconditions of the operations the
    /// commands will call, before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.resolve_state()?;
        // The pipeline runs the preconditioned branch, so sigma' must stay
        // on the monotonic J1 branch.
        HologramParams::from_sigma_prime(self.sigma_prime, true)
            .context("pipeline sigma_prime")?;
        if self.fig1_sigma_primes.is_empty() {
            bail!("fig1_sigma_primes must not be empty");
        }
        for &sp in &self.fig1_sigma_primes {
            if !(sp.is_finite() && sp > 0.0 && sp <= BESSEL_DOMAIN_LIMIT) {
                bail!(
                    "fig1 sigma' = {sp} outside the analytic order model domain (0, {BESSEL_DOMAIN_LIMIT}]"
                );
            }
        }
        if self.tilts.is_empty() {
            bail!("tilts must not be empty");
        }
        if self.tilts.windows(2).any(|w| w[1] <= w[0]) {
            bail!("tilt sweep axis values must be strictly increasing");
        }
        for &t in &self.tilts {
            if !(t.is_finite() && t >= 0.0) {
                bail!("reference tilt must be finite and non-negative, got {t}");
            }
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            bail!("display gamma must be positive, got {}", self.gamma);
        }
        if !(self.interferogram_tilt.is_finite() && self.interferogram_tilt >= 0.0) {
            bail!(
                "interferogram reference tilt must be finite and non-negative, got {}",
                self.interferogram_tilt
            );
        }
        Ok(())
    }
}

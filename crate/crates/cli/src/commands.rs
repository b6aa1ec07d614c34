//! Figure-reproduction commands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use oam_cgh_core::io::{
    amplitude_pixels, amplitude_pixels_gamma, hologram_pixels, phase_pixels, read_scalar_csv,
    scalar_pixels_normalized, write_pgm, write_sweep_csv,
};
use oam_cgh_core::{
    analytic_minus_one_field, bessel_j, build_mub_tables, inner_product, sample_state_on_grid,
    simulate_pipeline, simulate_pipeline_artifacts, sweep_sigma, sweep_tilt, synth_interferogram,
    wrapped_phase_order_coefficients, ComplexField, GridGeometry, IMaxMode, InterferogramAxis,
    Member, PlaneTag, ScalarField, SuperpositionState, SweepPoint, SweepRecord,
    SWEEP_THETA_SAMPLES,
};

use crate::config::ExperimentConfig;

fn ensure_out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create output directory {}", cfg.out_dir.display()))?;
    Ok(cfg.out_dir.clone())
}

fn save_pgm(path: &Path, grid: &GridGeometry, pixels: &[u8]) -> Result<()> {
    write_pgm(path, grid.cols(), grid.rows(), pixels)
        .with_context(|| format!("writing {}", path.display()))
}

fn load_wfe(cfg: &ExperimentConfig, grid: &GridGeometry) -> Result<Option<ScalarField>> {
    match &cfg.wfe_map {
        None => Ok(None),
        Some(path) => {
            let map = read_scalar_csv(path, *grid)
                .with_context(|| format!("wavefront-error map {}", path.display()))?;
            Ok(Some(map))
        }
    }
}

fn fmt_tilt(tilt: f64) -> String {
    if tilt.fract() == 0.0 {
        format!("{:03}", tilt as i64)
    } else {
        format!("{tilt}")
    }
}

/// Theory amplitude/phase plus the analytically generated pair per sigma'.
pub fn cmd_fig1(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let out = ensure_out_dir(cfg)?;
    let grid = cfg.grid()?;
    let state = cfg.resolve_state()?;
    let mut written = Vec::new();

    let theory = sample_state_on_grid(&state, &grid);
    let path = out.join("fig1_theory_amplitude.pgm");
    save_pgm(&path, &grid, &amplitude_pixels(&theory))?;
    written.push(path);
    let path = out.join("fig1_theory_phase.pgm");
    save_pgm(&path, &grid, &phase_pixels(&theory))?;
    written.push(path);

    for &sigma_prime in &cfg.fig1_sigma_primes {
        let generated = analytic_minus_one_field(&state, sigma_prime, &grid)?;
        let tag = format!("{sigma_prime:.3}");
        let path = out.join(format!("fig1_generated_amplitude_sigma{tag}.pgm"));
        save_pgm(&path, &grid, &amplitude_pixels(&generated))?;
        written.push(path);
        let path = out.join(format!("fig1_generated_phase_sigma{tag}.pgm"));
        save_pgm(&path, &grid, &phase_pixels(&generated))?;
        written.push(path);
    }
    Ok(written)
}

fn sigma_prime_axis() -> Vec<f64> {
    (1..=383).map(|k| k as f64 * 0.01).collect()
}

/// Analytic-model probability of all twelve states over sigma' in
/// (0, 3.83], written as one CSV.
pub fn cmd_fig2(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let out = ensure_out_dir(cfg)?;
    let table = build_mub_tables();
    let records = sweep_sigma(&table, &sigma_prime_axis())?;
    let path = out.join("fig2_probability_vs_sigma_prime.csv");
    // The analytic sweep integrates over one azimuthal ring.
    write_sweep_csv(&path, &records, 1, SWEEP_THETA_SAMPLES, Some(100.0))?;
    Ok(vec![path])
}

fn tilt_records(
    cfg: &ExperimentConfig,
    state: &SuperpositionState,
    grid: &GridGeometry,
    wfe: Option<&ScalarField>,
) -> Result<Vec<SweepRecord>> {
    if cfg.i_max_mode == IMaxMode::Analytic && wfe.is_none() {
        return Ok(sweep_tilt(state, &cfg.tilts, cfg.sigma_prime, grid)?);
    }
    // Non-default normalization or an error map: run the explicit variant.
    let mut records = Vec::new();
    for &tilt in &cfg.tilts {
        let mut points = Vec::new();
        for precondition in [false, true] {
            let artifacts = simulate_pipeline_artifacts(
                state,
                cfg.sigma_prime,
                tilt,
                precondition,
                grid,
                cfg.i_max_mode,
                wfe,
            )?;
            points.push(SweepPoint {
                label: state.label(),
                precondition,
                probability: artifacts.report.probability,
            });
        }
        records.push(SweepRecord {
            axis_value: tilt,
            points,
        });
    }
    Ok(records)
}

/// Per-tilt image set (hologram, far field, isolated-order pupil field) plus
/// the probability-vs-tilt CSV for both preconditioning variants.
pub fn cmd_fig3(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let out = ensure_out_dir(cfg)?;
    let grid = cfg.grid()?;
    let state = cfg.resolve_state()?;
    let wfe = load_wfe(cfg, &grid)?;
    let mut written = Vec::new();

    let theory = sample_state_on_grid(&state, &grid);
    let path = out.join("fig3_theory_amplitude.pgm");
    save_pgm(&path, &grid, &amplitude_pixels(&theory))?;
    written.push(path);
    let path = out.join("fig3_theory_phase.pgm");
    save_pgm(&path, &grid, &phase_pixels(&theory))?;
    written.push(path);

    let mut records = Vec::new();
    for &tilt in &cfg.tilts {
        let mut points = Vec::new();
        for precondition in [false, true] {
            let artifacts = simulate_pipeline_artifacts(
                &state,
                cfg.sigma_prime,
                tilt,
                precondition,
                &grid,
                cfg.i_max_mode,
                wfe.as_ref(),
            )?;
            points.push(SweepPoint {
                label: state.label(),
                precondition,
                probability: artifacts.report.probability,
            });
            if precondition == cfg.precondition {
                let tag = fmt_tilt(tilt);
                let path = out.join(format!("fig3_hologram_tilt{tag}.pgm"));
                save_pgm(&path, &grid, &hologram_pixels(&artifacts.hologram))?;
                written.push(path);
                let path = out.join(format!("fig3_farfield_tilt{tag}.pgm"));
                save_pgm(
                    &path,
                    &grid,
                    &amplitude_pixels_gamma(&artifacts.farfield, cfg.gamma),
                )?;
                written.push(path);
                let path = out.join(format!("fig3_generated_amplitude_tilt{tag}.pgm"));
                save_pgm(&path, &grid, &amplitude_pixels(&artifacts.generated))?;
                written.push(path);
                let path = out.join(format!("fig3_generated_phase_tilt{tag}.pgm"));
                save_pgm(&path, &grid, &phase_pixels(&artifacts.generated))?;
                written.push(path);
            }
        }
        records.push(SweepRecord {
            axis_value: tilt,
            points,
        });
    }

    let path = out.join("fig4_probability_vs_tilt.csv");
    write_sweep_csv(&path, &records, grid.rows(), grid.cols(), None)?;
    written.push(path);
    Ok(written)
}

/// Probability-vs-tilt CSV only (the numeric part of the image set command).
pub fn cmd_fig4(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let out = ensure_out_dir(cfg)?;
    let grid = cfg.grid()?;
    let state = cfg.resolve_state()?;
    let wfe = load_wfe(cfg, &grid)?;
    let records = tilt_records(cfg, &state, &grid, wfe.as_ref())?;
    let path = out.join("fig4_probability_vs_tilt.csv");
    write_sweep_csv(&path, &records, grid.rows(), grid.cols(), None)?;
    Ok(vec![path])
}

/// Theoretical irradiance and the two synthetic interferograms.
pub fn cmd_fig6(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let out = ensure_out_dir(cfg)?;
    let grid = cfg.grid()?;
    let state = cfg.resolve_state()?;
    let mut written = Vec::new();

    let theory = sample_state_on_grid(&state, &grid);
    let amplitude = theory.amplitude();
    let irradiance = ScalarField::new(
        amplitude.values().iter().map(|a| a * a).collect(),
        grid,
    )?;
    let path = out.join("fig6_irradiance.pgm");
    save_pgm(&path, &grid, &scalar_pixels_normalized(&irradiance))?;
    written.push(path);

    // Interferograms of the unit-normalized field against the tilted
    // reference, one per axis.
    let peak = amplitude.max_value();
    let normalized = ComplexField::new(
        theory.values().iter().map(|v| v / peak).collect(),
        grid,
        PlaneTag::Pupil,
    )?;
    for (axis, name) in [
        (InterferogramAxis::Vertical, "vertical"),
        (InterferogramAxis::Horizontal, "horizontal"),
    ] {
        let ig = synth_interferogram(&normalized, cfg.interferogram_tilt, axis)?;
        let path = out.join(format!("fig6_interferogram_{name}.pgm"));
        save_pgm(&path, &grid, &scalar_pixels_normalized(&ig))?;
        written.push(path);
    }
    Ok(written)
}

/// Quick end-to-end sanity checks; fails fast with a nonzero exit.
pub fn cmd_selftest() -> Result<()> {
    let table = build_mub_tables();
    let states: Vec<_> = table.all_states().collect();
    let mut worst = 0.0_f64;
    for si in &states {
        for sj in &states {
            let p = si.overlap(sj).norm_sqr();
            let expected = if si.label() == sj.label() {
                1.0
            } else if si.label().basis == sj.label().basis {
                0.0
            } else {
                1.0 / 3.0
            };
            worst = worst.max((p - expected).abs());
        }
    }
    if worst > 1e-12 {
        bail!("MUB gram matrix deviates by {worst:.3e}");
    }
    println!("selftest: MUB algebra ok (worst deviation {worst:.2e})");

    let eta = bessel_j(1, 1.8412)?.powi(2);
    if (eta - 0.339).abs() > 0.001 {
        bail!("peak diffraction efficiency {eta}");
    }
    println!("selftest: peak diffraction efficiency ok ({eta:.4})");

    let weights = wrapped_phase_order_coefficients(1, &[-1, 0, 1, 2], 2048);
    if (weights[2].norm() - 1.0).abs() > 1e-3 || weights[0].norm() > 1e-3 {
        bail!("modulo-2pi order weights off: {weights:?}");
    }
    println!("selftest: modulo-2pi order weights ok");

    let grid = GridGeometry::from_fraction(192, 256, 0.9)?;
    let c3 = table.state(3, Member::C);
    let theory = sample_state_on_grid(c3, &grid);
    let round = oam_cgh_core::back_propagate(&oam_cgh_core::far_field(&theory)?)?;
    let err = inner_product(&theory, &round)?;
    if (err.norm() - 1.0).abs() > 1e-10 {
        bail!("transform round trip drifted: {}", err.norm());
    }
    println!("selftest: transform round trip ok");

    let (_, plain) = simulate_pipeline(c3, 1.72, 15.0, false, &grid)?;
    let (_, preconditioned) = simulate_pipeline(c3, 1.72, 15.0, true, &grid)?;
    if preconditioned.probability <= plain.probability {
        bail!(
            "preconditioning did not help: {} vs {}",
            preconditioned.probability,
            plain.probability
        );
    }
    println!(
        "selftest: pipeline ok (P = {:.4} plain, {:.4} preconditioned)",
        plain.probability, preconditioned.probability
    );
    Ok(())
}

//! Diffraction models for the thin phase hologram.
//!
//! Two routes to the diffracted field coexist here. The analytic route
//! expands the transmittance `exp(-i f)` in Bessel orders (Jacobi-Anger):
//! order m carries amplitude `J_|m|(sigma' a / a_max)` and phase
//! `-m phi + (m + 1) carrier + (sigma' / 2)(a / a_max)^2`, the recorded field
//! appearing in m = -1. The numeric route pushes the transmittance through a
//! centered unitary FFT, cuts a rectangular window one order spacing wide
//! around the m = -1 far-field lobe, recenters it onto the zero-frequency
//! bin and transforms back to the pupil.

use num_complex::Complex64;

use crate::bessel::{bessel_jn, BESSEL_DOMAIN_LIMIT};
use crate::cgh::{self, build_hologram, slm_transmittance, HologramFunction, HologramParams, IMaxMode, ReferenceWave};
use crate::error::{Error, Result};
use crate::fft::{fft2_centered_unitary, roll_rows};
use crate::field::{ComplexField, PlaneTag, ScalarField};
use crate::fidelity::{self, FidelityReport, ReportMeta};
use crate::grid::GridGeometry;
use crate::states::{sample_state_on_grid, SuperpositionState};

/// A far-field isolation window for one diffraction order. The tilt axis is
/// +y (rows), so offsets and widths count row-frequency bins.
#[derive(Debug, Clone, Copy)]
pub struct OrderSpec {
    pub m: i32,
    pub offset_bins: i64,
    pub window_width_bins: usize,
}

impl OrderSpec {
    /// Window for order `m` of a hologram recorded with `tilt_waves` carrier
    /// cycles across the aperture. Order m sits `-m * tilt * rows / D` bins
    /// from the zero-frequency bin; the window width equals the order
    /// spacing.
    pub fn for_order(m: i32, tilt_waves: f64, grid: &GridGeometry) -> Self {
        let spacing = tilt_waves * grid.rows() as f64 / grid.aperture_diameter() as f64;
        OrderSpec {
            m,
            offset_bins: (-(m as f64) * spacing).round() as i64,
            window_width_bins: spacing.round().max(1.0) as usize,
        }
    }
}

/// Magnitude of the m-th order diffraction amplitude, `J_|m|(sigma' r)`.
/// Order-constant signs are global phases of that order and are carried by
/// the phase convention instead.
pub fn analytic_order_amplitude(m: i32, a_over_amax: f64, sigma_prime: f64) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&a_over_amax));
    bessel_jn(m.unsigned_abs(), sigma_prime * a_over_amax)
}

/// Optical phase of the m-th diffracted order (the field goes as
/// `exp(-i phase)`): `-m phi + (m + 1) carrier + (sigma' / 2) r^2`.
pub fn analytic_order_phase(
    m: i32,
    phi: f64,
    a_over_amax: f64,
    sigma_prime: f64,
    carrier: f64,
) -> f64 {
    -(m as f64) * phi
        + (m as f64 + 1.0) * carrier
        + 0.5 * sigma_prime * a_over_amax * a_over_amax
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Order weights of a full-depth modulo-2pi phase ramp: `sinc(1 - m)`,
/// unity at m = 1 and zero at every other integer.
pub fn modulo2pi_order_weights(orders: &[i32]) -> Vec<f64> {
    orders.iter().map(|&m| sinc((1 - m) as f64)).collect()
}

/// Numeric azimuthal order coefficients of `exp(-i wrap(l theta))` with full
/// 2pi modulation depth, projected on the `exp(-i m l theta)` order basis.
pub fn wrapped_phase_order_coefficients(
    l: i32,
    orders: &[i32],
    n_samples: usize,
) -> Vec<Complex64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    orders
        .iter()
        .map(|&m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n_samples {
                let theta = two_pi * k as f64 / n_samples as f64;
                let wrapped = (l as f64 * theta).rem_euclid(two_pi);
                acc += Complex64::cis(-wrapped) * Complex64::cis((m * l) as f64 * theta);
            }
            acc / n_samples as f64
        })
        .collect()
}

fn neg_i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Evaluates the Bessel-order expansion of the hologram transmittance
/// truncated at orders |m| <= `truncation_m` and returns the maximum
/// samplewise deviation from the exact `exp(-i f)` over the aperture.
pub fn jacobi_anger_check(hologram: &HologramFunction, truncation_m: u32) -> f64 {
    let geometry = hologram.geometry();
    let d = geometry.aperture_diameter() as f64;
    let sigma_prime = hologram.sigma_prime();
    let reference = hologram.reference();
    let prefactor = Complex64::cis(-0.5 * sigma_prime);
    let m_max = truncation_m as i32;

    let mut max_err = 0.0_f64;
    for row in 0..geometry.rows() {
        for col in 0..geometry.cols() {
            if !geometry.in_aperture(row, col) {
                continue;
            }
            let idx = geometry.index(row, col);
            let (_x, y) = geometry.xy(row, col);
            let r = hologram.amplitude_ratio().values()[idx];
            let beta =
                hologram.recording_phase().values()[idx] - reference.carrier_phase(y, d);
            let z = sigma_prime * r;

            let mut series = Complex64::new(0.0, 0.0);
            for m in -m_max..=m_max {
                let mut jm = bessel_jn(m.unsigned_abs(), z);
                if m < 0 && m % 2 != 0 {
                    jm = -jm;
                }
                series += neg_i_pow(m) * jm * Complex64::cis(m as f64 * beta);
            }
            let approx = prefactor * Complex64::cis(-0.5 * sigma_prime * r * r) * series;
            let exact = Complex64::cis(-hologram.map().values()[idx]);
            max_err = max_err.max((approx - exact).norm());
        }
    }
    max_err
}

/// Centered unitary transform from the pupil to the far field.
pub fn far_field(field: &ComplexField) -> Result<ComplexField> {
    field.expect_plane(PlaneTag::Pupil)?;
    let g = field.geometry();
    let out = fft2_centered_unitary(field.values(), g.rows(), g.cols(), false);
    Ok(ComplexField::from_values(out, g, PlaneTag::FarField))
}

/// Inverse centered unitary transform back to the pupil.
pub fn back_propagate(field: &ComplexField) -> Result<ComplexField> {
    field.expect_plane(PlaneTag::FarField)?;
    let g = field.geometry();
    let out = fft2_centered_unitary(field.values(), g.rows(), g.cols(), true);
    Ok(ComplexField::from_values(out, g, PlaneTag::Pupil))
}

/// Hard rectangular window around one order, recentered onto the
/// zero-frequency bin. The window spans `window_width_bins` row-frequency
/// bins centered `offset_bins` from the zero bin and the full grid width
/// transversely.
pub fn isolate_order(farfield: &ComplexField, spec: &OrderSpec) -> Result<ComplexField> {
    farfield.expect_plane(PlaneTag::FarField)?;
    let g = farfield.geometry();
    let rows = g.rows() as i64;
    let cols = g.cols();
    let width = spec.window_width_bins as i64;
    let start = g.center().0 as i64 + spec.offset_bins - width / 2;
    let end = start + width;
    if width < 1 || start < 0 || end > rows {
        return Err(Error::WindowOutOfBounds {
            start,
            end,
            rows: g.rows(),
        });
    }

    let mut windowed = vec![Complex64::new(0.0, 0.0); g.len()];
    for row in start as usize..end as usize {
        let lo = row * cols;
        windowed[lo..lo + cols].copy_from_slice(&farfield.values()[lo..lo + cols]);
    }
    let recentered = roll_rows(&windowed, g.rows(), cols, -spec.offset_bins);
    Ok(ComplexField::from_values(recentered, g, PlaneTag::FarField))
}

/// The analytically propagated m = -1 diffracted field of a state, after
/// carrier removal: amplitude `J1(sigma' A / A_max)` and phase
/// `arg psi - (sigma' / 2)(A / A_max)^2` samplewise.
pub fn analytic_minus_one_field(
    state: &SuperpositionState,
    sigma_prime: f64,
    grid: &GridGeometry,
) -> Result<ComplexField> {
    if !(sigma_prime.is_finite() && sigma_prime > 0.0 && sigma_prime <= BESSEL_DOMAIN_LIMIT) {
        return Err(Error::BesselDomain {
            x: sigma_prime,
            limit: BESSEL_DOMAIN_LIMIT,
        });
    }
    let theory = sample_state_on_grid(state, grid);
    let a_max = theory.amplitude().max_value();
    debug_assert!(a_max > 0.0);

    let mut out = ComplexField::zeros(*grid, PlaneTag::Pupil);
    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            if !grid.in_aperture(row, col) {
                continue;
            }
            let idx = grid.index(row, col);
            let value = theory.values()[idx];
            let ratio = value.norm() / a_max;
            let recording_phase = -value.arg();
            let amp = analytic_order_amplitude(-1, ratio, sigma_prime);
            let ph = analytic_order_phase(-1, recording_phase, ratio, sigma_prime, 0.0);
            out.values_mut()[idx] = amp * Complex64::cis(-ph);
        }
    }
    Ok(out)
}

/// Removes the residual linear carrier left by recentering onto an integer
/// bin: the exact order frequency `-m N_t / D` rarely lands on a bin, and
/// the leftover fraction is a known tilt that the reference-wave
/// multiplication would have cancelled.
fn remove_residual_carrier(field: &mut ComplexField, tilt_waves: f64, spec: &OrderSpec) {
    let g = field.geometry();
    let exact = -(spec.m as f64) * tilt_waves / g.aperture_diameter() as f64;
    let residual = exact - spec.offset_bins as f64 / g.rows() as f64;
    if residual == 0.0 {
        return;
    }
    for row in 0..g.rows() {
        let y = row as f64 - g.center().0 as f64;
        let factor = Complex64::cis(-2.0 * std::f64::consts::PI * residual * y);
        for col in 0..g.cols() {
            field.values_mut()[g.index(row, col)] *= factor;
        }
    }
}

/// Every stage of one generation run, for inspection and image export.
#[derive(Debug, Clone)]
pub struct PipelineArtifacts {
    pub theory: ComplexField,
    pub hologram: HologramFunction,
    pub transmittance: ComplexField,
    pub farfield: ComplexField,
    pub isolated: ComplexField,
    pub generated: ComplexField,
    pub report: FidelityReport,
}

/// Full numeric generation chain with the analytic intensity normalization:
/// sample the state, optionally precondition, record the hologram, apply the
/// phase-SLM transmittance, transform to the far field, isolate and
/// demodulate the m = -1 order, transform back and score the fidelity
/// against the sampled theory state.
pub fn simulate_pipeline(
    state: &SuperpositionState,
    sigma_prime: f64,
    tilt_waves: f64,
    precondition: bool,
    grid: &GridGeometry,
) -> Result<(ComplexField, FidelityReport)> {
    simulate_pipeline_with(
        state,
        sigma_prime,
        tilt_waves,
        precondition,
        grid,
        IMaxMode::Analytic,
        None,
    )
}

/// [`simulate_pipeline`] with an explicit intensity normalization mode and
/// an optional SLM wavefront-error map (honored in the preconditioned path).
pub fn simulate_pipeline_with(
    state: &SuperpositionState,
    sigma_prime: f64,
    tilt_waves: f64,
    precondition: bool,
    grid: &GridGeometry,
    i_max_mode: IMaxMode,
    wfe_map: Option<&ScalarField>,
) -> Result<(ComplexField, FidelityReport)> {
    let artifacts = simulate_pipeline_artifacts(
        state,
        sigma_prime,
        tilt_waves,
        precondition,
        grid,
        i_max_mode,
        wfe_map,
    )?;
    Ok((artifacts.generated, artifacts.report))
}

/// [`simulate_pipeline_with`], returning every intermediate stage.
pub fn simulate_pipeline_artifacts(
    state: &SuperpositionState,
    sigma_prime: f64,
    tilt_waves: f64,
    precondition: bool,
    grid: &GridGeometry,
    i_max_mode: IMaxMode,
    wfe_map: Option<&ScalarField>,
) -> Result<PipelineArtifacts> {
    let mut params = HologramParams::from_sigma_prime(sigma_prime, precondition)?;
    params.i_max_mode = i_max_mode;

    let theory = sample_state_on_grid(state, grid);
    let amplitude = theory.amplitude();
    // The hologram records the target in the `A exp(-i Phi)` sense, so the
    // recording phase is the negated argument of the sampled wavefunction.
    let recording_phase = ScalarField::from_values(
        theory.values().iter().map(|v| -v.arg()).collect(),
        *grid,
    );

    let (a_grid, phi_grid) = if precondition {
        cgh::precondition(&amplitude, &recording_phase, sigma_prime, wfe_map)?
    } else {
        (amplitude, recording_phase)
    };

    let reference = ReferenceWave::matched(tilt_waves, &a_grid)?;
    let hologram = build_hologram(&a_grid, &phi_grid, &reference, &params)?;
    let transmittance = slm_transmittance(&hologram);
    let farfield = far_field(&transmittance)?;
    let spec = OrderSpec::for_order(-1, tilt_waves, grid);
    let isolated = isolate_order(&farfield, &spec)?;
    let mut generated = back_propagate(&isolated)?;
    remove_residual_carrier(&mut generated, tilt_waves, &spec);

    let meta = ReportMeta {
        state: state.label().to_string(),
        sigma_prime,
        tilt_waves,
        precondition,
    };
    let report = fidelity::probability(&theory, &generated, meta)?;
    Ok(PipelineArtifacts {
        theory,
        hologram,
        transmittance,
        farfield,
        isolated,
        generated,
        report,
    })
}

/// Tilt axis of a synthetic interferogram reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferogramAxis {
    Horizontal,
    Vertical,
}

/// Intensity of the field summed with a tilted plane reference,
/// `|field + exp(i 2 pi N u / D)|^2`, normalized to [0, 1].
pub fn synth_interferogram(
    field: &ComplexField,
    ref_tilt_waves: f64,
    axis: InterferogramAxis,
) -> Result<ScalarField> {
    field.expect_plane(PlaneTag::Pupil)?;
    let g = field.geometry();
    let d = g.aperture_diameter() as f64;
    let mut values = Vec::with_capacity(g.len());
    for row in 0..g.rows() {
        for col in 0..g.cols() {
            let (x, y) = g.xy(row, col);
            let u = match axis {
                InterferogramAxis::Horizontal => x,
                InterferogramAxis::Vertical => y,
            };
            let reference = Complex64::cis(2.0 * std::f64::consts::PI * ref_tilt_waves * u / d);
            values.push((field.values()[g.index(row, col)] + reference).norm_sqr());
        }
    }
    let max = values.iter().copied().fold(0.0_f64, f64::max);
    if max > 0.0 {
        for v in &mut values {
            *v /= max;
        }
    }
    Ok(ScalarField::from_values(values, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_mub_tables, Member, OamIndex};

    const EPS: f64 = 1e-12;

    #[test]
    fn order_amplitude_examples() {
        let peak = analytic_order_amplitude(-1, 1.0, 1.8412);
        assert!((peak - 0.58187).abs() < 1e-4);
        assert!((peak * peak - 0.339).abs() < 1e-3);
        assert!((analytic_order_amplitude(0, 0.0, 2.7) - 1.0).abs() < EPS);
    }

    #[test]
    fn order_phase_examples() {
        // no aberration at zero amplitude
        assert!((analytic_order_phase(-1, 0.83, 0.0, 1.84, 0.4) - 0.83).abs() < EPS);
        // peak aberration 0.92 rad at sigma' = 1.84
        assert!((analytic_order_phase(-1, 0.0, 1.0, 1.84, 0.0) - 0.92).abs() < EPS);
        // carrier enters as (m + 1) * carrier
        let ph = analytic_order_phase(1, 0.0, 0.0, 1.0, std::f64::consts::PI);
        assert!((ph - 2.0 * std::f64::consts::PI).abs() < EPS);
    }

    #[test]
    fn modulo2pi_weights_select_first_order() {
        let w = modulo2pi_order_weights(&[-1, 0, 1, 2, 3]);
        assert!(w[0].abs() < 1e-12);
        assert!(w[1].abs() < 1e-12);
        assert!((w[2] - 1.0).abs() < 1e-12);
        assert!(w[3].abs() < 1e-12);
        assert!(w[4].abs() < 1e-12);
    }

    #[test]
    fn wrapped_phase_coefficients_match_sinc_weights() {
        for l in 1..=3 {
            let orders: Vec<i32> = (-3..=3).collect();
            let coeffs = wrapped_phase_order_coefficients(l, &orders, 4096);
            let weights = modulo2pi_order_weights(&orders);
            for (c, w) in coeffs.iter().zip(&weights) {
                assert!(
                    (c.norm() - w.abs()).abs() < 1e-3,
                    "l={l}: |c|={} vs {w}",
                    c.norm()
                );
            }
        }
    }

    #[test]
    fn jacobi_anger_zero_map_is_exact_at_m0() {
        let grid = GridGeometry::new(96, 96, 80).unwrap();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(5.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(0.0, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        assert!(jacobi_anger_check(&h, 0) < 1e-14);
    }

    #[test]
    fn jacobi_anger_converges_on_grating() {
        let grid = GridGeometry::new(128, 128, 100).unwrap();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(10.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(2.0 * 1.84, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        assert!((h.sigma_prime() - 1.84).abs() < 1e-12);

        let coarse = jacobi_anger_check(&h, 1);
        let fine = jacobi_anger_check(&h, 10);
        assert!(coarse > 0.1, "M=1 error {coarse}");
        assert!(fine < 1e-6, "M=10 error {fine}");

        let mut prev = f64::INFINITY;
        for m in 1..=12 {
            let err = jacobi_anger_check(&h, m);
            assert!(err <= prev + 1e-15, "error grew at M={m}: {prev} -> {err}");
            prev = err;
        }
    }

    #[test]
    fn far_field_of_disk_peaks_at_center() {
        let grid = GridGeometry::new(128, 128, 100).unwrap();
        let disk = ComplexField::from_pupil_fn(grid, |_, _, _| Complex64::new(1.0, 0.0));
        let ff = far_field(&disk).unwrap();
        assert_eq!(ff.plane(), PlaneTag::FarField);
        let amp = ff.amplitude();
        let mut best = (0, 0);
        let mut best_v = 0.0;
        for r in 0..128 {
            for c in 0..128 {
                if amp.get(r, c) > best_v {
                    best_v = amp.get(r, c);
                    best = (r, c);
                }
            }
        }
        assert_eq!(best, grid.center());
    }

    #[test]
    fn far_field_peak_tracks_tilt() {
        let grid = GridGeometry::new(256, 256, 230).unwrap();
        let tilt = 10.0;
        let d = grid.aperture_diameter() as f64;
        let field = ComplexField::from_pupil_fn(grid, |_x, y, _| {
            Complex64::cis(2.0 * std::f64::consts::PI * tilt * y / d)
        });
        let ff = far_field(&field).unwrap();
        let amp = ff.amplitude();
        let mut best = (0, 0);
        let mut best_v = 0.0;
        for r in 0..256 {
            for c in 0..256 {
                if amp.get(r, c) > best_v {
                    best_v = amp.get(r, c);
                    best = (r, c);
                }
            }
        }
        let expected_row =
            grid.center().0 as i64 + (tilt * grid.rows() as f64 / d).round() as i64;
        assert_eq!(best.0 as i64, expected_row);
        assert_eq!(best.1, grid.center().1);
    }

    #[test]
    fn round_trip_is_identity() {
        let grid = GridGeometry::new(96, 128, 80).unwrap();
        let field = ComplexField::from_pupil_fn(grid, |x, y, th| {
            Complex64::cis(0.13 * x - 0.07 * y + th)
        });
        let back = back_propagate(&far_field(&field).unwrap()).unwrap();
        let max_err = field
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-10, "round trip error {max_err}");

        let p0 = field.total_power();
        let p1 = far_field(&field).unwrap().total_power();
        assert!((p0 - p1).abs() < 1e-10 * p0, "Parseval violated");
    }

    #[test]
    fn plane_tags_are_enforced() {
        let grid = GridGeometry::new(96, 96, 80).unwrap();
        let pupil = ComplexField::zeros(grid, PlaneTag::Pupil);
        let ff = ComplexField::zeros(grid, PlaneTag::FarField);
        assert!(far_field(&ff).is_err());
        assert!(back_propagate(&pupil).is_err());
        assert!(isolate_order(
            &pupil,
            &OrderSpec {
                m: -1,
                offset_bins: 0,
                window_width_bins: 4
            }
        )
        .is_err());
    }

    #[test]
    fn isolate_order_moves_delta_to_center() {
        let grid = GridGeometry::new(128, 128, 100).unwrap();
        let (cr, cc) = grid.center();
        let mut ff = ComplexField::zeros(grid, PlaneTag::FarField);
        let idx = grid.index(cr + 13, cc + 2);
        ff.values_mut()[idx] = Complex64::new(0.4, -0.6);
        // a second order outside the window must vanish entirely
        let idx2 = grid.index(cr - 13, cc);
        ff.values_mut()[idx2] = Complex64::new(0.9, 0.0);

        let spec = OrderSpec {
            m: -1,
            offset_bins: 13,
            window_width_bins: 13,
        };
        let iso = isolate_order(&ff, &spec).unwrap();
        assert!((iso.get(cr, cc + 2) - Complex64::new(0.4, -0.6)).norm() < EPS);
        let leftover: f64 = iso
            .values()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            - iso.get(cr, cc + 2).norm_sqr();
        assert!(leftover < 1e-20, "suppressed order leaked {leftover}");
    }

    #[test]
    fn isolate_order_window_bounds() {
        let grid = GridGeometry::new(128, 128, 100).unwrap();
        let ff = ComplexField::zeros(grid, PlaneTag::FarField);
        let spec = OrderSpec {
            m: -1,
            offset_bins: 70,
            window_width_bins: 20,
        };
        assert!(matches!(
            isolate_order(&ff, &spec),
            Err(Error::WindowOutOfBounds { .. })
        ));
    }

    #[test]
    fn order_spec_places_first_order() {
        let grid = GridGeometry::xga_default();
        let spec = OrderSpec::for_order(-1, 100.0, &grid);
        assert_eq!(spec.offset_bins, 111); // round(100 * 768 / 691)
        assert_eq!(spec.window_width_bins, 111);
        let spec = OrderSpec::for_order(1, 100.0, &grid);
        assert_eq!(spec.offset_bins, -111);
    }

    #[test]
    fn grating_first_order_efficiency_matches_j1_squared() {
        // Constant-amplitude grating: the numeric m = -1 power fraction
        // approaches J1(sigma')^2 once the orders are well separated.
        let grid = GridGeometry::new(256, 256, 230).unwrap();
        let amplitude = ScalarField::from_fn(grid, |x, y| {
            if x * x + y * y <= grid.aperture_radius().powi(2) {
                1.0
            } else {
                0.0
            }
        });
        let phase = ScalarField::zeros(grid);
        let tilt = 50.0;
        let reference = ReferenceWave::matched(tilt, &amplitude).unwrap();
        let params = HologramParams::from_sigma_prime(1.0, false).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        let t = slm_transmittance(&h);
        let total = t.total_power();
        let ff = far_field(&t).unwrap();
        let iso = isolate_order(&ff, &OrderSpec::for_order(-1, tilt, &grid)).unwrap();
        let captured = iso.total_power();
        let j1 = bessel_jn(1, 1.0);
        let expected = j1 * j1;
        let ratio = captured / total;
        assert!(
            (ratio - expected).abs() < 0.01 * expected,
            "efficiency {ratio} vs {expected}"
        );
    }

    #[test]
    fn analytic_field_of_pure_state_is_proportional() {
        let grid = GridGeometry::new(128, 128, 100).unwrap();
        let state = SuperpositionState::pure(OamIndex(1)).unwrap();
        let theory = sample_state_on_grid(&state, &grid);
        let generated = analytic_minus_one_field(&state, 1.84, &grid).unwrap();
        // constant amplitude: generated = J1(sigma') e^{i theta} e^{-i aberration}
        let (cr, cc) = grid.center();
        let scale = generated.get(cr, cc + 30) / theory.get(cr, cc + 30);
        for (r, c) in [(cr + 20, cc), (cr - 11, cc + 17), (cr + 5, cc - 40)] {
            let ratio = generated.get(r, c) / theory.get(r, c);
            assert!((ratio - scale).norm() < 1e-10);
        }
        assert!((scale.norm() - bessel_jn(1, 1.84)).abs() < 1e-10);
    }

    #[test]
    fn pipeline_smoke_and_precondition_ordering() {
        let grid = GridGeometry::new(256, 256, 230).unwrap();
        let table = build_mub_tables();
        let state = table.state(3, Member::C);
        let (_, plain) = simulate_pipeline(state, 1.72, 20.0, false, &grid).unwrap();
        let (field, pre) = simulate_pipeline(state, 1.72, 20.0, true, &grid).unwrap();
        assert_eq!(field.plane(), PlaneTag::Pupil);
        assert!(pre.probability > plain.probability, "{pre:?} vs {plain:?}");
        assert!(pre.probability > 0.9, "preconditioned P {}", pre.probability);
        assert!(plain.probability > 0.8);
        assert!((plain.probability - plain.inner.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn pipeline_rejects_nonmonotonic_preconditioning() {
        let grid = GridGeometry::new(128, 128, 100).unwrap();
        let table = build_mub_tables();
        let state = table.state(3, Member::C);
        assert!(matches!(
            simulate_pipeline(state, 2.1, 20.0, true, &grid),
            Err(Error::SigmaPrimeRange { .. })
        ));
    }

    #[test]
    fn interferogram_constant_field_has_ten_fringes() {
        let grid = GridGeometry::new(256, 256, 230).unwrap();
        let field = ComplexField::from_pupil_fn(grid, |_, _, _| Complex64::new(1.0, 0.0));
        let ig = synth_interferogram(&field, 10.0, InterferogramAxis::Vertical).unwrap();
        assert!(ig.max_value() <= 1.0 + EPS && ig.min_value() >= 0.0);
        let fringes = count_fringes(&ig, grid.center().1, &grid);
        assert_eq!(fringes, 10, "fringe count {fringes}");
    }

    #[test]
    fn interferogram_of_zero_field_is_flat() {
        let grid = GridGeometry::new(96, 96, 80).unwrap();
        let field = ComplexField::zeros(grid, PlaneTag::Pupil);
        let ig = synth_interferogram(&field, 10.0, InterferogramAxis::Vertical).unwrap();
        assert!((ig.max_value() - 1.0).abs() < EPS);
        assert!((ig.min_value() - 1.0).abs() < EPS);
    }

    /// Counts fringes along a column as mid-level crossings / 2.
    fn count_fringes(ig: &ScalarField, col: usize, grid: &GridGeometry) -> usize {
        let profile: Vec<f64> = (0..grid.rows())
            .filter(|&r| grid.in_aperture(r, col))
            .map(|r| ig.get(r, col))
            .collect();
        let hi = profile.iter().copied().fold(f64::MIN, f64::max);
        let lo = profile.iter().copied().fold(f64::MAX, f64::min);
        let mid = 0.5 * (hi + lo);
        let mut crossings = 0;
        for w in profile.windows(2) {
            if (w[0] - mid).signum() != (w[1] - mid).signum() {
                crossings += 1;
            }
        }
        crossings / 2
    }

    #[test]
    fn vortex_interferogram_shows_fork() {
        let grid = GridGeometry::new(256, 256, 230).unwrap();
        let state = SuperpositionState::pure(OamIndex(1)).unwrap();
        let field = sample_state_on_grid(&state, &grid);
        let ig = synth_interferogram(&field, 10.0, InterferogramAxis::Vertical).unwrap();
        let quarter = grid.aperture_diameter() / 4;
        let left = count_fringes(&ig, grid.center().1 - quarter, &grid);
        let right = count_fringes(&ig, grid.center().1 + quarter, &grid);
        assert_eq!(
            left.abs_diff(right),
            1,
            "fork dislocation: {left} vs {right} fringes"
        );
    }
}

//! Off-axis hologram recording and phase-SLM transmittance.
//!
//! The recording function interferes a target field `a exp(i phi)` with a
//! tilted plane reference of matched amplitude, normalizes the intensity and
//! scales it to the SLM phase range sigma. A phase modulator then imposes
//! `t = exp(-i f)`: retardance falls as recording intensity rises, so the
//! recorded phase appears conjugated in the m = -1 diffraction order together
//! with a J1 amplitude nonlinearity and a quadratic phase aberration.
//! Preconditioning inverts both so the m = -1 order reproduces the target
//! exactly.

use num_complex::Complex64;

use crate::bessel::{bessel_jn, J1_MONOTONIC_LIMIT};
use crate::error::{Error, Result};
use crate::field::{ComplexField, PlaneTag, ScalarField};
use crate::grid::GridGeometry;

/// Off-axis plane reference wave. `tilt_waves` counts carrier cycles across
/// the aperture diameter along +y; `amplitude` is matched to the maximum of
/// the recorded amplitude for full fringe contrast.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceWave {
    pub tilt_waves: f64,
    pub amplitude: f64,
}

impl ReferenceWave {
    pub fn new(tilt_waves: f64, amplitude: f64) -> Result<Self> {
        if !(tilt_waves.is_finite() && tilt_waves >= 0.0) {
            return Err(Error::InvalidReference(format!(
                "tilt must be finite and non-negative, got {tilt_waves}"
            )));
        }
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidReference(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        Ok(Self {
            tilt_waves,
            amplitude,
        })
    }

    /// Reference whose amplitude matches the maximum of `amplitude_grid`.
    pub fn matched(tilt_waves: f64, amplitude_grid: &ScalarField) -> Result<Self> {
        Self::new(tilt_waves, amplitude_grid.max_value())
    }

    /// Carrier phase `2 pi N_t y / D` at height `y` (samples from center).
    #[inline]
    pub fn carrier_phase(&self, y: f64, aperture_diameter: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.tilt_waves * y / aperture_diameter
    }
}

/// How the intensity normalization I_max is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IMaxMode {
    /// The large-tilt limit 4 a_max^2; makes sigma' = sigma / 2 exact.
    #[default]
    Analytic,
    /// Maximum of the recorded intensity over the aperture.
    GridMax,
}

/// Scaling parameters of the CGH map.
#[derive(Debug, Clone, Default)]
pub struct HologramParams {
    /// Maximum SLM phase excursion (radians).
    pub sigma: f64,
    /// Maximum Bessel argument sigma' = 2 sigma a_max^2 / I_max. For
    /// [`IMaxMode::GridMax`] the definitive value is only known after the
    /// recording intensity has been evaluated; the built hologram carries it.
    pub sigma_prime: f64,
    pub i_max_mode: IMaxMode,
    pub precondition: bool,
    /// Optional SLM wavefront-error map in waves.
    pub wfe_map: Option<ScalarField>,
}

impl HologramParams {
    /// Parameters for the analytic normalization, specified by sigma'.
    pub fn from_sigma_prime(sigma_prime: f64, precondition: bool) -> Result<Self> {
        if !(sigma_prime.is_finite() && sigma_prime >= 0.0) {
            return Err(Error::SigmaRange {
                sigma: sigma_prime,
            });
        }
        if precondition && !(sigma_prime > 0.0 && sigma_prime <= J1_MONOTONIC_LIMIT) {
            return Err(Error::SigmaPrimeRange {
                sigma_prime,
                limit: J1_MONOTONIC_LIMIT,
            });
        }
        Ok(Self {
            sigma: 2.0 * sigma_prime,
            sigma_prime,
            i_max_mode: IMaxMode::Analytic,
            precondition,
            wfe_map: None,
        })
    }

    /// Parameters specified by the SLM phase range sigma.
    pub fn from_sigma(sigma: f64, i_max_mode: IMaxMode) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::SigmaRange { sigma });
        }
        Ok(Self {
            sigma,
            sigma_prime: sigma / 2.0,
            i_max_mode,
            precondition: false,
            wfe_map: None,
        })
    }
}

/// A computed CGH map plus everything needed to analyze its diffraction.
#[derive(Debug, Clone)]
pub struct HologramFunction {
    map: ScalarField,
    amplitude_ratio: ScalarField,
    recording_phase: ScalarField,
    reference: ReferenceWave,
    params: HologramParams,
    sigma_prime: f64,
}

impl HologramFunction {
    /// The CGH map f in radians; 0 <= f <= sigma inside the aperture, 0 outside.
    pub fn map(&self) -> &ScalarField {
        &self.map
    }

    pub fn geometry(&self) -> GridGeometry {
        self.map.geometry()
    }

    pub fn sigma(&self) -> f64 {
        self.params.sigma
    }

    /// Effective maximum Bessel argument 2 sigma a_max^2 / I_max.
    pub fn sigma_prime(&self) -> f64 {
        self.sigma_prime
    }

    pub fn reference(&self) -> ReferenceWave {
        self.reference
    }

    pub fn params(&self) -> &HologramParams {
        &self.params
    }

    /// Recorded amplitude normalized to its maximum, a / a_max.
    pub fn amplitude_ratio(&self) -> &ScalarField {
        &self.amplitude_ratio
    }

    /// Recorded phase function phi.
    pub fn recording_phase(&self) -> &ScalarField {
        &self.recording_phase
    }
}

/// Interference intensity `a^2 + b^2 + 2 a b cos(phi - carrier)` at height
/// `y`, with the reference amplitude standing in for a_max.
#[inline]
pub fn recording_intensity(
    a: f64,
    phi: f64,
    reference: &ReferenceWave,
    y: f64,
    aperture_diameter: f64,
) -> f64 {
    let b = reference.amplitude;
    a * a + b * b + 2.0 * a * b * (phi - reference.carrier_phase(y, aperture_diameter)).cos()
}

/// Computes the CGH map `f = sigma I / I_max` from amplitude and phase grids.
pub fn build_hologram(
    amplitude: &ScalarField,
    phase: &ScalarField,
    reference: &ReferenceWave,
    params: &HologramParams,
) -> Result<HologramFunction> {
    amplitude.check_same_geometry(phase)?;
    let geometry = amplitude.geometry();
    let d = geometry.aperture_diameter() as f64;

    let mut a_max = 0.0_f64;
    for &a in amplitude.values() {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::NegativeAmplitude { value: a });
        }
        a_max = a_max.max(a);
    }
    if a_max <= 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    if (reference.amplitude - a_max).abs() > 1e-9 * a_max {
        return Err(Error::ReferenceAmplitudeMismatch {
            reference: reference.amplitude,
            grid_max: a_max,
        });
    }

    let mut intensity = vec![0.0_f64; geometry.len()];
    let mut i_grid_max = 0.0_f64;
    for row in 0..geometry.rows() {
        for col in 0..geometry.cols() {
            if !geometry.in_aperture(row, col) {
                continue;
            }
            let idx = geometry.index(row, col);
            let (_x, y) = geometry.xy(row, col);
            let i = recording_intensity(
                amplitude.values()[idx],
                phase.values()[idx],
                reference,
                y,
                d,
            );
            intensity[idx] = i;
            i_grid_max = i_grid_max.max(i);
        }
    }

    let i_max = match params.i_max_mode {
        IMaxMode::Analytic => 4.0 * a_max * a_max,
        IMaxMode::GridMax => i_grid_max,
    };
    let sigma_prime = 2.0 * params.sigma * a_max * a_max / i_max;

    let mut map = vec![0.0_f64; geometry.len()];
    for row in 0..geometry.rows() {
        for col in 0..geometry.cols() {
            if geometry.in_aperture(row, col) {
                let idx = geometry.index(row, col);
                map[idx] = params.sigma * intensity[idx] / i_max;
            }
        }
    }

    let ratio: Vec<f64> = amplitude.values().iter().map(|&a| a / a_max).collect();

    Ok(HologramFunction {
        map: ScalarField::from_values(map, geometry),
        amplitude_ratio: ScalarField::from_values(ratio, geometry),
        recording_phase: phase.clone(),
        reference: *reference,
        params: params.clone(),
        sigma_prime,
    })
}

/// Thin-phase transmittance `t = exp(-i f)` inside the aperture, zero
/// outside (the aperture stop blocks the rest).
pub fn slm_transmittance(hologram: &HologramFunction) -> ComplexField {
    let geometry = hologram.geometry();
    let mut field = ComplexField::zeros(geometry, PlaneTag::Pupil);
    for row in 0..geometry.rows() {
        for col in 0..geometry.cols() {
            if geometry.in_aperture(row, col) {
                let idx = geometry.index(row, col);
                field.values_mut()[idx] = Complex64::cis(-hologram.map().values()[idx]);
            }
        }
    }
    field
}

/// Bisection step count giving a bracket width below 1e-12.
const BISECTION_STEPS: u32 = 42;

/// Inverts `J1(sigma' r) = target` for `r` on the monotonic branch.
pub fn invert_j1(target: f64, sigma_prime: f64) -> Result<f64> {
    let j_max = validate_inversion_domain(sigma_prime)?;
    invert_j1_prechecked(target, sigma_prime, j_max)
}

fn validate_inversion_domain(sigma_prime: f64) -> Result<f64> {
    if !(sigma_prime.is_finite() && sigma_prime > 0.0 && sigma_prime <= J1_MONOTONIC_LIMIT) {
        return Err(Error::SigmaPrimeRange {
            sigma_prime,
            limit: J1_MONOTONIC_LIMIT,
        });
    }
    Ok(bessel_jn(1, sigma_prime))
}

fn invert_j1_prechecked(target: f64, sigma_prime: f64, j_max: f64) -> Result<f64> {
    if !target.is_finite() || target < 0.0 || target > j_max * (1.0 + 1e-12) {
        return Err(Error::InvertTargetRange {
            target,
            max: j_max,
        });
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    if target >= j_max {
        return Ok(1.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if bessel_jn(1, sigma_prime * mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Computes the preconditioned recording functions for a target amplitude
/// `A` and target phase `Phi`.
///
/// The returned amplitude is normalized (values in [0, 1], maximum exactly at
/// the brightest target sample) and satisfies `J1(sigma' a) = c A` with
/// `c = J1(sigma') / A_max`; the returned phase is
/// `Phi - (sigma' / 2) a^2 - 2 pi W` with `W` the optional wavefront-error
/// map in waves.
pub fn precondition(
    amplitude: &ScalarField,
    phase: &ScalarField,
    sigma_prime: f64,
    wfe_map: Option<&ScalarField>,
) -> Result<(ScalarField, ScalarField)> {
    amplitude.check_same_geometry(phase)?;
    if let Some(w) = wfe_map {
        amplitude.check_same_geometry(w)?;
    }
    let j_max = validate_inversion_domain(sigma_prime)?;

    let mut a_max = 0.0_f64;
    for &a in amplitude.values() {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::NegativeAmplitude { value: a });
        }
        a_max = a_max.max(a);
    }
    if a_max <= 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let scale = j_max / a_max;

    let geometry = amplitude.geometry();
    let mut a_out = Vec::with_capacity(geometry.len());
    let mut phi_out = Vec::with_capacity(geometry.len());
    for idx in 0..geometry.len() {
        let target = (scale * amplitude.values()[idx]).min(j_max);
        let r = invert_j1_prechecked(target, sigma_prime, j_max)?;
        let mut phi = phase.values()[idx] - 0.5 * sigma_prime * r * r;
        if let Some(w) = wfe_map {
            phi -= 2.0 * std::f64::consts::PI * w.values()[idx];
        }
        a_out.push(r);
        phi_out.push(phi);
    }

    Ok((
        ScalarField::from_values(a_out, geometry),
        ScalarField::from_values(phi_out, geometry),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn small_grid() -> GridGeometry {
        GridGeometry::new(96, 96, 80).unwrap()
    }

    #[test]
    fn recording_intensity_limits() {
        let reference = ReferenceWave::new(0.0, 2.0).unwrap();
        // constructive: phi - carrier = 0
        assert!((recording_intensity(2.0, 0.0, &reference, 0.0, 80.0) - 16.0).abs() < EPS);
        // destructive
        assert!(
            recording_intensity(2.0, std::f64::consts::PI, &reference, 0.0, 80.0).abs() < 1e-10
        );
        // reference only
        assert!((recording_intensity(0.0, 1.234, &reference, 0.0, 80.0) - 4.0).abs() < EPS);
    }

    #[test]
    fn constant_amplitude_grating() {
        let grid = GridGeometry::xga_default();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(100.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(3.44, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();

        assert!((h.sigma_prime() - 1.72).abs() < EPS);
        let max = h.map().max_value();
        assert!(max <= 3.44 + EPS && max > 3.43, "grating max {max}");
        assert!(h.map().min_value() >= 0.0);

        // Count maxima along the center column inside the aperture: one per
        // carrier period, 100 periods across the aperture.
        let (_, cc) = grid.center();
        let col: Vec<f64> = (0..grid.rows()).map(|r| h.map().get(r, cc)).collect();
        let mut peaks = 0;
        for r in 1..grid.rows() - 1 {
            if grid.in_aperture(r, cc)
                && col[r] > col[r - 1]
                && col[r] > col[r + 1]
                && col[r] > 1.0
            {
                peaks += 1;
            }
        }
        assert!((99..=101).contains(&peaks), "grating has {peaks} peaks");
    }

    #[test]
    fn zero_sigma_gives_zero_map() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(10.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(0.0, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        assert_eq!(h.map().max_value(), 0.0);
        assert_eq!(h.map().min_value(), 0.0);
    }

    #[test]
    fn map_is_zero_outside_aperture() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(10.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(3.0, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        assert_eq!(h.map().get(0, 0), 0.0);
    }

    #[test]
    fn rejects_zero_amplitude_grid() {
        let grid = small_grid();
        let amplitude = ScalarField::zeros(grid);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::new(10.0, 1.0).unwrap();
        let params = HologramParams::from_sigma(3.0, IMaxMode::Analytic).unwrap();
        assert!(matches!(
            build_hologram(&amplitude, &phase, &reference, &params),
            Err(Error::ZeroAmplitude)
        ));
    }

    #[test]
    fn rejects_mismatched_reference_amplitude() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::new(10.0, 0.5).unwrap();
        let params = HologramParams::from_sigma(3.0, IMaxMode::Analytic).unwrap();
        assert!(matches!(
            build_hologram(&amplitude, &phase, &reference, &params),
            Err(Error::ReferenceAmplitudeMismatch { .. })
        ));
    }

    #[test]
    fn grid_max_mode_approaches_analytic_at_large_tilt() {
        let grid = GridGeometry::xga_default();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(100.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(3.44, IMaxMode::GridMax).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        assert!((h.sigma_prime() - 1.72).abs() < 1e-3, "{}", h.sigma_prime());
        // Grid-max normalization hits sigma exactly somewhere.
        assert!((h.map().max_value() - 3.44).abs() < 1e-12);
    }

    #[test]
    fn transmittance_is_unit_modulus_inside() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(5.0, &amplitude).unwrap();

        let params = HologramParams::from_sigma(0.0, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        let t = slm_transmittance(&h);
        let (cr, cc) = grid.center();
        assert!((t.get(cr, cc) - Complex64::new(1.0, 0.0)).norm() < EPS);
        assert_eq!(t.get(0, 0), Complex64::new(0.0, 0.0));

        let params = HologramParams::from_sigma(3.44, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        let t = slm_transmittance(&h);
        for row in 0..grid.rows() {
            for col in 0..grid.cols() {
                if grid.in_aperture(row, col) {
                    assert!((t.get(row, col).norm() - 1.0).abs() < EPS);
                }
            }
        }
    }

    #[test]
    fn constant_pi_map_gives_minus_one() {
        // Force f = pi everywhere inside: constant amplitude, zero tilt,
        // zero phase gives I = 4 a^2 so f = sigma; pick sigma = pi.
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let reference = ReferenceWave::matched(0.0, &amplitude).unwrap();
        let params = HologramParams::from_sigma(std::f64::consts::PI, IMaxMode::Analytic).unwrap();
        let h = build_hologram(&amplitude, &phase, &reference, &params).unwrap();
        let t = slm_transmittance(&h);
        let (cr, cc) = grid.center();
        assert!((t.get(cr, cc) - Complex64::new(-1.0, 0.0)).norm() < EPS);
    }

    #[test]
    fn invert_j1_endpoints_and_roundtrip() {
        assert_eq!(invert_j1(0.0, 1.72).unwrap(), 0.0);
        let top = bessel_jn(1, 1.72);
        assert_eq!(invert_j1(top, 1.72).unwrap(), 1.0);
        let r = invert_j1(bessel_jn(1, 0.5 * 1.72), 1.72).unwrap();
        assert!((r - 0.5).abs() < 1e-9, "round trip r = {r}");
    }

    #[test]
    fn invert_j1_domain_errors() {
        assert!(matches!(
            invert_j1(0.1, 2.4),
            Err(Error::SigmaPrimeRange { .. })
        ));
        assert!(matches!(
            invert_j1(0.7, 1.72),
            Err(Error::InvertTargetRange { .. })
        ));
        assert!(matches!(
            invert_j1(-0.1, 1.72),
            Err(Error::InvertTargetRange { .. })
        ));
    }

    #[test]
    fn precondition_constant_amplitude_is_uniform_shift() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 0.7);
        let phase = ScalarField::from_fn(grid, |x, y| 0.01 * x - 0.02 * y);
        let (a, phi) = precondition(&amplitude, &phase, 1.72, None).unwrap();
        let (cr, cc) = grid.center();
        assert!((a.get(cr, cc) - 1.0).abs() < 1e-9);
        assert!((a.get(3, 5) - 1.0).abs() < 1e-9);
        let shift = phase.get(cr, cc) - phi.get(cr, cc);
        assert!((shift - 0.86).abs() < 1e-9, "uniform shift {shift}");
        let shift2 = phase.get(10, 20) - phi.get(10, 20);
        assert!((shift - shift2).abs() < 1e-9);
    }

    #[test]
    fn precondition_maps_zeros_to_zero() {
        let grid = small_grid();
        let amplitude = ScalarField::from_fn(grid, |x, _| if x.abs() < 2.0 { 0.0 } else { 1.0 });
        let phase = ScalarField::constant(grid, 0.4);
        let (a, phi) = precondition(&amplitude, &phase, 1.5, None).unwrap();
        let (cr, cc) = grid.center();
        assert_eq!(a.get(cr, cc), 0.0);
        assert!(phi.get(cr, cc).is_finite());
        assert!((phi.get(cr, cc) - 0.4).abs() < EPS);
    }

    #[test]
    fn precondition_rejects_nonmonotonic_sigma_prime() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        assert!(matches!(
            precondition(&amplitude, &phase, 2.2, None),
            Err(Error::SigmaPrimeRange { .. })
        ));
    }

    #[test]
    fn wavefront_error_subtracts_full_cycle_fraction() {
        let grid = small_grid();
        let amplitude = ScalarField::constant(grid, 1.0);
        let phase = ScalarField::zeros(grid);
        let wfe = ScalarField::constant(grid, 0.25);
        let (_, phi_plain) = precondition(&amplitude, &phase, 1.72, None).unwrap();
        let (_, phi_wfe) = precondition(&amplitude, &phase, 1.72, Some(&wfe)).unwrap();
        let delta = phi_plain.get(4, 4) - phi_wfe.get(4, 4);
        assert!((delta - std::f64::consts::FRAC_PI_2).abs() < EPS);
    }

    #[test]
    fn params_validation() {
        assert!(HologramParams::from_sigma_prime(1.72, true).is_ok());
        assert!(matches!(
            HologramParams::from_sigma_prime(1.9, true),
            Err(Error::SigmaPrimeRange { .. })
        ));
        assert!(matches!(
            HologramParams::from_sigma(-0.5, IMaxMode::Analytic),
            Err(Error::SigmaRange { .. })
        ));
        let p = HologramParams::from_sigma_prime(1.72, false).unwrap();
        assert!((p.sigma - 3.44).abs() < EPS);
    }
}

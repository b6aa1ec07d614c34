//! Inner-product fidelity between theoretical and generated fields.
//!
//! The metric is the normalized aperture inner product; its squared modulus
//! is the probability P of measuring the generated state as the theoretical
//! one. Uniform Cartesian sampling absorbs the polar area element, and the
//! accumulation order is fixed row-major so results never depend on any
//! parallel schedule.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::diffraction::{analytic_order_amplitude, analytic_order_phase, simulate_pipeline};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::field::PlaneTag;
use crate::grid::GridGeometry;
use crate::states::{AzimuthalProfile, MubTable, StateLabel, SuperpositionState};

/// Azimuthal resolution of the analytic sweeps. Divisible by 3 so that the
/// three members of a basis, which differ by 2pi/3 rotations, sample the
/// same point set and score identically to rounding.
pub const SWEEP_THETA_SAMPLES: usize = 6144;

#[derive(Debug, Clone)]
pub struct ReportMeta {
    pub state: String,
    pub sigma_prime: f64,
    pub tilt_waves: f64,
    pub precondition: bool,
}

/// Fidelity of one generated field against its theory target.
#[derive(Debug, Clone)]
pub struct FidelityReport {
    /// Normalized inner product <psi_t | psi_h>.
    pub inner: Complex64,
    pub norm_theory: f64,
    pub norm_generated: f64,
    /// P = |inner|^2.
    pub probability: f64,
    pub meta: ReportMeta,
}

fn aperture_inner(theory: &ComplexField, generated: &ComplexField) -> Result<(Complex64, f64, f64)> {
    theory.expect_plane(PlaneTag::Pupil)?;
    generated.expect_plane(PlaneTag::Pupil)?;
    theory.check_same_geometry(generated)?;
    let g = theory.geometry();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut norm_t = 0.0_f64;
    let mut norm_h = 0.0_f64;
    for row in 0..g.rows() {
        for col in 0..g.cols() {
            if !g.in_aperture(row, col) {
                continue;
            }
            let idx = g.index(row, col);
            let t = theory.values()[idx];
            let h = generated.values()[idx];
            acc += t.conj() * h;
            norm_t += t.norm_sqr();
            norm_h += h.norm_sqr();
        }
    }
    if norm_t <= 0.0 || norm_h <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((acc, norm_t.sqrt(), norm_h.sqrt()))
}

/// Normalized inner product of two pupil fields over the aperture.
pub fn inner_product(theory: &ComplexField, generated: &ComplexField) -> Result<Complex64> {
    let (acc, norm_t, norm_h) = aperture_inner(theory, generated)?;
    Ok(acc / (norm_t * norm_h))
}

/// Squares the normalized inner product and packages the metadata.
pub fn probability(
    theory: &ComplexField,
    generated: &ComplexField,
    meta: ReportMeta,
) -> Result<FidelityReport> {
    let (acc, norm_t, norm_h) = aperture_inner(theory, generated)?;
    let inner = acc / (norm_t * norm_h);
    Ok(FidelityReport {
        inner,
        norm_theory: norm_t,
        norm_generated: norm_h,
        probability: inner.norm_sqr(),
        meta,
    })
}

/// One data point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub label: StateLabel,
    pub precondition: bool,
    pub probability: f64,
}

/// All probabilities recorded at one axis value (sigma' or tilt).
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub axis_value: f64,
    pub points: Vec<SweepPoint>,
}

fn check_axis(values: &[f64]) -> Result<()> {
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::AxisNotIncreasing);
    }
    Ok(())
}

/// Fidelity of the analytic m = -1 field of one azimuthal profile. The
/// radial integral factors out for ring-shaped wavefunctions, so a uniform
/// azimuthal quadrature evaluates the aperture inner product exactly in the
/// large-resolution limit.
fn analytic_profile_probability(profile: &AzimuthalProfile, sigma_prime: f64) -> f64 {
    let a_max = profile.max_amplitude();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut norm_t = 0.0_f64;
    let mut norm_h = 0.0_f64;
    for k in 0..profile.len() {
        let theory = profile.value(k);
        let ratio = profile.amplitude()[k] / a_max;
        let recording_phase = -profile.phase()[k];
        let amp = analytic_order_amplitude(-1, ratio, sigma_prime);
        let ph = analytic_order_phase(-1, recording_phase, ratio, sigma_prime, 0.0);
        let generated = amp * Complex64::cis(-ph);
        acc += theory.conj() * generated;
        norm_t += theory.norm_sqr();
        norm_h += generated.norm_sqr();
    }
    acc.norm_sqr() / (norm_t * norm_h)
}

/// Analytic-model fidelity of all twelve MUB states versus sigma'.
///
/// States within one basis are rotated copies of each other, so their
/// probabilities coincide; bases 2 and 3 are conjugate pairs and fall on a
/// single curve.
pub fn sweep_sigma(table: &MubTable, sigma_primes: &[f64]) -> Result<Vec<SweepRecord>> {
    check_axis(sigma_primes)?;
    for &sp in sigma_primes {
        if !(sp.is_finite() && sp > 0.0 && sp <= crate::bessel::BESSEL_DOMAIN_LIMIT) {
            return Err(Error::BesselDomain {
                x: sp,
                limit: crate::bessel::BESSEL_DOMAIN_LIMIT,
            });
        }
    }
    let profiles: Vec<(StateLabel, AzimuthalProfile)> = table
        .all_states()
        .map(|s| (s.label(), AzimuthalProfile::sample(s, SWEEP_THETA_SAMPLES)))
        .collect();

    Ok(sigma_primes
        .iter()
        .map(|&sp| SweepRecord {
            axis_value: sp,
            points: profiles
                .iter()
                .map(|(label, profile)| SweepPoint {
                    label: *label,
                    precondition: false,
                    probability: analytic_profile_probability(profile, sp),
                })
                .collect(),
        })
        .collect())
}

/// Full-pipeline fidelity of one state over a list of reference tilts, with
/// and without preconditioning. Points are evaluated in parallel; the record
/// order follows the tilt axis.
pub fn sweep_tilt(
    state: &SuperpositionState,
    tilts: &[f64],
    sigma_prime: f64,
    grid: &GridGeometry,
) -> Result<Vec<SweepRecord>> {
    check_axis(tilts)?;
    let jobs: Vec<(f64, bool)> = tilts
        .iter()
        .flat_map(|&t| [(t, false), (t, true)])
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(tilt, precondition)| {
            simulate_pipeline(state, sigma_prime, tilt, precondition, grid)
                .map(|(_, report)| report)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(tilts
        .iter()
        .enumerate()
        .map(|(i, &tilt)| SweepRecord {
            axis_value: tilt,
            points: reports[2 * i..2 * i + 2]
                .iter()
                .map(|r| SweepPoint {
                    label: state.label(),
                    precondition: r.meta.precondition,
                    probability: r.probability,
                })
                .collect(),
        })
        .collect())
}

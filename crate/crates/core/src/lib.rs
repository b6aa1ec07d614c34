//! Numerical optics for holographic generation of orbital-angular-momentum
//! (OAM) quantum states with a phase-only spatial light modulator.
//!
//! The crate covers the full chain from state algebra to generated field:
//!
//! - [`states`]: the four mutually unbiased bases (MUBs) of the
//!   3-dimensional OAM space and their azimuthal wavefunctions;
//! - [`cgh`]: off-axis (Leith-Upatnieks) hologram recording, the phase-SLM
//!   transmittance `exp(-i f)`, and the preconditioning that inverts the J1
//!   amplitude nonlinearity and quadratic phase aberration of thin phase
//!   holography;
//! - [`diffraction`]: the Bessel-order expansion of the transmittance, a
//!   centered unitary FFT propagator, first-order isolation and
//!   demodulation, and synthetic interferograms;
//! - [`fidelity`]: the normalized inner-product probability between theory
//!   and generated fields, plus the sigma' and tilt sweeps;
//! - [`io`]: PGM and CSV export of fields, holograms and sweep data.

pub mod bessel;
pub mod cgh;
pub mod diffraction;
pub mod error;
mod fft;
pub mod field;
pub mod fidelity;
pub mod grid;
pub mod io;
pub mod states;

pub use bessel::{bessel_j, BESSEL_DOMAIN_LIMIT, J1_MONOTONIC_LIMIT};
pub use cgh::{
    build_hologram, invert_j1, precondition, recording_intensity, slm_transmittance,
    HologramFunction, HologramParams, IMaxMode, ReferenceWave,
};
pub use diffraction::{
    analytic_minus_one_field, analytic_order_amplitude, analytic_order_phase, back_propagate,
    far_field, isolate_order, jacobi_anger_check, modulo2pi_order_weights, simulate_pipeline,
    simulate_pipeline_artifacts, simulate_pipeline_with, synth_interferogram,
    wrapped_phase_order_coefficients, InterferogramAxis, OrderSpec, PipelineArtifacts,
};
pub use error::{Error, Result};
pub use field::{ComplexField, PlaneTag, ScalarField};
pub use fidelity::{
    inner_product, probability, sweep_sigma, sweep_tilt, FidelityReport, ReportMeta, SweepPoint,
    SweepRecord, SWEEP_THETA_SAMPLES,
};
pub use grid::GridGeometry;
pub use states::{
    build_mub_tables, sample_state_on_grid, AmplitudePhase, AzimuthalProfile, Member, MubTable,
    OamIndex, StateLabel, SuperpositionState,
};

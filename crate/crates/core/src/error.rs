//! Error type shared by all modules of the crate.

use thiserror::Error;

use crate::field::PlaneTag;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),

    #[error("operands live on different grid geometries")]
    GeometryMismatch,

    #[error("state coefficients are not normalized: sum |c|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("state coefficient count {coefficients} does not match index count {indices}")]
    CoefficientCount { coefficients: usize, indices: usize },

    #[error("Bessel order {order} is outside the supported set {{0, 1}}")]
    BesselOrder { order: u32 },

    #[error("argument {x} is outside the validated Bessel domain |x| <= {limit}")]
    BesselDomain { x: f64, limit: f64 },

    #[error("sigma' = {sigma_prime} is outside the monotonic J1 domain (0, {limit}]")]
    SigmaPrimeRange { sigma_prime: f64, limit: f64 },

    #[error("sigma = {sigma} must be finite and non-negative")]
    SigmaRange { sigma: f64 },

    #[error("inversion target {target} is outside [0, J1(sigma')] = [0, {max}]")]
    InvertTargetRange { target: f64, max: f64 },

    #[error("amplitude grid is identically zero inside the aperture")]
    ZeroAmplitude,

    #[error("amplitude grid contains a negative sample ({value})")]
    NegativeAmplitude { value: f64 },

    #[error("reference amplitude {reference} does not match the grid maximum {grid_max}")]
    ReferenceAmplitudeMismatch { reference: f64, grid_max: f64 },

    #[error("reference wave is invalid: {0}")]
    InvalidReference(String),

    #[error("expected a field in the {expected:?} plane, got {actual:?}")]
    PlaneMismatch { expected: PlaneTag, actual: PlaneTag },

    #[error("isolation window rows [{start}, {end}) fall outside the grid (0, {rows})")]
    WindowOutOfBounds { start: i64, end: i64, rows: usize },

    #[error("zero-norm field in inner product")]
    ZeroNorm,

    #[error("sweep axis values must be strictly increasing")]
    AxisNotIncreasing,

    #[error("unknown state label `{0}` (expected one of a0..c3)")]
    UnknownState(String),

    #[error("malformed CSV grid: {0}")]
    CsvFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

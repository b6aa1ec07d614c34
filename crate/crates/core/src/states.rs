//! Mutually unbiased bases of orbital-angular-momentum states in d = 3.
//!
//! The pure basis assigns quantum numbers l = 1, 0, -1 to the kets |a>, |b>,
//! |c>; the remaining three bases are the standard complex-phase
//! superpositions built from z = exp(i 2pi/3). A state's azimuthal
//! wavefunction is `sum_k c_k exp(i l_k theta)`; amplitude and phase follow
//! the stored-value convention `value = A exp(i Phi)` with Phi the
//! full-quadrant argument of the wavefunction.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::GridGeometry;

/// Tolerance on `sum |c_k|^2 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Below this modulus the phase of a wavefunction value is undefined
/// (phase singularity) and reported as zero.
pub const PHASE_SINGULARITY_EPS: f64 = 1e-12;

/// Integer angular-momentum quantum number; the photon carries l * hbar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OamIndex(pub i32);

impl fmt::Display for OamIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// OAM indices of the three pure states |a>, |b>, |c|.
pub const CORE_OAM_INDICES: [OamIndex; 3] = [OamIndex(1), OamIndex(0), OamIndex(-1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Member {
    A,
    B,
    C,
}

impl Member {
    pub const ALL: [Member; 3] = [Member::A, Member::B, Member::C];

    pub fn index(self) -> usize {
        match self {
            Member::A => 0,
            Member::B => 1,
            Member::C => 2,
        }
    }
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Member::A => 'a',
            Member::B => 'b',
            Member::C => 'c',
        };
        write!(f, "{c}")
    }
}

/// Identifies one of the twelve MUB states, e.g. "c3".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateLabel {
    pub basis: u8,
    pub member: Member,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.member, self.basis)
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let member = match chars.next() {
            Some('a') => Member::A,
            Some('b') => Member::B,
            Some('c') => Member::C,
            _ => return Err(Error::UnknownState(s.to_string())),
        };
        let basis: u8 = chars
            .as_str()
            .parse()
            .map_err(|_| Error::UnknownState(s.to_string()))?;
        if basis > 3 {
            return Err(Error::UnknownState(s.to_string()));
        }
        Ok(StateLabel { basis, member })
    }
}

/// Amplitude/phase decomposition of a wavefunction value.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudePhase {
    pub amplitude: f64,
    pub phase: f64,
    /// False at phase singularities (amplitude below [`PHASE_SINGULARITY_EPS`]).
    pub phase_defined: bool,
}

/// One member of a MUB: complex coefficients over the OAM indices.
#[derive(Debug, Clone)]
pub struct SuperpositionState {
    indices: Vec<OamIndex>,
    coefficients: Vec<Complex64>,
    label: StateLabel,
}

impl SuperpositionState {
    pub fn new(
        indices: Vec<OamIndex>,
        coefficients: Vec<Complex64>,
        label: StateLabel,
    ) -> Result<Self> {
        if indices.len() != coefficients.len() {
            return Err(Error::CoefficientCount {
                coefficients: coefficients.len(),
                indices: indices.len(),
            });
        }
        let norm_sq: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self {
            indices,
            coefficients,
            label,
        })
    }

    /// Pure state |l> for one of the core OAM indices.
    pub fn pure(l: OamIndex) -> Result<Self> {
        let member = match l.0 {
            1 => Member::A,
            0 => Member::B,
            -1 => Member::C,
            _ => return Err(Error::UnknownState(format!("|{l}> is not a core state"))),
        };
        let mut coefficients = vec![Complex64::new(0.0, 0.0); 3];
        coefficients[member.index()] = Complex64::new(1.0, 0.0);
        Self::new(
            CORE_OAM_INDICES.to_vec(),
            coefficients,
            StateLabel { basis: 0, member },
        )
    }

    pub fn label(&self) -> StateLabel {
        self.label
    }

    pub fn indices(&self) -> &[OamIndex] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Wavefunction value `sum_k c_k exp(i l_k theta)`.
    pub fn eval_wavefunction(&self, theta: f64) -> Complex64 {
        self.indices
            .iter()
            .zip(&self.coefficients)
            .map(|(l, c)| c * Complex64::cis(l.0 as f64 * theta))
            .sum()
    }

    /// Amplitude and full-quadrant phase of the wavefunction at `theta`.
    pub fn amplitude_phase(&self, theta: f64) -> AmplitudePhase {
        let value = self.eval_wavefunction(theta);
        let amplitude = value.norm();
        if amplitude < PHASE_SINGULARITY_EPS {
            AmplitudePhase {
                amplitude,
                phase: 0.0,
                phase_defined: false,
            }
        } else {
            AmplitudePhase {
                amplitude,
                phase: value.arg(),
                phase_defined: true,
            }
        }
    }

    /// Coefficient-space inner product <self|other>.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.indices, other.indices);
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// CSV row: basis_id, member_id, then re/im of each coefficient in
    /// descending OAM-index order.
    pub fn csv_row(&self) -> String {
        let mut row = format!("{},{}", self.label.basis, self.label.member);
        for c in &self.coefficients {
            row.push_str(&format!(",{},{}", c.re, c.im));
        }
        row
    }
}

/// The four mutually unbiased bases of the 3-dimensional OAM space.
#[derive(Debug, Clone)]
pub struct MubTable {
    bases: Vec<Vec<SuperpositionState>>,
    root_of_unity: Complex64,
}

/// Builds all four bases. The nine superposition states carry the 1/sqrt(3)
/// normalization that the symbolic table leaves implicit.
pub fn build_mub_tables() -> MubTable {
    // z and z^2 are exact complex conjugates so that conjugate-paired states
    // in bases 2 and 3 stay bitwise symmetric.
    let im = 3.0_f64.sqrt() / 2.0;
    let z = Complex64::new(-0.5, im);
    let z2 = z.conj();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let inv_sqrt3 = 1.0 / 3.0_f64.sqrt();

    let rows: [[[Complex64; 3]; 3]; 4] = [
        [[one, zero, zero], [zero, one, zero], [zero, zero, one]],
        [[one, one, one], [one, z, z2], [one, z2, z]],
        [[one, one, z], [one, z, one], [one, z2, z2]],
        [[one, one, z2], [one, z, z], [one, z2, one]],
    ];

    let mut bases = Vec::with_capacity(4);
    for (basis, members) in rows.iter().enumerate() {
        let mut states = Vec::with_capacity(3);
        for (member, coeffs) in Member::ALL.iter().zip(members) {
            let scale = if basis == 0 { 1.0 } else { inv_sqrt3 };
            let coefficients: Vec<Complex64> = coeffs.iter().map(|c| c * scale).collect();
            let state = SuperpositionState::new(
                CORE_OAM_INDICES.to_vec(),
                coefficients,
                StateLabel {
                    basis: basis as u8,
                    member: *member,
                },
            )
            .expect("table states are normalized by construction");
            states.push(state);
        }
        bases.push(states);
    }

    MubTable {
        bases,
        root_of_unity: z,
    }
}

impl MubTable {
    pub fn root_of_unity(&self) -> Complex64 {
        self.root_of_unity
    }

    pub fn state(&self, basis: u8, member: Member) -> &SuperpositionState {
        &self.bases[basis as usize][member.index()]
    }

    pub fn by_label(&self, label: StateLabel) -> &SuperpositionState {
        self.state(label.basis, label.member)
    }

    pub fn all_states(&self) -> impl Iterator<Item = &SuperpositionState> {
        self.bases.iter().flatten()
    }

    pub fn basis(&self, basis: u8) -> &[SuperpositionState] {
        &self.bases[basis as usize]
    }
}

/// Samples a state's wavefunction over the aperture of `grid`; samples
/// outside the aperture are zero. Rows are independent, so the loop may be
/// parallelized without changing any bit of the result.
pub fn sample_state_on_grid(state: &SuperpositionState, grid: &GridGeometry) -> ComplexField {
    ComplexField::from_pupil_fn(*grid, |_x, _y, theta| state.eval_wavefunction(theta))
}

/// Uniform ring of `n` azimuthal samples of a state's amplitude and phase.
#[derive(Debug, Clone)]
pub struct AzimuthalProfile {
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    defined: Vec<bool>,
}

impl AzimuthalProfile {
    pub fn sample(state: &SuperpositionState, n: usize) -> Self {
        assert!(n >= 16, "azimuthal profile needs a sensible resolution");
        let mut amplitude = Vec::with_capacity(n);
        let mut phase = Vec::with_capacity(n);
        let mut defined = Vec::with_capacity(n);
        for k in 0..n {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let ap = state.amplitude_phase(theta);
            amplitude.push(ap.amplitude);
            phase.push(ap.phase);
            defined.push(ap.phase_defined);
        }
        Self {
            amplitude,
            phase,
            defined,
        }
    }

    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn phase_defined(&self) -> &[bool] {
        &self.defined
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitude.iter().copied().fold(0.0, f64::max)
    }

    /// Reconstructs the complex wavefunction sample at ring position `k`.
    pub fn value(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.amplitude[k], self.phase[k])
    }
}

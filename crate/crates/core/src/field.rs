//! Complex and real sample grids.
//!
//! [`ComplexField`] is a rows x cols array of complex samples tagged with the
//! optical plane it lives in; [`ScalarField`] is its real counterpart used
//! for amplitude maps, phase maps, hologram functions and interferograms.
//! Values are stored row-major.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridGeometry;

/// Optical plane a [`ComplexField`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneTag {
    Pupil,
    FarField,
}

#[derive(Debug, Clone)]
pub struct ComplexField {
    values: Vec<Complex64>,
    geometry: GridGeometry,
    plane: PlaneTag,
}

impl ComplexField {
    pub fn zeros(geometry: GridGeometry, plane: PlaneTag) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); geometry.len()],
            geometry,
            plane,
        }
    }

    /// Builds a field from row-major values.
    pub fn new(values: Vec<Complex64>, geometry: GridGeometry, plane: PlaneTag) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::GeometryMismatch);
        }
        Ok(Self {
            values,
            geometry,
            plane,
        })
    }

    /// Builds a pupil-plane field from a per-sample function of `(x, y, theta)`.
    /// Samples outside the aperture are zero.
    pub fn from_pupil_fn<F>(geometry: GridGeometry, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> Complex64,
    {
        let mut field = Self::zeros(geometry, PlaneTag::Pupil);
        for row in 0..geometry.rows() {
            for col in 0..geometry.cols() {
                if geometry.in_aperture(row, col) {
                    let (x, y) = geometry.xy(row, col);
                    let theta = geometry.theta(row, col);
                    field.values[geometry.index(row, col)] = f(x, y, theta);
                }
            }
        }
        field
    }

    pub(crate) fn from_values(
        values: Vec<Complex64>,
        geometry: GridGeometry,
        plane: PlaneTag,
    ) -> Self {
        debug_assert_eq!(values.len(), geometry.len());
        Self {
            values,
            geometry,
            plane,
        }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn plane(&self) -> PlaneTag {
        self.plane
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[self.geometry.index(row, col)]
    }

    /// Sum of |v|^2 over every sample of the grid.
    pub fn total_power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Samplewise modulus as a scalar grid.
    pub fn amplitude(&self) -> ScalarField {
        ScalarField {
            values: self.values.iter().map(|v| v.norm()).collect(),
            geometry: self.geometry,
        }
    }

    /// Samplewise full-quadrant argument in (-pi, pi].
    pub fn phase(&self) -> ScalarField {
        ScalarField {
            values: self.values.iter().map(|v| v.arg()).collect(),
            geometry: self.geometry,
        }
    }

    /// Checks that this field and `other` share a geometry.
    pub fn check_same_geometry(&self, other: &Self) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch);
        }
        Ok(())
    }

    pub fn expect_plane(&self, expected: PlaneTag) -> Result<()> {
        if self.plane != expected {
            return Err(Error::PlaneMismatch {
                expected,
                actual: self.plane,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    values: Vec<f64>,
    geometry: GridGeometry,
}

impl ScalarField {
    pub fn zeros(geometry: GridGeometry) -> Self {
        Self {
            values: vec![0.0; geometry.len()],
            geometry,
        }
    }

    /// Builds a grid from row-major values.
    pub fn new(values: Vec<f64>, geometry: GridGeometry) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::GeometryMismatch);
        }
        Ok(Self { values, geometry })
    }

    pub fn constant(geometry: GridGeometry, value: f64) -> Self {
        Self {
            values: vec![value; geometry.len()],
            geometry,
        }
    }

    pub fn from_fn<F>(geometry: GridGeometry, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut values = Vec::with_capacity(geometry.len());
        for row in 0..geometry.rows() {
            for col in 0..geometry.cols() {
                let (x, y) = geometry.xy(row, col);
                values.push(f(x, y));
            }
        }
        Self { values, geometry }
    }

    pub(crate) fn from_values(values: Vec<f64>, geometry: GridGeometry) -> Self {
        debug_assert_eq!(values.len(), geometry.len());
        Self { values, geometry }
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.geometry.index(row, col)]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_same_geometry(&self, other: &Self) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pupil_fn_masks_outside_aperture() {
        let g = GridGeometry::new(96, 96, 64).unwrap();
        let f = ComplexField::from_pupil_fn(g, |_, _, _| Complex64::new(1.0, 0.0));
        let (cr, cc) = g.center();
        assert_eq!(f.get(cr, cc), Complex64::new(1.0, 0.0));
        assert_eq!(f.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn amplitude_and_phase_extraction() {
        let g = GridGeometry::new(96, 96, 64).unwrap();
        let f = ComplexField::from_pupil_fn(g, |_, _, _| Complex64::new(0.0, 2.0));
        let (cr, cc) = g.center();
        assert!((f.amplitude().get(cr, cc) - 2.0).abs() < 1e-15);
        assert!((f.phase().get(cr, cc) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn plane_checks() {
        let g = GridGeometry::new(96, 96, 64).unwrap();
        let f = ComplexField::zeros(g, PlaneTag::Pupil);
        assert!(f.expect_plane(PlaneTag::Pupil).is_ok());
        assert!(matches!(
            f.expect_plane(PlaneTag::FarField),
            Err(Error::PlaneMismatch { .. })
        ));
    }
}

//! Sampling geometry for pupil-plane fields.
//!
//! A [`GridGeometry`] describes a rows x cols Cartesian sample array with a
//! circular aperture of a given diameter (in samples) centered on the grid.
//! The azimuth convention is theta = 0 along +x (increasing column index),
//! increasing counterclockwise toward +y (increasing row index); the origin
//! sits at the center sample `(rows / 2, cols / 2)`.

use crate::error::{Error, Result};

/// Smallest aperture that still resolves the diffraction-order structure.
pub const MIN_APERTURE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridGeometry {
    rows: usize,
    cols: usize,
    aperture_diameter: usize,
    center: (usize, usize),
}

impl GridGeometry {
    /// Geometry with the aperture centered at `(rows / 2, cols / 2)`.
    pub fn new(rows: usize, cols: usize, aperture_diameter: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGeometry(format!(
                "grid must be non-empty, got {rows}x{cols}"
            )));
        }
        if aperture_diameter < MIN_APERTURE_SAMPLES {
            return Err(Error::InvalidGeometry(format!(
                "aperture diameter must be at least {MIN_APERTURE_SAMPLES} samples, got {aperture_diameter}"
            )));
        }
        if aperture_diameter > rows || aperture_diameter > cols {
            return Err(Error::InvalidGeometry(format!(
                "aperture diameter {aperture_diameter} does not fit inside a {rows}x{cols} grid"
            )));
        }
        Ok(Self {
            rows,
            cols,
            aperture_diameter,
            center: (rows / 2, cols / 2),
        })
    }

    /// Geometry whose aperture diameter is a fraction of the shorter grid side.
    pub fn from_fraction(rows: usize, cols: usize, aperture_fraction: f64) -> Result<Self> {
        if !(aperture_fraction.is_finite() && aperture_fraction > 0.0 && aperture_fraction <= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "aperture fraction must lie in (0, 1], got {aperture_fraction}"
            )));
        }
        let diameter = (aperture_fraction * rows.min(cols) as f64).round() as usize;
        Self::new(rows, cols, diameter)
    }

    /// The XGA layout used throughout: 768x1024 with the aperture covering
    /// 90% of the short side (691 samples).
    pub fn xga_default() -> Self {
        Self::new(768, 1024, 691).expect("default geometry is valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn aperture_diameter(&self) -> usize {
        self.aperture_diameter
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_diameter as f64 / 2.0
    }

    pub fn center(&self) -> (usize, usize) {
        self.center
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols);
        row * self.cols + col
    }

    /// Cartesian offsets of a sample from the grid center, in samples.
    #[inline]
    pub fn xy(&self, row: usize, col: usize) -> (f64, f64) {
        (
            col as f64 - self.center.1 as f64,
            row as f64 - self.center.0 as f64,
        )
    }

    #[inline]
    pub fn radius(&self, row: usize, col: usize) -> f64 {
        let (x, y) = self.xy(row, col);
        (x * x + y * y).sqrt()
    }

    #[inline]
    pub fn theta(&self, row: usize, col: usize) -> f64 {
        let (x, y) = self.xy(row, col);
        y.atan2(x)
    }

    #[inline]
    pub fn in_aperture(&self, row: usize, col: usize) -> bool {
        let (x, y) = self.xy(row, col);
        let r = self.aperture_radius();
        x * x + y * y <= r * r
    }
}

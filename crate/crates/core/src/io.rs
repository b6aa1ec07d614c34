//! File exchange: 8-bit binary PGM images and plain CSV grids.
//!
//! Amplitude images are normalized to their maximum; phase images map
//! [-pi, pi] linearly onto [0, 255]; hologram maps are scaled by their phase
//! range sigma. Complex grids serialize as interleaved re,im columns and
//! real grids as one value per column. All numeric formatting is the shortest
//! round-trip form, so identical data produces byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::cgh::HologramFunction;
use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField};
use crate::fidelity::SweepRecord;
use crate::grid::GridGeometry;
use crate::states::MubTable;

/// Writes an 8-bit binary (P5) PGM image.
pub fn write_pgm(path: &Path, cols: usize, rows: usize, pixels: &[u8]) -> Result<()> {
    debug_assert_eq!(pixels.len(), rows * cols);
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{cols} {rows}\n255\n")?;
    out.write_all(pixels)?;
    Ok(())
}

fn quantize(values: impl Iterator<Item = f64>, scale: f64) -> Vec<u8> {
    values
        .map(|v| (255.0 * v * scale).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Grayscale pixels of a scalar grid normalized to its maximum.
pub fn scalar_pixels_normalized(field: &ScalarField) -> Vec<u8> {
    let max = field.max_value();
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    quantize(field.values().iter().copied(), scale)
}

/// Amplitude pixels of a complex field, normalized to the peak amplitude.
pub fn amplitude_pixels(field: &ComplexField) -> Vec<u8> {
    scalar_pixels_normalized(&field.amplitude())
}

/// Amplitude pixels under a power-law display stretch `amplitude^gamma`,
/// used for far-field images where the orders span decades.
pub fn amplitude_pixels_gamma(field: &ComplexField, gamma: f64) -> Vec<u8> {
    let amp = field.amplitude();
    let max = amp.max_value();
    if max <= 0.0 {
        return vec![0; amp.values().len()];
    }
    quantize(amp.values().iter().map(|v| (v / max).powf(gamma)), 1.0)
}

/// Phase pixels: [-pi, pi] maps linearly onto [0, 255].
pub fn phase_pixels(field: &ComplexField) -> Vec<u8> {
    let two_pi = 2.0 * std::f64::consts::PI;
    field
        .phase()
        .values()
        .iter()
        .map(|&p| {
            (255.0 * (p + std::f64::consts::PI) / two_pi)
                .round()
                .clamp(0.0, 255.0) as u8
        })
        .collect()
}

/// Hologram map pixels, `round(255 f / sigma)`.
pub fn hologram_pixels(hologram: &HologramFunction) -> Vec<u8> {
    let sigma = hologram.sigma();
    let scale = if sigma > 0.0 { 1.0 / sigma } else { 0.0 };
    quantize(hologram.map().values().iter().copied(), scale)
}

/// Writes a real grid as CSV, one row per grid row.
pub fn write_scalar_csv(path: &Path, field: &ScalarField) -> Result<()> {
    let g = field.geometry();
    let mut out = BufWriter::new(File::create(path)?);
    for row in 0..g.rows() {
        let mut line = String::new();
        for col in 0..g.cols() {
            if col > 0 {
                line.push(',');
            }
            line.push_str(&format!("{}", field.get(row, col)));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads a real grid (e.g. a wavefront-error map in waves) against an
/// expected geometry.
pub fn read_scalar_csv(path: &Path, geometry: GridGeometry) -> Result<ScalarField> {
    let reader = BufReader::new(File::open(path)?);
    let mut values = Vec::with_capacity(geometry.len());
    let mut rows = 0usize;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = 0usize;
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::CsvFormat(format!("bad number `{cell}`")))?;
            values.push(v);
            cols += 1;
        }
        if cols != geometry.cols() {
            return Err(Error::CsvFormat(format!(
                "row {rows} has {cols} columns, expected {}",
                geometry.cols()
            )));
        }
        rows += 1;
    }
    if rows != geometry.rows() {
        return Err(Error::CsvFormat(format!(
            "grid has {rows} rows, expected {}",
            geometry.rows()
        )));
    }
    Ok(ScalarField::from_values(values, geometry))
}

/// Writes a complex grid as CSV with interleaved re,im columns.
pub fn write_complex_csv(path: &Path, field: &ComplexField) -> Result<()> {
    let g = field.geometry();
    let mut out = BufWriter::new(File::create(path)?);
    for row in 0..g.rows() {
        let mut line = String::new();
        for col in 0..g.cols() {
            if col > 0 {
                line.push(',');
            }
            let v = field.get(row, col);
            line.push_str(&format!("{},{}", v.re, v.im));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Writes the twelve MUB states, one CSV row each:
/// `basis_id,member_id,re(c1),im(c1),re(c0),im(c0),re(c-1),im(c-1)`.
pub fn write_states_csv(path: &Path, table: &MubTable) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "basis_id,member_id,re_c1,im_c1,re_c0,im_c0,re_cm1,im_cm1"
    )?;
    for state in table.all_states() {
        writeln!(out, "{}", state.csv_row())?;
    }
    Ok(())
}

/// Writes sweep records under the fixed schema
/// `axis_value,basis_id,member_id,P,precondition_flag,grid_rows,grid_cols,tilt_waves`.
/// `fixed_tilt` supplies the tilt column for sweeps whose axis is not the
/// tilt itself; when absent the axis value is the tilt.
pub fn write_sweep_csv(
    path: &Path,
    records: &[SweepRecord],
    grid_rows: usize,
    grid_cols: usize,
    fixed_tilt: Option<f64>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "axis_value,basis_id,member_id,P,precondition_flag,grid_rows,grid_cols,tilt_waves"
    )?;
    for record in records {
        for point in &record.points {
            let tilt = fixed_tilt.unwrap_or(record.axis_value);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                record.axis_value,
                point.label.basis,
                point.label.member,
                point.probability,
                point.precondition,
                grid_rows,
                grid_cols,
                tilt
            )?;
        }
    }
    Ok(())
}

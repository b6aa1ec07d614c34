//! Centered, unitary 2-D discrete Fourier transforms.
//!
//! Both the spatial origin and the zero-frequency bin sit at the grid center
//! sample `(rows / 2, cols / 2)`; forward and inverse transforms carry the
//! symmetric `1 / sqrt(rows * cols)` normalization so Parseval holds exactly.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Circularly shifts `values` so that `out[i] = in[(i - shift) mod rows]`
/// along the row axis (numpy `roll` semantics).
pub(crate) fn roll_rows(values: &[Complex64], rows: usize, cols: usize, shift: i64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for row in 0..rows {
        let src = (row as i64 - shift).rem_euclid(rows as i64) as usize;
        out[row * cols..(row + 1) * cols].copy_from_slice(&values[src * cols..(src + 1) * cols]);
    }
    out
}

fn roll_cols(values: &[Complex64], rows: usize, cols: usize, shift: i64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for row in 0..rows {
        for col in 0..cols {
            let src = (col as i64 - shift).rem_euclid(cols as i64) as usize;
            out[row * cols + col] = values[row * cols + src];
        }
    }
    out
}

/// Moves the grid-center sample to index (0, 0) ahead of an FFT.
fn shift_center_to_origin(values: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let tmp = roll_rows(values, rows, cols, -((rows / 2) as i64));
    roll_cols(&tmp, rows, cols, -((cols / 2) as i64))
}

/// Moves index (0, 0) back to the grid-center sample after an FFT.
fn shift_origin_to_center(values: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let tmp = roll_rows(values, rows, cols, (rows / 2) as i64);
    roll_cols(&tmp, rows, cols, (cols / 2) as i64)
}

fn transpose(values: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for row in 0..rows {
        for col in 0..cols {
            out[col * rows + row] = values[row * cols + col];
        }
    }
    out
}

/// Centered unitary 2-D DFT; `inverse` selects the inverse transform.
pub(crate) fn fft2_centered_unitary(
    values: &[Complex64],
    rows: usize,
    cols: usize,
    inverse: bool,
) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), rows * cols);
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(cols)
    } else {
        planner.plan_fft_forward(cols)
    };
    let col_fft = if inverse {
        planner.plan_fft_inverse(rows)
    } else {
        planner.plan_fft_forward(rows)
    };

    let mut buf = shift_center_to_origin(values, rows, cols);
    row_fft.process(&mut buf);
    let mut buf = transpose(&buf, rows, cols);
    col_fft.process(&mut buf);
    let buf = transpose(&buf, cols, rows);
    let mut out = shift_origin_to_center(&buf, rows, cols);

    let norm = 1.0 / ((rows * cols) as f64).sqrt();
    for v in &mut out {
        *v *= norm;
    }
    out
}

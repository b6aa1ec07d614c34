//! Bessel functions of the first kind for small integer orders.
//!
//! The CGH analysis only ever evaluates J_m at |x| <= sigma' <= 3.83 plus
//! headroom, so the evaluator is validated for |x| <= 20. Below the series
//! limit the ascending power series converges without cancellation trouble;
//! above it a downward Miller recurrence normalized by
//! `J_0 + 2 (J_2 + J_4 + ...) = 1` keeps full accuracy.

use crate::error::{Error, Result};

/// Largest argument at which J1 is still monotonically increasing.
pub const J1_MONOTONIC_LIMIT: f64 = 1.8412;

/// Validated evaluation domain for [`bessel_j`].
pub const BESSEL_DOMAIN_LIMIT: f64 = 20.0;

const SERIES_LIMIT: f64 = 12.0;

/// J0 or J1 at `x`, accurate to better than 1e-10 over |x| <= 20.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > 1 {
        return Err(Error::BesselOrder { order });
    }
    if !x.is_finite() || x.abs() > BESSEL_DOMAIN_LIMIT {
        return Err(Error::BesselDomain {
            x,
            limit: BESSEL_DOMAIN_LIMIT,
        });
    }
    Ok(bessel_jn(order, x))
}

/// J_n for non-negative integer order. Callers guarantee a sane domain;
/// accuracy is validated for |x| <= 20 with orders up to ~40.
pub(crate) fn bessel_jn(n: u32, x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= SERIES_LIMIT {
        series(n, ax)
    } else {
        miller(n, ax)
    };
    if x < 0.0 && n % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Ascending power series; safe from cancellation for |x| <= 12.
fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0_f64;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    for k in 1..200u32 {
        term *= -q / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() < 1e-17 * (1.0 + sum.abs()) && k as f64 > half {
            break;
        }
    }
    sum
}

/// Downward recurrence from an order well past the turning point.
fn miller(n: u32, x: f64) -> f64 {
    let mut m = (1.5 * x) as usize + n as usize + 40;
    m += m & 1; // even start so the normalization sum sees every even order
    let mut above = 0.0_f64; // J_{m+1}
    let mut current = 1e-30_f64; // J_m, arbitrary seed
    let mut captured = 0.0_f64;
    let mut norm = 0.0_f64;
    loop {
        if m == n as usize {
            captured = current;
        }
        if m.is_multiple_of(2) {
            norm += if m == 0 { current } else { 2.0 * current };
        }
        if m == 0 {
            break;
        }
        let below = (2.0 * m as f64 / x) * current - above;
        above = current;
        current = below;
        m -= 1;
        if current.abs() > 1e250 {
            current /= 1e250;
            above /= 1e250;
            norm /= 1e250;
            captured /= 1e250;
        }
    }
    captured / norm
}

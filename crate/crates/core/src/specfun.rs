//! Real complementary error function and Dawson's integral.
//!
//! Together they give `Erfc(ix)` for real `x`, which enters the closed-form
//! vacuum correlation term: `e^{-x²} Erfc(ix) = e^{-x²} - (2/√π) D(x) i`.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::{Error, Result};

/// Accuracy policy shared by the series and continued-fraction loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunAccuracy {
    pub target_abs_err: f64,
    pub max_terms: usize,
}

/// The policy every function in this module is built to.
pub const ACCURACY: SpecFunAccuracy = SpecFunAccuracy {
    target_abs_err: 1e-12,
    max_terms: 4000,
};

const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// Below this the positive power series is used, at and above it the
/// continued fraction.
const ERFC_SWITCH: f64 = 2.0;

/// Dawson's Maclaurin sum is evaluated for `|x| <= DAWSON_SWITCH`, the
/// asymptotic series beyond.
const DAWSON_SWITCH: f64 = 6.0;

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("special function argument must be finite"))
    }
}

/// `erf(x)` for `|x| < 2` from `(2/√π) e^{-x²} Σ (2x²)^n x / (2n+1)!!`.
///
/// Every term is positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..ACCURACY.max_terms {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x)` for `x >= 2` from the Laplace continued fraction
/// `√π e^{x²} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..ACCURACY.max_terms {
        let a = n as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * PI.sqrt())
}

/// Complementary error function.
///
/// Accurate to `1e-12` absolute on `|x| <= 27`; `erfc(-x) = 2 - erfc(x)` holds
/// by construction.
pub fn erfc(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(erfc_unchecked(x))
}

pub(crate) fn erfc_unchecked(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_unchecked(-x)
    } else if x < ERFC_SWITCH {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Dawson's integral `D(x) = e^{-x²} ∫₀ˣ e^{t²} dt`.
pub fn dawson(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(dawson_unchecked(x))
}

pub(crate) fn dawson_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= DAWSON_SWITCH {
        dawson_maclaurin(ax)
    } else {
        dawson_asymptotic(ax)
    };
    value.copysign(x)
}

// e^{-x²} Σ x^{2n+1} / (n! (2n+1)): the integral of the exponential series,
// all terms positive.
fn dawson_maclaurin(x: f64) -> f64 {
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    for n in 1..ACCURACY.max_terms {
        power *= x2 / n as f64;
        let term = power / (2 * n + 1) as f64;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    (-x2).exp() * sum
}

// (1/2x) Σ (2n-1)!! / (2x²)^n, truncated at the smallest term.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..ACCURACY.max_terms {
        let next = term * (2 * n - 1) as f64 * inv;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * x)
}

/// `e^{-x²} Erfc(ix) = e^{-x²} - (2/√π) D(x) i`.
///
/// Bounded for every real `x`, unlike `Erfc(ix)` itself.
pub fn erfc_imag_scaled(x: f64) -> Result<Complex64> {
    check_finite(x)?;
    Ok(erfc_imag_scaled_unchecked(x))
}

pub(crate) fn erfc_imag_scaled_unchecked(x: f64) -> Complex64 {
    Complex64::new((-x * x).exp(), -FRAC_2_SQRT_PI * dawson_unchecked(x))
}

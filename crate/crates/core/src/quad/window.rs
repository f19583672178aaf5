//! Iterated two-dimensional quadrature over truncated Gaussian windows.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::gk::{Integrator, QuadResult, Tolerance};
use crate::specfun::erfc_unchecked;
use crate::{Error, Result};

/// Radius for windows `e^{-x²/4}`; the neglected tail mass is below 1e-21.
pub const RADIUS_QUARTER: f64 = 10.0 * core::f64::consts::SQRT_2;

/// Radius for windows `e^{-x²}`.
pub const RADIUS_UNIT: f64 = 10.0;

/// Which part of an axis the window covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extent {
    /// `[-R, R]`
    Full,
    /// `[0, R]`
    NonNegative,
}

impl Extent {
    fn bounds(self, radius: f64) -> (f64, f64) {
        match self {
            Extent::Full => (-radius, radius),
            Extent::NonNegative => (0.0, radius),
        }
    }
}

/// Truncation of a Gaussian-damped integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub truncation_radius: f64,
    pub tol: f64,
    pub outer: Extent,
    pub inner: Extent,
}

impl WindowSpec {
    /// Checks that `e^{-x²/width}` loses less than `tol` beyond the radius.
    pub fn new(truncation_radius: f64, tol: f64, width: f64) -> Result<Self> {
        if !(truncation_radius > 0.0 && tol > 0.0 && width > 0.0) {
            return Err(Error::Contract(
                "window radius, width and tolerance must be positive",
            ));
        }
        if tail_mass(truncation_radius, width) >= tol {
            return Err(Error::Contract(
                "window radius leaves a Gaussian tail above tol",
            ));
        }
        Ok(WindowSpec {
            truncation_radius,
            tol,
            outer: Extent::Full,
            inner: Extent::Full,
        })
    }

    /// Default window for `e^{-x²/4}` factors.
    pub fn quarter() -> Self {
        WindowSpec {
            truncation_radius: RADIUS_QUARTER,
            tol: 1e-21,
            outer: Extent::Full,
            inner: Extent::Full,
        }
    }

    /// Default window for `e^{-x²}` factors.
    pub fn unit() -> Self {
        WindowSpec {
            truncation_radius: RADIUS_UNIT,
            tol: 1e-21,
            outer: Extent::Full,
            inner: Extent::Full,
        }
    }

    pub fn with_extents(mut self, outer: Extent, inner: Extent) -> Self {
        self.outer = outer;
        self.inner = inner;
        self
    }
}

/// `∫_R^∞ e^{-x²/w} dx`.
pub fn tail_mass(radius: f64, width: f64) -> f64 {
    let s = width.sqrt();
    0.5 * (core::f64::consts::PI * width).sqrt() * erfc_unchecked(radius / s)
}

/// Outer integral whose integrand is itself a quadrature. Inner errors are
/// carried into the reported error as `(hi − lo) · max inner error`.
pub fn integrate_nested<F>(outer: &Integrator, mut inner: F, lo: f64, hi: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<QuadResult>,
{
    let mut worst_inner: f64 = 0.0;
    let mut inner_evals = 0usize;
    let mut r = outer.integrate_try(
        |x| {
            let q = inner(x)?;
            worst_inner = worst_inner.max(q.abs_err);
            inner_evals += q.evaluations;
            Ok(q.value)
        },
        lo,
        hi,
    )?;
    r.abs_err += (hi - lo) * worst_inner;
    r.evaluations += inner_evals;
    Ok(r)
}

/// `∬ f(x, y) dy dx` over the truncated window, `x` outer and `y` inner.
pub fn integrate_2d<F>(f: F, window: &WindowSpec, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Complex64,
{
    let (x0, x1) = window.outer.bounds(window.truncation_radius);
    let (y0, y1) = window.inner.bounds(window.truncation_radius);
    let inner_tol = 0.1 * tol / (x1 - x0);
    let inner = Integrator::new(Tolerance::absolute(inner_tol));
    let outer = Integrator::new(Tolerance::absolute(0.5 * tol));
    let mut r = integrate_nested(&outer, |x| inner.integrate(|y| f(x, y), y0, y1), x0, x1)?;
    r.abs_err += window.tol;
    Ok(r)
}

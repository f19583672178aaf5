//! Polynomial extrapolation of regulated integrals to `ε = 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Regulator values and the polynomial order used to remove them.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatorPolicy {
    pub eps_sequence: Vec<f64>,
    pub extrapolation_order: usize,
}

impl Default for RegulatorPolicy {
    fn default() -> Self {
        RegulatorPolicy {
            eps_sequence: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            extrapolation_order: 2,
        }
    }
}

impl RegulatorPolicy {
    pub fn new(eps_sequence: Vec<f64>, extrapolation_order: usize) -> Result<Self> {
        let p = RegulatorPolicy {
            eps_sequence,
            extrapolation_order,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_sequence(self.eps_sequence.iter().copied(), self.extrapolation_order)
    }
}

fn check_sequence(eps: impl Iterator<Item = f64> + Clone, order: usize) -> Result<()> {
    let n = eps.clone().count();
    if n < 2 || n < order + 1 {
        return Err(Error::Contract(
            "need at least max(2, order + 1) regulator samples",
        ));
    }
    if order == 0 {
        return Err(Error::Contract("extrapolation order must be at least 1"));
    }
    let mut prev = f64::INFINITY;
    for e in eps {
        if !(e > 0.0 && e.is_finite() && e < prev) {
            return Err(Error::Contract(
                "regulator values must be positive and strictly descending",
            ));
        }
        prev = e;
    }
    Ok(())
}

/// Extrapolated limit and the discrepancy used as its error proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub abs_err: f64,
}

/// Value at 0 of the interpolating polynomial through `points` (Neville).
fn neville_at_zero(points: &[(f64, Complex64)]) -> Complex64 {
    let mut p: Vec<Complex64> = points.iter().map(|&(_, v)| v).collect();
    let n = points.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// Fits a polynomial of degree `order` in ε through the last `order + 1`
/// samples and evaluates it at ε = 0.
///
/// The error proxy is the gap to the extrapolant one sample earlier, or to the
/// order − 1 extrapolant when no earlier sample exists.
pub fn extrapolate_eps(samples: &[(f64, Complex64)], order: usize) -> Result<Extrapolated> {
    check_sequence(samples.iter().map(|s| s.0), order)?;
    let n = samples.len();
    let last = &samples[n - order - 1..];
    let value = neville_at_zero(last);
    let other = if n > order + 1 {
        neville_at_zero(&samples[n - order - 2..n - 1])
    } else if order > 1 {
        neville_at_zero(&samples[n - order..])
    } else {
        samples[n - 1].1
    };
    Ok(Extrapolated {
        value,
        abs_err: (value - other).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn linear_model_exact_at_first_order() {
        let f = |e: f64| Complex64::new(0.7 + 3.0 * e, -0.2 - e);
        let r = extrapolate_eps(&[(0.1, f(0.1)), (0.05, f(0.05))], 1).unwrap();
        assert!((r.value - Complex64::new(0.7, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn quadratic_model_exact_at_second_order() {
        let f = |e: f64| c(1.25 - 4.0 * e * e);
        let s = [(0.1, f(0.1)), (0.05, f(0.05)), (0.025, f(0.025))];
        let r = extrapolate_eps(&s, 2).unwrap();
        assert!((r.value.re - 1.25).abs() < 1e-14);
    }

    #[test]
    fn arctangent_model() {
        let f = |e: f64| c((1.0 / e).atan() * 2.0 / core::f64::consts::PI);
        let s = [(0.04, f(0.04)), (0.02, f(0.02)), (0.01, f(0.01))];
        let r = extrapolate_eps(&s, 2).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-3);
        assert!(r.abs_err > 0.0);
    }

    #[test]
    fn default_policy_is_valid() {
        let p = RegulatorPolicy::default();
        p.validate().unwrap();
        assert_eq!(p.eps_sequence.len(), 4);
    }

    #[test]
    fn bad_sequences_are_rejected() {
        assert!(matches!(
            extrapolate_eps(&[(0.1, c(1.0))], 1),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            extrapolate_eps(&[(0.1, c(1.0)), (0.05, c(1.0))], 2),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            extrapolate_eps(&[(0.05, c(1.0)), (0.1, c(1.0))], 1),
            Err(Error::Contract(_))
        ));
        assert!(RegulatorPolicy::new(vec![1e-2, 1e-2, 1e-3], 2).is_err());
    }
}

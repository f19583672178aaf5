//! `∫ g(s) / (u(s) − iε) ds` in the limit `ε → 0⁺`, split as a principal value
//! plus `iπ Σ g(s*) / |u′(s*)|` over the simple zeros `s*` of `u`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::gk::{Integrator, QuadResult, Tolerance};
use crate::{Error, Result};

/// Slopes smaller than this make the residue meaningless.
pub const MIN_SLOPE: f64 = 1e-10;

/// Roots closer than this to an endpoint get the subtraction treatment.
pub const ENDPOINT_GAP: f64 = 1e-8;

/// Half-width of the neighbourhood around a near-endpoint root in which the
/// regularised integrand is frozen.
pub const EXCISION_RADIUS: f64 = 1e-6;

/// Real denominator with simple zeros.
pub trait Denominator {
    fn value(&self, s: f64) -> f64;

    /// `u′(s)`; the default is a five-point central difference.
    fn slope(&self, s: f64) -> f64 {
        let h = 1e-3 * s.abs().max(1.0);
        (self.value(s - 2.0 * h) - 8.0 * self.value(s - h) + 8.0 * self.value(s + h)
            - self.value(s + 2.0 * h))
            / (12.0 * h)
    }
}

/// A denominator known only through its values.
#[derive(Debug, Clone, Copy)]
pub struct Smooth<U>(pub U);

impl<U: Fn(f64) -> f64> Denominator for Smooth<U> {
    fn value(&self, s: f64) -> f64 {
        (self.0)(s)
    }
}

/// A denominator with an analytic derivative.
#[derive(Debug, Clone, Copy)]
pub struct WithSlope<U, D>(pub U, pub D);

impl<U: Fn(f64) -> f64, D: Fn(f64) -> f64> Denominator for WithSlope<U, D> {
    fn value(&self, s: f64) -> f64 {
        (self.0)(s)
    }

    fn slope(&self, s: f64) -> f64 {
        (self.1)(s)
    }
}

fn checked_roots<U: Denominator>(
    u: &U,
    roots: &[f64],
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Contract(
            "principal value range must be finite with a < b",
        ));
    }
    let mut sorted: Vec<f64> = roots.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(sorted.len());
    for (i, &r) in sorted.iter().enumerate() {
        if !(a < r && r < b) {
            return Err(Error::Contract(
                "pole is not bracketed by the integration range",
            ));
        }
        if i > 0 && r - sorted[i - 1] <= 10.0 * tol {
            return Err(Error::Contract(
                "poles are not separated by more than 10 tol",
            ));
        }
        let slope = u.slope(r);
        if !(slope.abs() >= MIN_SLOPE) {
            return Err(Error::Degenerate { root: r, slope });
        }
        out.push((r, slope));
    }
    Ok(out)
}

/// `iπ Σ g(s*) / |u′(s*)|`.
pub fn delta_sum<G, U>(mut g: G, u: &U, roots: &[f64], a: f64, b: f64) -> Result<Complex64>
where
    G: FnMut(f64) -> Complex64,
    U: Denominator,
{
    let roots = checked_roots(u, roots, a, b, 0.0)?;
    Ok(roots
        .iter()
        .map(|&(r, slope)| g(r) / slope.abs())
        .sum::<Complex64>()
        * Complex64::new(0.0, core::f64::consts::PI))
}

/// `g/u`, taken as zero where either `g` vanishes or `u` rounds to zero. The
/// roots themselves are never sampled, so an exact zero of `u` is rounding.
fn ratio<G: FnMut(f64) -> Complex64, U: Denominator>(g: &mut G, u: &U, s: f64) -> Complex64 {
    let v = g(s);
    if v == Complex64::new(0.0, 0.0) {
        return v;
    }
    let d = u.value(s);
    if d == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        v / d
    }
}

/// Principal value of `∫ₐᵇ g/u`, with `roots` the zeros of `u` inside `(a, b)`.
///
/// Interior roots are folded, `∫₀ʰ [G(r+t) + G(r−t)] dt`, which cancels the
/// pole pairwise. Roots hugging an endpoint have `c/(s − r)` subtracted and
/// its logarithm added back.
pub fn principal_value<G, U>(
    integrator: &Integrator,
    mut g: G,
    u: &U,
    roots: &[f64],
    a: f64,
    b: f64,
) -> Result<QuadResult>
where
    G: FnMut(f64) -> Complex64,
    U: Denominator,
{
    let roots = checked_roots(u, roots, a, b, integrator.tol.abs)?;
    if roots.is_empty() {
        return integrator.integrate(|s| ratio(&mut g, u, s), a, b);
    }
    // Each pole region, plus up to two outer pieces, shares the tolerance.
    let pieces = (3 * roots.len()) as f64;
    let part = Integrator {
        tol: Tolerance {
            abs: integrator.tol.abs / pieces,
            rel: integrator.tol.rel,
        },
        ..*integrator
    };

    let mut total = QuadResult {
        value: Complex64::new(0.0, 0.0),
        abs_err: 0.0,
        evaluations: 0,
    };
    for (i, &(r, slope)) in roots.iter().enumerate() {
        let left = if i == 0 {
            a
        } else {
            0.5 * (roots[i - 1].0 + r)
        };
        let right = if i + 1 == roots.len() {
            b
        } else {
            0.5 * (r + roots[i + 1].0)
        };
        let h = (r - left).min(right - r);
        if h >= ENDPOINT_GAP {
            let folded = part.integrate(
                |t| ratio(&mut g, u, r + t) + ratio(&mut g, u, r - t),
                0.0,
                h,
            )?;
            total = total.combine(folded);
            if r - h > left {
                total = total.combine(part.integrate(|s| ratio(&mut g, u, s), left, r - h)?);
            }
            if r + h < right {
                total = total.combine(part.integrate(|s| ratio(&mut g, u, s), r + h, right)?);
            }
        } else {
            let c = g(r) / slope;
            // Inside the excision radius use the value just off it on the
            // interior side; the neighbourhood is too small to matter.
            let inward = if r - left < right - r { 1.0 } else { -1.0 };
            let probe = r + inward * EXCISION_RADIUS;
            let frozen = ratio(&mut g, u, probe) - c / (probe - r);
            let regular = part.integrate_points(
                |s| {
                    if (s - r).abs() < EXCISION_RADIUS {
                        frozen
                    } else {
                        ratio(&mut g, u, s) - c / (s - r)
                    }
                },
                &[left, r, right],
            )?;
            let log = c * ((right - r) / (r - left)).ln();
            total = total.combine(regular);
            total.value += log;
            total.evaluations += 1;
        }
    }
    Ok(total)
}

/// `lim_{ε→0⁺} ∫ₐᵇ g(s) / (u(s) − iε) ds` to absolute tolerance `tol`.
pub fn integrate_pv_delta<G, U>(
    mut g: G,
    u: &U,
    u_roots: &[f64],
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult>
where
    G: FnMut(f64) -> Complex64,
    U: Denominator,
{
    let integrator = Integrator::new(Tolerance::absolute(tol));
    let mut pv = principal_value(&integrator, &mut g, u, u_roots, a, b)?;
    pv.value += delta_sum(&mut g, u, u_roots, a, b)?;
    pv.evaluations += u_roots.len();
    Ok(pv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    const EI2_MINUS_EI_NEG2: f64 = 5.003_134_866_709_951_282_95;

    fn one(_: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn constant_over_odd_pole() {
        let r = integrate_pv_delta(one, &Smooth(|s| s), &[0.0], -1.0, 1.0, 1e-12).unwrap();
        assert!(r.value.re.abs() < 1e-12);
        assert!((r.value.im - PI).abs() < 1e-12);
    }

    #[test]
    fn removable_pole() {
        let r = integrate_pv_delta(
            |s| Complex64::new(s, 0.0),
            &Smooth(|s| s),
            &[0.0],
            -1.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((r.value - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exponential_integral_pair() {
        let r = integrate_pv_delta(
            |s: f64| Complex64::new(s.exp(), 0.0),
            &WithSlope(|s| s, |_| 1.0),
            &[0.0],
            -2.0,
            2.0,
            1e-12,
        )
        .unwrap();
        assert!((r.value.re - EI2_MINUS_EI_NEG2).abs() < 1e-11);
        assert!((r.value.im - PI).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_and_multiple_roots() {
        // ∫₀³ ds / ((s−1)(s−2)) as a PV: ln|(s−2)/(s−1)| from 0 to 3 = −2 ln 2.
        let u = WithSlope(|s: f64| (s - 1.0) * (s - 2.0), |s: f64| 2.0 * s - 3.0);
        let integrator = Integrator::new(Tolerance::absolute(1e-12));
        let pv = principal_value(&integrator, one, &u, &[2.0, 1.0], 0.0, 3.0).unwrap();
        assert!(
            (pv.value.re + 2.0 * 2.0f64.ln()).abs() < 1e-10,
            "{}",
            pv.value
        );
        // Residues: 1/|−1| + 1/|1|.
        let d = delta_sum(one, &u, &[1.0, 2.0], 0.0, 3.0).unwrap();
        assert!((d - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-14);
    }

    #[test]
    fn root_hugging_an_endpoint() {
        // PV ∫_{−1}^{1} ds/(s − r) = ln((1 − r)/(1 + r)).
        let r0 = 1.0 - 3e-9;
        let integrator = Integrator::new(Tolerance::absolute(1e-10));
        let pv = principal_value(
            &integrator,
            one,
            &WithSlope(move |s| s - r0, |_| 1.0),
            &[r0],
            -1.0,
            1.0,
        )
        .unwrap();
        let exact = ((1.0 - r0) / (1.0 + r0)).ln();
        assert!(
            (pv.value.re - exact).abs() < 1e-8,
            "{} vs {exact}",
            pv.value.re
        );
    }

    #[test]
    fn contract_violations() {
        let u = Smooth(|s| s);
        assert!(matches!(
            integrate_pv_delta(one, &u, &[2.0], -1.0, 1.0, 1e-10),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            integrate_pv_delta(one, &Smooth(|s| s * s * s), &[0.0], -1.0, 1.0, 1e-10),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            integrate_pv_delta(
                one,
                &WithSlope(|s| s, |_| 1.0),
                &[0.0, 1e-12],
                -1.0,
                1.0,
                1e-10
            ),
            Err(Error::Contract(_))
        ));
    }
}

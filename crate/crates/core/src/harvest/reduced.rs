//! One- and two-dimensional reduced forms of the harvesting integrals for
//! the parallel accelerated, static thermal and static vacuum pairs.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::{check_separation, DetectorParams, EvalOptions, ReducedIntegrandParams};
use crate::quad::{
    delta_sum, integrate_nested, principal_value, Integrator, QuadResult, Tolerance, WithSlope,
    RADIUS_QUARTER,
};
use crate::specfun::{erfc_imag_scaled_unchecked, erfc_unchecked};
use crate::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Inertial vacuum response `λ²/(4π)[e^{-Ω²} − √π Ω erfc Ω]`.
pub fn p_vacuum(det: &DetectorParams) -> Result<f64> {
    det.validate()?;
    Ok(det.lambda2() * p0(det.gap))
}

fn p0(gap: f64) -> f64 {
    ((-gap * gap).exp() - SQRT_PI * gap * erfc_unchecked(gap)) / (4.0 * PI)
}

// 1/s² − 1/sinh² s, series below 1e-2.
fn excess(s: f64) -> f64 {
    if s < 1e-2 {
        let s2 = s * s;
        1.0 / 3.0 - s2 / 15.0 + 2.0 * s2 * s2 / 189.0
    } else {
        let sh = s.sinh();
        1.0 / (s * s) - 1.0 / (sh * sh)
    }
}

/// Response of one uniformly accelerated detector, which equals that of a
/// static detector in a bath at `T = a/2π`. `rate = 0` gives the inertial
/// vacuum response.
pub fn transition_probability(det: &DetectorParams, rate: f64) -> Result<f64> {
    transition_probability_with(det, rate, &EvalOptions::default()).map(|p| p.0)
}

/// As [`transition_probability`], returning `(P, abs_err)`.
pub fn transition_probability_with(
    det: &DetectorParams,
    rate: f64,
    opts: &EvalOptions,
) -> Result<(f64, f64)> {
    det.validate()?;
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Domain("rate must be finite and non-negative"));
    }
    let l2 = det.lambda2();
    let base = p0(det.gap);
    if rate == 0.0 {
        return Ok((l2 * base, 1e-15 * l2 * base));
    }
    let ReducedIntegrandParams { gamma, alpha } =
        ReducedIntegrandParams::from_acceleration(det, rate)?;
    let t_u = rate / (2.0 * PI);
    let pref = t_u / (2.0 * SQRT_PI);
    let tol = Tolerance {
        abs: 0.1 * opts.rel_tol * base / pref,
        rel: 0.1 * opts.rel_tol,
    };
    let upper = 10.0 / alpha.sqrt();
    let r = Integrator::new(tol).integrate(
        |s| Complex64::new((gamma * s).cos() * (-alpha * s * s).exp() * excess(s), 0.0),
        0.0,
        upper,
    )?;
    Ok((l2 * (pref * r.value.re + base), l2 * pref * r.abs_err))
}

/// Closed form for static detectors in the vacuum,
/// `−iλ² e^{-Ω²} e^{-L²/4} Erfc(iL/2) / (4√π L)`.
pub fn x_vacuum_static(det: &DetectorParams, l: f64) -> Result<Complex64> {
    det.validate()?;
    check_separation(l)?;
    Ok(x_vacuum_unit(det.gap, l) * det.lambda2())
}

pub(crate) fn x_vacuum_unit(gap: f64, l: f64) -> Complex64 {
    Complex64::new(0.0, -(-gap * gap).exp() / (4.0 * l * SQRT_PI))
        * erfc_imag_scaled_unchecked(0.5 * l)
}

/// Correlation term for static detectors in a bath at temperature `T`.
pub fn x_thermal(det: &DetectorParams, temperature: f64, l: f64) -> Result<Complex64> {
    x_thermal_with(det, temperature, l, &EvalOptions::default()).map(|r| r.value)
}

/// Evaluates
/// `−(λ² e^{-Ω²}/(4√π L)) ∫₀^∞ e^{-s²/4} T {coth πT(L+s) + cosh πT(L−s) / (sinh πT(L−s) − iε)} ds`.
/// The pole at `s = L` is split into a principal value plus `iπ e^{-L²/4}/π`.
pub fn x_thermal_with(
    det: &DetectorParams,
    temperature: f64,
    l: f64,
    opts: &EvalOptions,
) -> Result<QuadResult> {
    det.validate()?;
    check_separation(l)?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::Domain("temperature must be positive"));
    }
    let pt = PI * temperature;
    let reach = RADIUS_QUARTER.max(l + 1.0);
    let scale = erfc_imag_scaled_unchecked(0.5 * l).norm();
    let integrator = Integrator::new(Tolerance {
        abs: 0.05 * opts.rel_tol * scale,
        rel: 0.05 * opts.rel_tol,
    });

    let smooth = integrator.integrate(
        |s| {
            Complex64::new(
                (-0.25 * s * s).exp() * temperature / (pt * (l + s)).tanh(),
                0.0,
            )
        },
        0.0,
        reach,
    )?;

    // cosh x / (sinh x/πT) with both factors scaled by e^{-|x|} so nothing
    // overflows; x = πT(L − s).
    let g = |s: f64| {
        let x = pt * (l - s);
        Complex64::new(
            (-0.25 * s * s).exp() * 0.5 * (1.0 + (-2.0 * x.abs()).exp()),
            0.0,
        )
    };
    let u = WithSlope(
        |s: f64| {
            let x = pt * (l - s);
            (-(-2.0 * x.abs()).exp_m1()).copysign(x) / (2.0 * pt)
        },
        |s: f64| -(-2.0 * (pt * (l - s)).abs()).exp(),
    );
    let roots = [l];
    let pv = principal_value(&integrator, g, &u, &roots, 0.0, reach)?;
    let delta = delta_sum(g, &u, &roots, 0.0, reach)?;

    let pref = -det.lambda2() * (-det.gap * det.gap).exp() / (4.0 * SQRT_PI * l);
    let bracket = QuadResult {
        value: smooth.value + (pv.value + delta) / PI,
        abs_err: smooth.abs_err + pv.abs_err / PI,
        evaluations: smooth.evaluations + pv.evaluations,
    };
    Ok(bracket.scale(Complex64::new(pref, 0.0)))
}

/// Correlation term for the parallel accelerated pair.
pub fn x_accelerated(det: &DetectorParams, a: f64, l: f64) -> Result<Complex64> {
    x_accelerated_with(det, a, l, &EvalOptions::default()).map(|r| r.value)
}

/// Evaluates the double integral in the scaled variables `x̃, ỹ` with
/// `κ = a/2`, `S = sinh(κỹ)/κ`:
///
/// `X = −(λ²/(4π²)) ∫₀^∞ dx̃ e^{-x̃²/4} cos(Ωx̃) Σ_± ∫₀^∞ dỹ e^{-ỹ²/4} / (n_±(ỹ) − iε)`
///
/// with `n_±(ỹ) = (L − e^{∓κx̃} S)(L + e^{±κx̃} S)`. Each inner integral has one
/// simple zero, at `ỹ_± = asinh(κL e^{±κx̃})/κ`, taken as PV plus delta.
pub fn x_accelerated_with(
    det: &DetectorParams,
    a: f64,
    l: f64,
    opts: &EvalOptions,
) -> Result<QuadResult> {
    det.validate()?;
    check_separation(l)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain("acceleration must be positive"));
    }
    let kappa = 0.5 * a;
    let gap = det.gap;
    let outer_scale = 4.0 * PI * PI * x_vacuum_unit(gap, l).norm();
    let outer_abs = 0.5 * opts.rel_tol * outer_scale;
    let outer = Integrator::new(Tolerance::absolute(outer_abs));
    let inner = Integrator::new(Tolerance::absolute((0.05 * outer_abs).max(1e-17)));

    let inner_sum = |x: f64| -> Result<QuadResult> {
        let mut total = QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_err: 0.0,
            evaluations: 0,
        };
        for sign in [1.0, -1.0] {
            let (ep, em) = ((sign * kappa * x).exp(), (-sign * kappa * x).exp());
            let root = (kappa * l * ep).asinh() / kappa;
            let g = |y: f64| Complex64::new((-0.25 * y * y).exp(), 0.0);
            let u = WithSlope(
                move |y: f64| {
                    let s = (kappa * y).sinh() / kappa;
                    (l - em * s) * (l + ep * s)
                },
                move |y: f64| {
                    let s = (kappa * y).sinh() / kappa;
                    let c = (kappa * y).cosh();
                    -em * c * (l + ep * s) + (l - em * s) * ep * c
                },
            );
            let reach = RADIUS_QUARTER.max(root + 1.0);
            let pv = principal_value(&inner, g, &u, &[root], 0.0, reach)?;
            let slope = 2.0 * l * (kappa * root).cosh() * (kappa * x).cosh();
            let delta = Complex64::new(0.0, PI * (-0.25 * root * root).exp() / slope);
            total = total.combine(QuadResult {
                value: pv.value + delta,
                ..pv
            });
        }
        let w = (-0.25 * x * x).exp() * (gap * x).cos();
        Ok(total.scale(Complex64::new(w, 0.0)))
    };

    let r = integrate_nested(&outer, inner_sum, 0.0, RADIUS_QUARTER)?;
    Ok(r.scale(Complex64::new(-det.lambda2() / (4.0 * PI * PI), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0_HALF: f64 = 0.028_158_875_373_857_042_038_3;
    const P0_ONE: f64 = 0.007_088_272_232_636_415_972_32;
    const P0_TWO: f64 = 0.000_137_947_557_062_182_515_681;
    const XV_1_1: f64 = 0.047_440_335_103_833_298_15;
    const XV_1_HALF: f64 = 0.101_454_155_394_342_958_520;
    const XV_HALF_1: f64 = 0.100_431_190_202_925_945_444;

    fn det(gap: f64) -> DetectorParams {
        DetectorParams::with_gap(gap).unwrap()
    }

    #[test]
    fn inertial_response_closed_form() {
        assert!((p_vacuum(&det(0.0)).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-16);
        for (g, v) in [(0.5, P0_HALF), (1.0, P0_ONE), (2.0, P0_TWO)] {
            assert!((transition_probability(&det(g), 0.0).unwrap() / v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn response_tends_to_inertial_value() {
        let p = transition_probability(&det(1.0), 1e-3).unwrap();
        assert!((p / P0_ONE - 1.0).abs() < 1e-4);
        // Small-rate correction π T² e^{-Ω²}/6.
        let a: f64 = 0.05;
        let t = a / (2.0 * PI);
        let p = transition_probability_with(&det(1.0), a, &EvalOptions { rel_tol: 1e-10 })
            .unwrap()
            .0;
        let approx = P0_ONE + PI * t * t * (-1.0f64).exp() / 6.0;
        assert!((p - 0.007_100_473_160_651_539_68).abs() < 1e-15);
        assert!((p - approx).abs() < 5e-9, "{p} vs {approx}");
    }

    #[test]
    fn accelerated_response_reference_values() {
        // 30-digit quadrature of the same one-dimensional integral.
        for (g, v) in [
            (0.5, 0.038_002_615_463_389_017_775_6),
            (1.0, 0.012_309_374_911_707_275_267_2),
            (2.0, 0.000_574_906_756_493_003_292_993),
        ] {
            let p = transition_probability(&det(g), 1.0).unwrap();
            assert!((p / v - 1.0).abs() < 1e-7, "gap {g}: {p}");
        }
    }

    #[test]
    fn response_scales_with_coupling_squared() {
        let a = transition_probability(&det(1.0), 1.3).unwrap();
        let b = transition_probability(&DetectorParams::new(1.0, 2.0).unwrap(), 1.3).unwrap();
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_correlation_values() {
        assert!((x_vacuum_static(&det(1.0), 1.0).unwrap().norm() - XV_1_1).abs() < 1e-15);
        assert!((x_vacuum_static(&det(1.0), 0.5).unwrap().norm() - XV_1_HALF).abs() < 1e-15);
        assert!((x_vacuum_static(&det(0.5), 1.0).unwrap().norm() - XV_HALF_1).abs() < 1e-15);
        let l = 1e-3;
        let lead = (-1.0f64).exp() / (4.0 * SQRT_PI * l);
        assert!((x_vacuum_static(&det(1.0), l).unwrap().norm() / lead - 1.0).abs() < 1e-4);
        assert!(x_vacuum_static(&det(1.0), 0.0).is_err());
        // Power-law tail, not Gaussian: |X| → e^{-Ω²}/(2π L²).
        let far = x_vacuum_static(&det(1.0), 50.0).unwrap().norm();
        assert!((far * 2.0 * PI * 2500.0 / (-1.0f64).exp() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn cold_bath_matches_vacuum() {
        let th = x_thermal(&det(1.0), 1e-4, 1.0).unwrap();
        let vac = x_vacuum_static(&det(1.0), 1.0).unwrap();
        assert!((th - vac).norm() / vac.norm() < 1e-4, "{th} vs {vac}");
    }

    #[test]
    fn thermal_correlation_scales_with_coupling() {
        let a = x_thermal(&det(1.0), 0.2, 1.0).unwrap();
        let b = x_thermal(&DetectorParams::new(1.0, 2.0).unwrap(), 0.2, 1.0).unwrap();
        assert!((b.norm() / a.norm() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn hot_bath_does_not_overflow() {
        let x = x_thermal(&det(1.0), 40.0, 2.0).unwrap();
        assert!(x.is_finite());
    }

    #[test]
    fn weak_acceleration_matches_vacuum() {
        let acc = x_accelerated(&det(1.0), 1e-3, 1.0).unwrap();
        let vac = x_vacuum_static(&det(1.0), 1.0).unwrap();
        assert!((acc - vac).norm() / vac.norm() < 1e-3, "{acc} vs {vac}");
    }

    #[test]
    fn small_rate_thermal_and_accelerated_corrections() {
        // Both corrections are T² e^{-Ω²} times known coefficients at small L.
        let opts = EvalOptions { rel_tol: 1e-10 };
        let (gap, l, a) = (1.0, 1.0, 0.1);
        let t = a / (2.0 * PI);
        let vac = x_vacuum_static(&det(gap), l).unwrap();
        let th = x_thermal_with(&det(gap), t, l, &opts).unwrap().value;
        let expect = vac - PI * t * t * (-gap * gap).exp() / 6.0;
        assert!((th - expect).norm() < 1e-6, "{th} vs {expect}");
        let acc = x_accelerated_with(&det(gap), a, l, &opts).unwrap().value;
        assert!((acc - vac).norm() < 1e-3 && (acc - vac).norm() > 0.0);
    }
}

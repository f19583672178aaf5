//! Closed-form approximants for the correlation term and the transition
//! probability in the small-rate and large-separation regimes.
//!
//! These are regime validators, never production values. Each call reports
//! whether its regime predicate holds but evaluates regardless, so breakdown
//! can be probed on purpose.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::harvest::{p_vacuum, x_vacuum_unit, DetectorParams, ScenarioKind};
use crate::specfun::erfc_imag_scaled_unchecked;
use crate::{Error, Result};

/// Factor that stands in for `≪` in the validity predicates.
pub const SCALE_GAP: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Rate `≪ 1`: `X` to second order in the temperature.
    SmallRate,
    /// Rate `≪ 1` and `L ≪ 1`: the moduli `|X|`.
    SmallRateSmallL,
    /// Rate `≪ 1`: the transition probability.
    SmallRateP,
    /// `L ≫ aσ > 1` and `a ≫ Ω`: the moduli `|X|`.
    LargeAL,
}

impl Regime {
    /// Validity predicate on `(Ωσ, rate, L)`.
    ///
    /// `rate` is as in [`approx_x`]. For the thermal scenario the large-`aL`
    /// test uses the matched acceleration `2πT`.
    pub fn holds(self, kind: ScenarioKind, gap: f64, rate: f64, l: f64) -> bool {
        let small = |x: f64| SCALE_GAP * x <= 1.0;
        match self {
            Regime::SmallRate | Regime::SmallRateP => small(rate),
            Regime::SmallRateSmallL => small(rate) && small(l),
            Regime::LargeAL => {
                let a = match kind {
                    ScenarioKind::ThermalStatic => 2.0 * PI * rate,
                    _ => rate,
                };
                l >= SCALE_GAP * a && a > 1.0 && a >= SCALE_GAP * gap
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproxValue {
    Complex(Complex64),
    /// The large-separation and small-`L` forms only give `|X|`.
    Modulus(f64),
}

impl ApproxValue {
    pub fn modulus(self) -> f64 {
        match self {
            ApproxValue::Complex(z) => z.norm(),
            ApproxValue::Modulus(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approximation {
    pub value: ApproxValue,
    /// Whether the regime predicate holds at the requested point.
    pub in_regime: bool,
}

/// Approximate correlation term.
///
/// `rate` is `aσ` for `ParallelAcc` and `Tσ` for `ThermalStatic`, as in
/// [`crate::harvest::Scenario`]; the accelerated forms use `T_U = a/2π`.
/// `SmallRateP` is not an `X` regime and is rejected.
pub fn approx_x(
    regime: Regime,
    kind: ScenarioKind,
    det: &DetectorParams,
    rate: f64,
    l: f64,
) -> Result<Approximation> {
    det.validate()?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain("separation must be positive"));
    }
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Domain("rate must be finite and non-negative"));
    }
    let t = match kind {
        ScenarioKind::ParallelAcc => rate / (2.0 * PI),
        ScenarioKind::ThermalStatic => rate,
        _ => {
            return Err(Error::Domain(
                "approximants exist for the parallel and thermal pairs only",
            ))
        }
    };
    let acc = kind == ScenarioKind::ParallelAcc;
    let (g2, l2, t2, lam2) = (det.gap * det.gap, l * l, t * t, det.coupling * det.coupling);
    let damp = (-g2).exp();
    let value = match regime {
        Regime::SmallRate => {
            let vac = x_vacuum_unit(det.gap, l);
            let corr = if acc {
                let l4 = l2 * l2;
                let poly = 3.0 * (4.0 * l2 + 4.0 - l4) * g2 - 9.0 * l2 - 6.0 + 2.0 * l4;
                Complex64::new(
                    0.0,
                    -PI.powf(1.5) * t2 / (24.0 * l) * (-(l2 + 4.0 * g2) / 4.0).exp() * poly,
                )
            } else {
                Complex64::new(-PI * t2 * damp / 6.0, 0.0)
            };
            ApproxValue::Complex((vac + corr) * lam2)
        }
        Regime::SmallRateSmallL => {
            let base = damp / (4.0 * PI.sqrt() * l) - damp * l * (PI - 2.0) / (16.0 * PI.powf(1.5));
            let corr = if acc {
                damp * (2.0 * g2 - 1.0) * PI.powf(1.5) * t2 / (4.0 * l)
            } else {
                damp * PI.sqrt() * l * t2 / 6.0
            };
            ApproxValue::Modulus(lam2 * (base + corr))
        }
        Regime::LargeAL => {
            if !(t > 0.0) {
                return Err(Error::Domain("large-separation forms need a positive rate"));
            }
            let m = if acc {
                damp / (2.0 * PI * l2)
                    + ((8.0 * PI * PI * t2 - g2).exp() * (4.0 * PI * t * det.gap).cos())
                        / (2.0 * PI.powi(3) * t2 * l2 * l2)
            } else {
                t * damp / (2.0 * l)
            };
            ApproxValue::Modulus(lam2 * m)
        }
        Regime::SmallRateP => return Err(Error::Domain("SmallRateP approximates P, not X")),
    };
    Ok(Approximation {
        value,
        in_regime: regime.holds(kind, det.gap, rate, l),
    })
}

/// Second-order small-rate expansion of the parallel-pair `X`, complete.
///
/// The imaginary part of the `T_U²` coefficient is the one in the
/// `SmallRate` form; that form drops the companion `Erfc(iL/2)` factor and an
/// elementary real term, so its residual is `O(a²)` rather than `O(a⁴)`:
///
/// `X ≈ X_vac + λ²T_U²e^{-Ω²}{−(iπ^{3/2}/24L) Q e^{-L²/4}Erfc(iL/2)
///      + (π/12)[(2 − 3Ω²)L² + 6Ω² − 5]}`
///
/// with `Q = 3(4L² + 4 − L⁴)Ω² − 9L² − 6 + 2L⁴`. As `L → 0` the real part
/// tends to the thermal `−πT²e^{-Ω²}/6`. Higher orders grow like `(a/L)²`.
pub fn x_acc_second_order(det: &DetectorParams, a: f64, l: f64) -> Result<Complex64> {
    det.validate()?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain("separation must be positive"));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain(
            "acceleration must be finite and non-negative",
        ));
    }
    let t = a / (2.0 * PI);
    let (g2, l2) = (det.gap * det.gap, l * l);
    let w = erfc_imag_scaled_unchecked(0.5 * l);
    let q = 3.0 * (4.0 * l2 + 4.0 - l2 * l2) * g2 - 9.0 * l2 - 6.0 + 2.0 * l2 * l2;
    let rest = PI / 12.0 * ((2.0 - 3.0 * g2) * l2 + 6.0 * g2 - 5.0);
    let corr = Complex64::new(0.0, -PI.powf(1.5) * q / (24.0 * l)) * w + rest;
    Ok(x_vacuum_unit(det.gap, l) * det.lambda2() + corr * (det.lambda2() * t * t * (-g2).exp()))
}

/// Small-temperature transition probability `P₀ + λ²π T² e^{-Ω²}/6`.
pub fn approx_p(det: &DetectorParams, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::Domain("temperature must be finite and non-negative"));
    }
    let t2 = temperature * temperature;
    Ok(p_vacuum(det)? + det.coupling * det.coupling * PI * t2 * (-det.gap * det.gap).exp() / 6.0)
}

/// `2Ω² − 1`: positive where the accelerated pair out-correlates the bath at
/// small rate and separation.
pub fn sign_criterion(det: &DetectorParams) -> f64 {
    2.0 * det.gap * det.gap - 1.0
}

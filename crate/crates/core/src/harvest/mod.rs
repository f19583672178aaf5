//! Transition probabilities, correlation terms and concurrence.
//!
//! The reduced evaluators ([`transition_probability`], [`x_vacuum_static`],
//! [`x_thermal`], [`x_accelerated`]) are the production path. The generic
//! engine ([`generic_udw`]) integrates the defining double integrals along
//! arbitrary worldlines and serves as their oracle, and as the production
//! path for the antiparallel and perpendicular pairs.

mod generic;
mod reduced;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub use generic::{
    generic_udw, generic_udw_with, light_cone_roots, GenericOptions, PoleTreatment, Quantities,
};
pub(crate) use reduced::x_vacuum_unit;
pub use reduced::{
    p_vacuum, transition_probability, transition_probability_with, x_accelerated,
    x_accelerated_with, x_thermal, x_thermal_with, x_vacuum_static,
};

/// Smallest separation accepted by the evaluators.
pub const MIN_SEPARATION: f64 = 1e-3;

/// Gap and coupling of the identical detector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    /// `Ωσ`
    pub gap: f64,
    /// `λ`
    pub coupling: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            gap: 1.0,
            coupling: 1.0,
        }
    }
}

impl DetectorParams {
    pub fn new(gap: f64, coupling: f64) -> Result<Self> {
        let d = DetectorParams { gap, coupling };
        d.validate()?;
        Ok(d)
    }

    pub fn with_gap(gap: f64) -> Result<Self> {
        Self::new(gap, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Error::Domain("gap must be finite and non-negative"));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::Domain("coupling must be finite and positive"));
        }
        Ok(())
    }

    pub(crate) fn lambda2(&self) -> f64 {
        self.coupling * self.coupling
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    ParallelAcc,
    AntiparallelAcc,
    PerpendicularAcc,
    ThermalStatic,
    VacuumStatic,
}

impl ScenarioKind {
    pub fn is_accelerated(self) -> bool {
        matches!(
            self,
            ScenarioKind::ParallelAcc
                | ScenarioKind::AntiparallelAcc
                | ScenarioKind::PerpendicularAcc
        )
    }
}

/// Trajectory pair plus field state.
///
/// `rate` is `aσ` for the accelerated kinds and `Tσ` for the thermal one; it
/// is ignored for the static vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub rate: f64,
    pub separation: f64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, rate: f64, separation: f64) -> Result<Self> {
        let s = Scenario {
            kind,
            rate,
            separation,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_separation(self.separation)?;
        if self.kind != ScenarioKind::VacuumStatic && !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::Domain(
                "rate must be positive for accelerated and thermal scenarios",
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_separation(l: f64) -> Result<()> {
    if !(l >= MIN_SEPARATION && l.is_finite()) {
        return Err(Error::Domain("separation must be finite and at least 1e-3"));
    }
    Ok(())
}

/// `γ = Ω/(πT_U)` and `α = 1/(2πT_U)²` for `T_U = a/2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedIntegrandParams {
    pub gamma: f64,
    pub alpha: f64,
}

impl ReducedIntegrandParams {
    pub fn from_acceleration(det: &DetectorParams, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain("acceleration must be positive"));
        }
        Ok(ReducedIntegrandParams {
            gamma: 2.0 * det.gap / a,
            alpha: 1.0 / (a * a),
        })
    }
}

/// Absolute error estimates of the fields of a [`HarvestOutcome`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutcomeErrors {
    pub p_a: f64,
    pub p_b: f64,
    pub corr_c: f64,
    pub corr_x: f64,
    pub concurrence: f64,
}

/// Density-matrix entries that decide entanglement, per scenario point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvestOutcome {
    pub p_a: f64,
    pub p_b: f64,
    /// Only the generic engine computes `C`; it never enters the concurrence.
    pub corr_c: Option<Complex64>,
    pub corr_x: Complex64,
    pub concurrence: f64,
    pub err: OutcomeErrors,
}

impl HarvestOutcome {
    /// Assembles an outcome and derives the concurrence and its error.
    pub fn assemble(
        p_a: (f64, f64),
        p_b: (f64, f64),
        corr_c: Option<(Complex64, f64)>,
        corr_x: (Complex64, f64),
    ) -> Result<Self> {
        let conc = concurrence(p_a.0.max(0.0), p_b.0.max(0.0), corr_x.0.norm())?;
        let g = (p_a.0 * p_b.0).max(0.0).sqrt();
        let dg = if g > 0.0 {
            (p_b.0 * p_a.1 + p_a.0 * p_b.1) / (2.0 * g)
        } else {
            (p_a.1 * p_b.1).sqrt()
        };
        Ok(HarvestOutcome {
            p_a: p_a.0,
            p_b: p_b.0,
            corr_c: corr_c.map(|c| c.0),
            corr_x: corr_x.0,
            concurrence: conc,
            err: OutcomeErrors {
                p_a: p_a.1,
                p_b: p_b.1,
                corr_c: corr_c.map_or(0.0, |c| c.1),
                corr_x: corr_x.1,
                concurrence: 2.0 * (corr_x.1 + dg),
            },
        })
    }

    /// Unclamped `|X| − √(P_A P_B)`.
    pub fn margin(&self) -> f64 {
        self.corr_x.norm() - (self.p_a * self.p_b).max(0.0).sqrt()
    }
}

/// `2 max(0, |X| − √(P_A P_B))`.
pub fn concurrence(p_a: f64, p_b: f64, x_abs: f64) -> Result<f64> {
    if !(p_a >= 0.0 && p_b >= 0.0 && x_abs >= 0.0) {
        return Err(Error::Domain(
            "concurrence needs non-negative P_A, P_B and |X|",
        ));
    }
    Ok(2.0 * (x_abs - (p_a * p_b).sqrt()).max(0.0))
}

/// Accuracy knobs of the production evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Relative accuracy requested for every reported quantity.
    pub rel_tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { rel_tol: 1e-6 }
    }
}

impl EvalOptions {
    pub fn with_tol(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return Err(Error::Domain("quadrature tolerance must lie in (0, 1e-2]"));
        }
        Ok(EvalOptions { rel_tol })
    }
}

/// Evaluates one scenario point with default accuracy.
pub fn evaluate_scenario(det: &DetectorParams, sc: &Scenario) -> Result<HarvestOutcome> {
    evaluate_scenario_with(det, sc, &EvalOptions::default())
}

pub fn evaluate_scenario_with(
    det: &DetectorParams,
    sc: &Scenario,
    opts: &EvalOptions,
) -> Result<HarvestOutcome> {
    det.validate()?;
    sc.validate()?;
    let (l, rate) = (sc.separation, sc.rate);
    match sc.kind {
        ScenarioKind::VacuumStatic => {
            let p = p_vacuum(det)?;
            let x = x_vacuum_static(det, l)?;
            let e = 1e-15 * p;
            HarvestOutcome::assemble((p, e), (p, e), None, (x, 1e-15 * x.norm()))
        }
        ScenarioKind::ThermalStatic => {
            let p = transition_probability_with(det, 2.0 * core::f64::consts::PI * rate, opts)?;
            let x = x_thermal_with(det, rate, l, opts)?;
            HarvestOutcome::assemble(p, p, None, (x.value, x.abs_err))
        }
        ScenarioKind::ParallelAcc => {
            let p = transition_probability_with(det, rate, opts)?;
            let x = x_accelerated_with(det, rate, l, opts)?;
            HarvestOutcome::assemble(p, p, None, (x.value, x.abs_err))
        }
        ScenarioKind::AntiparallelAcc | ScenarioKind::PerpendicularAcc => {
            // Each detector alone is uniformly accelerated, so its response
            // is the parallel one.
            let p = transition_probability_with(det, rate, opts)?;
            let g = GenericOptions {
                rel_tol: opts.rel_tol,
                treatment: PoleTreatment::PrincipalValue,
                quantities: Quantities::X,
                ..GenericOptions::default()
            };
            let (ta, tb) = generic::scenario_trajectories(sc)?;
            let w = crate::wightman::WightmanEvaluator::vacuum();
            let out = generic_udw_with(&ta, &tb, &w, det, &g)?;
            HarvestOutcome::assemble(p, p, None, (out.corr_x, out.err.corr_x))
        }
    }
}

//! Harvesting ranges, accelerated-versus-thermal crossovers, sweeps and
//! extremum detection.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::harvest::{
    evaluate_scenario_with, DetectorParams, EvalOptions, HarvestOutcome, Scenario, ScenarioKind,
};
use crate::{Error, Result};

/// Concurrence per `λ²` below which harvesting "almost does not occur".
pub const L_MAX_THRESHOLD: f64 = 1e-8;

/// Separation at which bracketing starts.
pub const L_START: f64 = 0.1;

/// Largest separation probed for `L_max`.
pub const L_LIMIT: f64 = 1e3;

/// Required width of a finder's final bracket.
pub const L_TOL: f64 = 1e-3;

/// Step and reach of the `L_crit` scan.
pub const CRIT_STEP: f64 = 0.05;
pub const CRIT_REACH: f64 = 20.0;

const MAX_BISECTIONS: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub value: f64,
    pub bracket: (f64, f64),
    /// `|f(value)|`
    pub residual: f64,
    /// Ten times the evaluator error at `value`; `residual` is below it
    /// unless the bracket hit floating-point resolution first.
    pub residual_bound: f64,
    pub iterations: u32,
}

/// Evaluates `kind` at `(rate, L)`, with `rate = 0` selecting the static
/// vacuum for every kind.
pub fn outcome_at(
    kind: ScenarioKind,
    det: &DetectorParams,
    rate: f64,
    l: f64,
    opts: &EvalOptions,
) -> Result<HarvestOutcome> {
    let kind = if rate == 0.0 {
        ScenarioKind::VacuumStatic
    } else {
        kind
    };
    evaluate_scenario_with(det, &Scenario::new(kind, rate, l)?, opts)
}

/// Bisects `f` on `[lo, hi]`, where `f(lo) > 0 ≥ f(hi)`, until the bracket is
/// narrower than [`L_TOL`] and `|f| ≤ 10·err` at the midpoint.
fn bisect_sign<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<RootResult>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let (v, err) = f(mid)?;
        iterations += 1;
        let bound = 10.0 * err;
        let resolved = !(lo < mid && mid < hi);
        if (hi - lo <= L_TOL && v.abs() <= bound) || resolved || iterations >= MAX_BISECTIONS {
            return Ok(RootResult {
                value: mid,
                bracket: (lo, hi),
                residual: v.abs(),
                residual_bound: bound,
                iterations,
            });
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Largest separation at which the pair still harvests, `C(L_max) = 1e-8·λ²`.
///
/// `rate = 0` selects the static vacuum.
pub fn find_l_max(kind: ScenarioKind, det: &DetectorParams, rate: f64) -> Result<RootResult> {
    find_l_max_with(kind, det, rate, &EvalOptions::default())
}

pub fn find_l_max_with(
    kind: ScenarioKind,
    det: &DetectorParams,
    rate: f64,
    opts: &EvalOptions,
) -> Result<RootResult> {
    det.validate()?;
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Domain("rate must be finite and non-negative"));
    }
    let threshold = L_MAX_THRESHOLD * det.coupling * det.coupling;
    let f = |l: f64| -> Result<(f64, f64)> {
        let o = outcome_at(kind, det, rate, l, opts)?;
        Ok((o.concurrence - threshold, o.err.concurrence))
    };
    if f(L_START)?.0 <= 0.0 {
        return Err(Error::NoHarvesting);
    }
    let mut lo = L_START;
    loop {
        let hi = 2.0 * lo;
        if hi > L_LIMIT {
            return Err(Error::UnboundedRange { limit: L_LIMIT });
        }
        if f(hi)?.0 <= 0.0 {
            return bisect_sign(f, lo, hi);
        }
        lo = hi;
    }
}

/// Separation below which the accelerated pair harvests more than a static
/// pair in the bath at the Unruh temperature `a/2π`.
///
/// The scan walks `L = 0.05, 0.10, …` and returns the leftmost change of
/// `g > 0`, with `g = C_acc − C_th`; it stops once neither pair harvests.
/// `None` when `g` never turns positive.
pub fn find_l_crit(det: &DetectorParams, a: f64) -> Result<Option<RootResult>> {
    find_l_crit_with(det, a, &EvalOptions::default())
}

pub fn find_l_crit_with(
    det: &DetectorParams,
    a: f64,
    opts: &EvalOptions,
) -> Result<Option<RootResult>> {
    det.validate()?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain("acceleration must be positive"));
    }
    let t = a / (2.0 * PI);
    let eval = |l: f64| -> Result<(f64, f64, bool)> {
        let acc = outcome_at(ScenarioKind::ParallelAcc, det, a, l, opts)?;
        let th = outcome_at(ScenarioKind::ThermalStatic, det, t, l, opts)?;
        let idle = acc.concurrence == 0.0 && th.concurrence == 0.0;
        Ok((
            acc.concurrence - th.concurrence,
            acc.err.concurrence + th.err.concurrence,
            idle,
        ))
    };
    let (g0, _, mut idle) = eval(CRIT_STEP)?;
    let start_positive = g0 > 0.0;
    let mut prev = CRIT_STEP;
    let mut k = 2;
    while !idle {
        let l = k as f64 * CRIT_STEP;
        if l > CRIT_REACH + 1e-12 {
            break;
        }
        let (g, _, now_idle) = eval(l)?;
        if (g > 0.0) != start_positive {
            // Orient so the bisection sees f(lo) > 0 ≥ f(hi); ties (g = 0)
            // belong to the non-positive side.
            let root = bisect_sign(
                |l| {
                    let (g, e, _) = eval(l)?;
                    let v = match (start_positive, g > 0.0) {
                        (true, _) => g,
                        (false, true) => -g,
                        (false, false) => (-g).max(f64::MIN_POSITIVE),
                    };
                    Ok((v, e))
                },
                prev,
                l,
            )?;
            return Ok(Some(root));
        }
        idle = now_idle;
        prev = l;
        k += 1;
    }
    if start_positive {
        // Ahead all the way to the end of harvesting: the crossover is the
        // first separation at which accelerated harvesting stops.
        return Ok(Some(RootResult {
            value: prev,
            bracket: (prev - CRIT_STEP, prev),
            residual: 0.0,
            residual_bound: 0.0,
            iterations: 0,
        }));
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Separation,
    Rate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario_kind: ScenarioKind,
    pub det: DetectorParams,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    /// The parameter not on the axis: the rate for separation sweeps and
    /// the separation for rate sweeps.
    pub fixed: f64,
    pub tol: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.det.validate()?;
        if self.grid.is_empty() {
            return Err(Error::Domain("sweep grid is empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) || self.grid.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::Domain(
                "sweep grid must be finite and strictly increasing",
            ));
        }
        EvalOptions::with_tol(self.tol)?;
        Ok(())
    }

    /// `(rate, L)` of grid value `v`.
    pub fn point(&self, v: f64) -> (f64, f64) {
        match self.axis {
            SweepAxis::Separation => (self.fixed, v),
            SweepAxis::Rate => (v, self.fixed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub p: f64,
    pub x_abs: f64,
    pub concurrence: f64,
    /// Concurrence error; `+∞` marks a point that failed.
    pub err: f64,
}

impl SweepRow {
    pub fn failed(axis_value: f64) -> Self {
        SweepRow {
            axis_value,
            p: f64::NAN,
            x_abs: f64::NAN,
            concurrence: f64::NAN,
            err: f64::INFINITY,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.err == f64::INFINITY
    }
}

/// One row of a sweep. Failures become [`SweepRow::failed`].
pub fn sweep_point(spec: &SweepSpec, v: f64) -> SweepRow {
    let (rate, l) = spec.point(v);
    let opts = EvalOptions { rel_tol: spec.tol };
    match outcome_at(spec.scenario_kind, &spec.det, rate, l, &opts) {
        Ok(o) => SweepRow {
            axis_value: v,
            p: o.p_a,
            x_abs: o.corr_x.norm(),
            concurrence: o.concurrence,
            err: o.err.concurrence,
        },
        Err(_) => SweepRow::failed(v),
    }
}

/// Serial sweep in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(spec.grid.iter().map(|&v| sweep_point(spec, v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extremum {
    pub index: usize,
    pub kind: ExtremumKind,
}

/// Interior extrema of `series`: points where the discrete slope changes sign.
///
/// Steps no larger than `2·max_err` carry no sign. When a plateau of such
/// steps separates the two slopes, the extreme point on it is reported.
pub fn detect_extrema(series: &[(f64, f64)], max_err: f64) -> Result<Vec<Extremum>> {
    if series.len() < 3 {
        return Err(Error::Contract(
            "extremum detection needs at least three points",
        ));
    }
    if series.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::Contract("abscissae must be strictly increasing"));
    }
    if series.iter().any(|p| !p.1.is_finite()) || !(max_err >= 0.0) {
        return Err(Error::Contract("series values and error must be finite"));
    }
    let floor = 2.0 * max_err;
    let mut out = Vec::new();
    // Index where the current run of significant slopes ended.
    let mut last: Option<(usize, bool)> = None;
    for i in 0..series.len() - 1 {
        let d = series[i + 1].1 - series[i].1;
        if d.abs() <= floor {
            continue;
        }
        let up = d > 0.0;
        if let Some((end, was_up)) = last {
            if was_up != up {
                let span = &series[end..=i];
                let pick = |better: fn(f64, f64) -> bool| {
                    let mut best = 0;
                    for (j, p) in span.iter().enumerate() {
                        if better(p.1, span[best].1) {
                            best = j;
                        }
                    }
                    end + best
                };
                out.push(if was_up {
                    Extremum {
                        index: pick(|a, b| a > b),
                        kind: ExtremumKind::Maximum,
                    }
                } else {
                    Extremum {
                        index: pick(|a, b| a < b),
                        kind: ExtremumKind::Minimum,
                    }
                });
            }
        }
        last = Some((i + 1, up));
    }
    Ok(out)
}

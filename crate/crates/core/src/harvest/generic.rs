//! Direct evaluation of the harvesting double integrals along two worldlines.
//!
//! With `χ(τ) = e^{-τ²/2}`:
//!
//! * `P_D = λ² ∬ χχ′ e^{-iΩ(τ−τ′)} W(x_D(τ), x_D(τ′))`
//! * `C = λ² ∬ χχ′ e^{-iΩ(τ−τ′)} W(x_A(τ), x_B(τ′))`
//! * `X = −λ² ∬ χχ′ e^{-iΩ(τ+τ′)} [θ(t′−t) W(x_A, x_B′) + θ(t−t′) W(x_B′, x_A)]`
//!
//! Both orderings in `X` put the earlier event second, so its Wightman
//! function is always evaluated at `Δt = −|t_A − t_B′|`.
//!
//! The square `[−10, 10]²` is integrated with `τ` outer and `τ′` inner. The
//! inner axis is split where `t_B(τ′) = t_A(τ)` and at the light-cone roots
//! of `σ² = Δt² − |Δx|²`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::{DetectorParams, HarvestOutcome, OutcomeErrors, Scenario, ScenarioKind};
use crate::quad::{extrapolate_eps, principal_value, Denominator, Integrator, Tolerance};
use crate::specfun::{erfc_imag_scaled_unchecked, erfc_unchecked};
use crate::wightman::{
    SpacetimePoint, Trajectory, TrajectoryKind, WightmanEvaluator, WightmanKind,
};
use crate::{Error, Result};

/// How the light-cone singularities are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleTreatment {
    /// Integrate at each `ε` of the regulator policy and extrapolate.
    Regulated,
    /// Principal value plus delta terms on the inner axis, exact in `ε`. Only
    /// `C` and `X` have simple light-cone poles; `P` is always regulated.
    PrincipalValue,
}

/// Which integrals to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantities {
    pub p: bool,
    pub c: bool,
    pub x: bool,
}

impl Quantities {
    pub const ALL: Quantities = Quantities {
        p: true,
        c: true,
        x: true,
    };
    pub const P: Quantities = Quantities {
        p: true,
        c: false,
        x: false,
    };
    pub const X: Quantities = Quantities {
        p: false,
        c: false,
        x: true,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericOptions {
    /// Relative accuracy, measured against the inertial-vacuum magnitude of
    /// each quantity.
    pub rel_tol: f64,
    pub treatment: PoleTreatment,
    pub quantities: Quantities,
    /// Half-width of the proper-time window.
    pub window: f64,
}

impl Default for GenericOptions {
    fn default() -> Self {
        GenericOptions {
            rel_tol: 1e-6,
            treatment: PoleTreatment::Regulated,
            quantities: Quantities::ALL,
            window: 10.0,
        }
    }
}

/// Scan step used to bracket light-cone roots.
const SCAN_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    Pa,
    Pb,
    C,
    X,
}

struct Setup<'a> {
    a: &'a Trajectory,
    b: &'a Trajectory,
    w: &'a WightmanEvaluator,
    gap: f64,
    window: f64,
}

impl Setup<'_> {
    fn pair(&self, term: Term) -> (&Trajectory, &Trajectory) {
        match term {
            Term::Pa => (self.a, self.a),
            Term::Pb => (self.b, self.b),
            Term::C | Term::X => (self.a, self.b),
        }
    }

    /// `(Δt, r)` handed to the Wightman function.
    fn separation(term: Term, p: &SpacetimePoint, q: &SpacetimePoint) -> (f64, f64) {
        let dt = p.t - q.t;
        let dt = if term == Term::X { -dt.abs() } else { dt };
        (dt, p.distance(q))
    }

    /// Switching, phase and sign factors, cut to zero outside the disc of
    /// radius `window`.
    fn weight(&self, term: Term, tau: f64, tau2: f64) -> Complex64 {
        let rho2 = tau * tau + tau2 * tau2;
        if rho2 > self.window * self.window {
            return Complex64::new(0.0, 0.0);
        }
        let chi = (-0.5 * rho2).exp();
        match term {
            Term::X => -Complex64::from_polar(chi, -self.gap * (tau + tau2)),
            _ => Complex64::from_polar(chi, -self.gap * (tau - tau2)),
        }
    }

    /// Inner breakpoints at fixed `τ`, including both window ends.
    fn breakpoints(&self, term: Term, tau: f64) -> Vec<f64> {
        let (first, second) = self.pair(term);
        let p = first.point(tau);
        let w = self.window;
        let eq = second.proper_time_at(p.t);
        let mut pts = Vec::with_capacity(6);
        pts.push(-w);
        pts.push(w);
        if eq > -w && eq < w {
            pts.push(eq);
        }
        if matches!(term, Term::C | Term::X) {
            pts.extend(light_cone_roots(first, tau, second, -w, w));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
        pts
    }
}

/// `σ²(τ′) = (t_p − t_B(τ′))² − |x_p − x_B(τ′)|²` with its analytic slope,
/// where `p = x_A(τ)`.
struct Interval<'a> {
    a: &'a Trajectory,
    tau: f64,
    p: SpacetimePoint,
    b: &'a Trajectory,
}

impl<'a> Interval<'a> {
    fn new(a: &'a Trajectory, tau: f64, b: &'a Trajectory) -> Self {
        Interval {
            a,
            tau,
            p: a.point(tau),
            b,
        }
    }

    fn closed(&self, tau2: f64) -> Option<(f64, f64, f64)> {
        self.a.closed_interval(self.tau, self.b, tau2)
    }

    /// Round-off level of [`Denominator::value`] at `τ′`.
    fn noise(&self, tau2: f64) -> f64 {
        if let Some((_, _, n)) = self.closed(tau2) {
            return n;
        }
        let q = self.b.point(tau2);
        let m = [self.p.t, self.p.x, self.p.y, self.p.z, q.t, q.x, q.y, q.z]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        let d = (self.p.t - q.t).abs() + self.p.distance(&q);
        16.0 * f64::EPSILON * m * d
    }
}

impl Denominator for Interval<'_> {
    fn value(&self, tau2: f64) -> f64 {
        if let Some((v, _, _)) = self.closed(tau2) {
            return v;
        }
        let q = self.b.point(tau2);
        let dt = self.p.t - q.t;
        let d = self.p.distance(&q);
        (dt - d) * (dt + d)
    }

    fn slope(&self, tau2: f64) -> f64 {
        if let Some((_, d, _)) = self.closed(tau2) {
            return d;
        }
        let q = self.b.point(tau2);
        let v = self.b.velocity(tau2);
        -2.0 * (self.p.t - q.t) * v.t
            + 2.0 * ((self.p.x - q.x) * v.x + (self.p.y - q.y) * v.y + (self.p.z - q.z) * v.z)
    }
}

/// Proper times `τ′ ∈ (lo, hi)` at which `x_B(τ′)` lies on the light cone of
/// `x_A(τ)`. Brackets come from a scan outward from the equal-time point; each
/// is refined by bisection.
pub fn light_cone_roots(a: &Trajectory, tau: f64, b: &Trajectory, lo: f64, hi: f64) -> Vec<f64> {
    let f = Interval::new(a, tau, b);
    let start = b.proper_time_at(f.p.t).clamp(lo, hi);
    let mut roots = Vec::new();
    // Samples inside the round-off band carry no sign; brackets join the
    // nearest significant samples.
    let significant = |x: f64| {
        let v = f.value(x);
        (v.abs() > f.noise(x)).then_some(v)
    };
    for dir in [-1.0, 1.0] {
        let mut x = start;
        let mut last = significant(x).map(|v| (x, v));
        loop {
            let x1 = (x + dir * SCAN_STEP).clamp(lo, hi);
            if x1 == x {
                break;
            }
            x = x1;
            if let Some(v) = significant(x) {
                if let Some((x0, v0)) = last {
                    if (v < 0.0) != (v0 < 0.0) {
                        roots.push(bisect(&f, x0.min(x), x0.max(x)));
                    }
                }
                last = Some((x, v));
            }
        }
    }
    roots.retain(|&r| r > lo && r < hi);
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
    roots
}

fn bisect(f: &Interval<'_>, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f.value(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f.value(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const N: usize = 4;

impl Setup<'_> {
    /// Regulated double integral at each `ε` of `eps`.
    fn regulated(&self, term: Term, eps: [f64; N], abs_tol: f64) -> Result<([Complex64; N], f64)> {
        let w = self.window;
        let (first, second) = self.pair(term);
        let inner_tol = 0.25 * abs_tol / (2.0 * w);
        let inner = Integrator::new(Tolerance::absolute(inner_tol)).with_max_intervals(20_000);
        let outer = Integrator::new(Tolerance::absolute(0.5 * abs_tol)).with_max_intervals(20_000);
        let mut worst_inner: f64 = 0.0;
        let r = outer.integrate_vec(
            |tau| {
                let p = first.point(tau);
                let pts = self.breakpoints(term, tau);
                let q = inner.integrate_vec(
                    |tau2| {
                        let q = second.point(tau2);
                        let (dt, r) = Setup::separation(term, &p, &q);
                        let wt = self.weight(term, tau, tau2);
                        let mut out = [Complex64::new(0.0, 0.0); N];
                        if wt == Complex64::new(0.0, 0.0) {
                            return Ok(out);
                        }
                        for k in 0..N {
                            out[k] = wt * self.w.eval(dt, r, eps[k])?;
                        }
                        Ok(out)
                    },
                    &pts,
                )?;
                worst_inner = worst_inner.max(q.abs_err);
                Ok(q.values)
            },
            &[-w, 0.0, w],
        )?;
        Ok((r.values, r.abs_err + 2.0 * w * worst_inner))
    }

    /// Principal value plus delta terms for `C` or `X`.
    fn principal(&self, term: Term, abs_tol: f64) -> Result<(Complex64, f64)> {
        let w = self.window;
        let inner_tol = 0.25 * abs_tol / (2.0 * w);
        let inner = Integrator::new(Tolerance::absolute(inner_tol)).with_max_intervals(20_000);
        let outer = Integrator::new(Tolerance::absolute(0.5 * abs_tol)).with_max_intervals(20_000);
        let mut worst_inner: f64 = 0.0;
        let mut failure: Option<Error> = None;
        let r = outer.integrate_try(
            |tau| {
                let p = self.a.point(tau);
                let u = Interval::new(self.a, tau, self.b);
                let roots = light_cone_roots(self.a, tau, self.b, -w, w);
                let mut g = |tau2: f64| -> Complex64 {
                    let wt = self.weight(term, tau, tau2);
                    if wt == Complex64::new(0.0, 0.0) {
                        return wt;
                    }
                    let q = self.b.point(tau2);
                    let (dt, r) = Setup::separation(term, &p, &q);
                    match self.w.regular_part(dt, r) {
                        Ok(reg) => wt * reg,
                        Err(e) => {
                            failure.get_or_insert(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                };
                let pv = principal_value(&inner, &mut g, &u, &roots, -w, w)?;
                let mut delta = Complex64::new(0.0, 0.0);
                for &root in &roots {
                    let slope = u.slope(root);
                    if !(slope.abs() >= crate::quad::MIN_SLOPE) {
                        return Err(Error::Degenerate { root, slope });
                    }
                    // X sees σ² + i0 on every root; C sees σ² − i0 sgn Δt.
                    let sign = match term {
                        Term::X => -1.0,
                        _ => (p.t - self.b.point(root).t).signum(),
                    };
                    delta += g(root) * (sign * PI / slope.abs());
                }
                worst_inner = worst_inner.max(pv.abs_err);
                Ok(pv.value + Complex64::new(0.0, 1.0) * delta)
            },
            -w,
            w,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok((r.value, r.abs_err + 2.0 * w * worst_inner))
    }

    /// Regulated integral over the full ε sequence, extrapolated to zero.
    fn extrapolated(&self, term: Term, abs_tol: f64) -> Result<(Complex64, f64)> {
        let policy = &self.w.regulator;
        policy.validate()?;
        let eps = &policy.eps_sequence;
        let mut samples: Vec<(f64, Complex64)> = Vec::with_capacity(eps.len());
        let mut quad_err: f64 = 0.0;
        for chunk in eps.chunks(N) {
            let mut e = [chunk[chunk.len() - 1]; N];
            e[..chunk.len()].copy_from_slice(chunk);
            let (vals, err) = self.regulated(term, e, abs_tol)?;
            quad_err = quad_err.max(err);
            samples.extend(chunk.iter().copied().zip(vals.iter().copied()));
        }
        let x = extrapolate_eps(&samples, policy.extrapolation_order)?;
        Ok((x.value, x.abs_err + quad_err))
    }
}

/// Evaluates `P_A`, `P_B`, `C` and `X` along `(traj_a, traj_b)` with default
/// options (ε extrapolation, relative accuracy 1e-6).
pub fn generic_udw(
    traj_a: &Trajectory,
    traj_b: &Trajectory,
    w: &WightmanEvaluator,
    det: &DetectorParams,
) -> Result<HarvestOutcome> {
    generic_udw_with(traj_a, traj_b, w, det, &GenericOptions::default())
}

/// As [`generic_udw`]. Quantities not requested are reported as NaN, and so
/// is the concurrence unless both `P` and `X` were computed.
pub fn generic_udw_with(
    traj_a: &Trajectory,
    traj_b: &Trajectory,
    w: &WightmanEvaluator,
    det: &DetectorParams,
    opts: &GenericOptions,
) -> Result<HarvestOutcome> {
    det.validate()?;
    if !(opts.rel_tol > 0.0 && opts.window > 0.0) {
        return Err(Error::Contract(
            "generic engine needs positive tolerance and window",
        ));
    }
    if w.kind == WightmanKind::ThermalClosed
        && (traj_a.kind().is_accelerated() || traj_b.kind().is_accelerated())
    {
        return Err(Error::Contract(
            "the closed thermal form only applies to static detectors",
        ));
    }
    let setup = Setup {
        a: traj_a,
        b: traj_b,
        w,
        gap: det.gap,
        window: opts.window,
    };
    let l2 = det.lambda2();
    let gap = det.gap;
    let l0 = traj_a.point(0.0).distance(&traj_b.point(0.0)).max(1e-3);
    let p_scale = ((-gap * gap).exp() - gap * PI.sqrt() * erfc_unchecked(gap)) / (4.0 * PI);
    let x_scale =
        (-gap * gap).exp() * erfc_imag_scaled_unchecked(0.5 * l0).norm() / (4.0 * PI.sqrt() * l0);
    let nan = (f64::NAN, f64::NAN);

    let (pa, pb) = if opts.quantities.p {
        let tol = opts.rel_tol * p_scale;
        let pa = setup.extrapolated(Term::Pa, tol)?;
        let pb = setup.extrapolated(Term::Pb, tol)?;
        ((pa.0.re, pa.1), (pb.0.re, pb.1))
    } else {
        (nan, nan)
    };
    let pole = |term: Term, tol: f64| match opts.treatment {
        PoleTreatment::Regulated => setup.extrapolated(term, tol),
        PoleTreatment::PrincipalValue => setup.principal(term, tol),
    };
    let c = if opts.quantities.c {
        Some(pole(
            Term::C,
            opts.rel_tol * p_scale * (-0.25 * l0 * l0).exp().max(1e-3),
        )?)
    } else {
        None
    };
    let x = if opts.quantities.x {
        pole(Term::X, opts.rel_tol * x_scale)?
    } else {
        (Complex64::new(f64::NAN, f64::NAN), f64::NAN)
    };

    let scale_c = |(v, e): (Complex64, f64)| (v * l2, e * l2);
    let (pa, pb) = ((pa.0 * l2, pa.1 * l2), (pb.0 * l2, pb.1 * l2));
    let x = scale_c(x);
    let c = c.map(scale_c);
    if opts.quantities.p && opts.quantities.x {
        return HarvestOutcome::assemble(pa, pb, c, x);
    }
    Ok(HarvestOutcome {
        p_a: pa.0,
        p_b: pb.0,
        corr_c: c.map(|c| c.0),
        corr_x: x.0,
        concurrence: f64::NAN,
        err: OutcomeErrors {
            p_a: pa.1,
            p_b: pb.1,
            corr_c: c.map_or(f64::NAN, |c| c.1),
            corr_x: x.1,
            concurrence: f64::NAN,
        },
    })
}

/// The worldline pair a scenario describes.
pub(crate) fn scenario_trajectories(sc: &Scenario) -> Result<(Trajectory, Trajectory)> {
    use TrajectoryKind::*;
    let (ka, kb, rate) = match sc.kind {
        ScenarioKind::ParallelAcc => (ParallelA, ParallelB, sc.rate),
        ScenarioKind::AntiparallelAcc => (AntiparallelA, AntiparallelB, sc.rate),
        ScenarioKind::PerpendicularAcc => (PerpendicularA, PerpendicularB, sc.rate),
        ScenarioKind::ThermalStatic | ScenarioKind::VacuumStatic => {
            (StaticAtOrigin, StaticAtL, 0.0)
        }
    };
    Ok((
        Trajectory::new(ka, rate, sc.separation)?,
        Trajectory::new(kb, rate, sc.separation)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_roots_are_symmetric_at_proper_time_zero() {
        // With aL < 1 the event A(0) is outside B's horizon: cosh τ′ = 1.25.
        let a = Trajectory::new(TrajectoryKind::ParallelA, 1.0, 0.5).unwrap();
        let b = Trajectory::new(TrajectoryKind::ParallelB, 1.0, 0.5).unwrap();
        let roots = light_cone_roots(&a, 0.0, &b, -10.0, 10.0);
        assert_eq!(roots.len(), 2);
        assert!((roots[1] - 1.25f64.acosh()).abs() < 1e-13 && (roots[0] + roots[1]).abs() < 1e-13);
        // With aL ≥ 1 it never is.
        let b1 = Trajectory::new(TrajectoryKind::ParallelB, 1.0, 1.0).unwrap();
        assert!(light_cone_roots(&a, 0.0, &b1, -10.0, 10.0).is_empty());
        let f = Interval::new(&a, 0.0, &b);
        for r in &roots {
            assert!(f.value(*r).abs() < 1e-12);
        }
        // Static pair: roots at τ′ = ±L.
        let s0 = Trajectory::new(TrajectoryKind::StaticAtOrigin, 0.0, 0.7).unwrap();
        let s1 = Trajectory::new(TrajectoryKind::StaticAtL, 0.0, 0.7).unwrap();
        let roots = light_cone_roots(&s0, 0.3, &s1, -10.0, 10.0);
        assert!((roots[0] + 0.4).abs() < 1e-13 && (roots[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn interval_slope_matches_finite_difference() {
        use TrajectoryKind::*;
        for (ka, kb) in [
            (ParallelA, ParallelB),
            (AntiparallelA, AntiparallelB),
            (PerpendicularA, PerpendicularB),
            (StaticAtOrigin, PerpendicularB),
        ] {
            let a = Trajectory::new(ka, 1.3, 0.6).unwrap();
            let b = Trajectory::new(kb, 1.3, 0.6).unwrap();
            for (tau, tau2) in [(0.4, 0.9), (-0.7, 0.2), (1.1, -1.5)] {
                let f = Interval::new(&a, tau, &b);
                let h = 1e-6;
                let fd = (f.value(tau2 + h) - f.value(tau2 - h)) / (2.0 * h);
                assert!(
                    (f.slope(tau2) - fd).abs() < 1e-6 * fd.abs().max(1.0),
                    "{kb:?}"
                );
            }
        }
    }

    #[test]
    fn closed_intervals_match_coordinates() {
        use TrajectoryKind::*;
        for (ka, kb) in [
            (ParallelA, ParallelB),
            (AntiparallelA, AntiparallelB),
            (PerpendicularA, PerpendicularB),
        ] {
            for (acc, l) in [(0.7, 0.4), (2.0, 1.0), (3.0, 2.5)] {
                let a = Trajectory::new(ka, acc, l).unwrap();
                let b = Trajectory::new(kb, acc, l).unwrap();
                for tau in [-1.3, -0.2, 0.0, 0.6, 1.7] {
                    let p = a.point(tau);
                    for tau2 in [-1.1, 0.0, 0.3, 1.4] {
                        let q = b.point(tau2);
                        let (dt, d) = (p.t - q.t, p.distance(&q));
                        let coord = dt * dt - d * d;
                        let (v, _, noise) = a.closed_interval(tau, &b, tau2).unwrap();
                        assert!(
                            (v - coord).abs() < 1e-12 * (1.0 + dt * dt),
                            "{kb:?} {tau} {tau2}"
                        );
                        assert!(noise < 1e-12 * (1.0 + dt * dt + d * d));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_intervals_survive_large_proper_times() {
        // At aτ = 40 the coordinates are ~e^40. The only root in the window is
        // on the past cone, where sinh aτ′ → 1 + aL as τ grows.
        let (acc, l) = (4.0, 0.5);
        let a = Trajectory::new(TrajectoryKind::PerpendicularA, acc, l).unwrap();
        let b = Trajectory::new(TrajectoryKind::PerpendicularB, acc, l).unwrap();
        let roots = light_cone_roots(&a, 10.0, &b, -10.0, 10.0);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - (1.0 + acc * l).asinh() / acc).abs() < 1e-12);
    }

    #[test]
    fn closed_thermal_form_rejects_accelerated_pairs() {
        let a = Trajectory::new(TrajectoryKind::ParallelA, 1.0, 1.0).unwrap();
        let b = Trajectory::new(TrajectoryKind::ParallelB, 1.0, 1.0).unwrap();
        let w = WightmanEvaluator::thermal_closed(0.2).unwrap();
        let r = generic_udw(&a, &b, &w, &DetectorParams::default());
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn mirrored_wedges_never_touch_the_light_cone() {
        // aL = 2 puts B on the mirror hyperbola of A: spacelike for every pair
        // of proper times, so X is real and reduces to a single integral
        // over τ + τ′.
        let a = Trajectory::new(TrajectoryKind::AntiparallelA, 2.0, 1.0).unwrap();
        let b = Trajectory::new(TrajectoryKind::AntiparallelB, 2.0, 1.0).unwrap();
        for i in -40..=40 {
            assert!(
                light_cone_roots(&a, 0.25 * i as f64, &b, -10.0, 10.0).is_empty(),
                "{i}"
            );
        }
        let opts = GenericOptions {
            treatment: PoleTreatment::PrincipalValue,
            quantities: Quantities::X,
            ..GenericOptions::default()
        };
        let det = DetectorParams::with_gap(0.5).unwrap();
        let o = generic_udw_with(&a, &b, &WightmanEvaluator::vacuum(), &det, &opts).unwrap();
        let exact = -0.071_567_081_494_230_320_06;
        assert!((o.corr_x.re - exact).abs() < 1e-9, "{}", o.corr_x);
        assert!(o.corr_x.im.abs() < 1e-12);
    }
}

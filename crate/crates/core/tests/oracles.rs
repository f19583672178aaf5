//! The reduced single integrals against the direct double integrals, and the
//! closed forms they must reduce to.

use std::f64::consts::PI;

use udw_core::harvest::{
    evaluate_scenario, generic_udw_with, p_vacuum, transition_probability, x_accelerated,
    x_thermal, x_vacuum_static, DetectorParams, GenericOptions, PoleTreatment, Quantities,
    Scenario, ScenarioKind,
};
use udw_core::specfun::erfc;
use udw_core::wightman::{
    thermal_wightman_adaptive, thermal_wightman_closed, vacuum_wightman, Trajectory,
    TrajectoryKind, WightmanEvaluator,
};
use udw_core::Complex64;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn pair(ka: TrajectoryKind, kb: TrajectoryKind, a: f64, l: f64) -> (Trajectory, Trajectory) {
    (
        Trajectory::new(ka, a, l).unwrap(),
        Trajectory::new(kb, a, l).unwrap(),
    )
}

#[test]
fn accelerated_pair_matches_direct_integration() {
    let det = DetectorParams::with_gap(1.0).unwrap();
    let (ta, tb) = pair(
        TrajectoryKind::ParallelA,
        TrajectoryKind::ParallelB,
        1.0,
        1.0,
    );
    let o = generic_udw_with(
        &ta,
        &tb,
        &WightmanEvaluator::vacuum(),
        &det,
        &GenericOptions::default(),
    )
    .unwrap();
    let p = transition_probability(&det, 1.0).unwrap();
    let x = x_accelerated(&det, 1.0, 1.0).unwrap();
    assert!((o.p_a - p).abs() <= 1e-4 * p, "{} {p}", o.p_a);
    assert!((o.p_b - p).abs() <= 1e-4 * p);
    assert!(rel(o.corr_x, x) <= 1e-4, "{} {x}", o.corr_x);
}

#[test]
fn thermal_pair_matches_direct_integration() {
    let det = DetectorParams::with_gap(2.0).unwrap();
    let t = 1.0 / (2.0 * PI);
    let (ta, tb) = pair(
        TrajectoryKind::StaticAtOrigin,
        TrajectoryKind::StaticAtL,
        0.0,
        0.5,
    );
    let w = WightmanEvaluator::thermal_closed(t).unwrap();
    let o = generic_udw_with(&ta, &tb, &w, &det, &GenericOptions::default()).unwrap();
    let x = x_thermal(&det, t, 0.5).unwrap();
    assert!(rel(o.corr_x, x) <= 1e-4, "{} {x}", o.corr_x);
    // Unruh: a static detector in the bath responds like an accelerated one.
    let p = transition_probability(&det, 1.0).unwrap();
    assert!((o.p_a - p).abs() <= 1e-4 * p, "{} {p}", o.p_a);
}

#[test]
fn pole_treatments_agree() {
    let det = DetectorParams::with_gap(0.5).unwrap();
    for (ka, kb) in [
        (TrajectoryKind::AntiparallelA, TrajectoryKind::AntiparallelB),
        (
            TrajectoryKind::PerpendicularA,
            TrajectoryKind::PerpendicularB,
        ),
    ] {
        let (ta, tb) = pair(ka, kb, 1.0, 0.5);
        let run = |treatment| {
            let g = GenericOptions {
                treatment,
                quantities: Quantities::X,
                ..GenericOptions::default()
            };
            generic_udw_with(&ta, &tb, &WightmanEvaluator::vacuum(), &det, &g)
                .unwrap()
                .corr_x
        };
        let (pv, reg) = (
            run(PoleTreatment::PrincipalValue),
            run(PoleTreatment::Regulated),
        );
        assert!(rel(pv, reg) <= 1e-5, "{ka:?}: {pv} {reg}");
    }
}

#[test]
fn antiparallel_pair_at_the_horizon_distance() {
    // With aL = 2 the signals never meet, so X is real. Frozen from an
    // independent 30-digit quadrature.
    let det = DetectorParams::with_gap(0.5).unwrap();
    let o = evaluate_scenario(
        &det,
        &Scenario::new(ScenarioKind::AntiparallelAcc, 2.0, 1.0).unwrap(),
    )
    .unwrap();
    let want = -0.071567081494230320;
    assert!(
        (o.corr_x.re - want).abs() <= 1e-6 * want.abs(),
        "{}",
        o.corr_x
    );
    assert!(o.corr_x.im.abs() <= 1e-8);
}

#[test]
fn weak_acceleration_is_the_inertial_response() {
    for gap in [0.5, 1.0, 2.0] {
        let det = DetectorParams::with_gap(gap).unwrap();
        let closed = (-gap * gap).exp() - PI.sqrt() * gap * erfc(gap).unwrap();
        let closed = closed / (4.0 * PI);
        let p = transition_probability(&det, 1e-3).unwrap();
        assert!((p - closed).abs() <= 1e-4 * closed, "{gap}: {p} {closed}");
        assert!((p_vacuum(&det).unwrap() - closed).abs() <= 1e-12 * closed);
    }
}

#[test]
fn cold_bath_is_the_vacuum() {
    // The leading correction is T²/12, so T = 1e-4 sits well inside 1e-6.
    let cold = 1e-4;
    for dt in [-2.0, -0.5, 0.0, 0.3] {
        for r in [0.6, 1.0, 3.0] {
            let v = vacuum_wightman(dt, r, 1e-12).unwrap();
            let t = thermal_wightman_closed(dt, r, cold, 1e-12).unwrap();
            assert!(rel(t, v) <= 1e-6, "{dt} {r}: {t} {v}");
        }
    }
    let det = DetectorParams::with_gap(1.0).unwrap();
    let diff = rel(
        x_thermal(&det, cold, 1.0).unwrap(),
        x_vacuum_static(&det, 1.0).unwrap(),
    );
    assert!(diff <= 1e-6, "{diff}");
}

#[test]
fn image_sum_is_the_closed_form() {
    for (dt, r, t) in [(-1.0, 2.0, 0.3), (0.4, 0.5, 1.0), (-3.0, 1.0, 0.1)] {
        let z = thermal_wightman_closed(dt, r, t, 0.0).unwrap();
        let (s, _) = thermal_wightman_adaptive(dt, r, t, 0.0).unwrap();
        assert!(rel(s, z) <= 1e-10, "{dt} {r} {t}: {s} {z}");
    }
}

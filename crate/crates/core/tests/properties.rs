use proptest::prelude::*;

use udw_core::harvest::{
    concurrence, p_vacuum, transition_probability, x_vacuum_static, DetectorParams,
};
use udw_core::quad::{integrate_1d, integrate_pv_delta, Integrator, Smooth, Tolerance};
use udw_core::specfun::{dawson, erfc};
use udw_core::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_is_linear(al in -3.0..3.0f64, be in -3.0..3.0f64, w in 0.2..4.0f64) {
        let f = |s: f64| c((-s * s).exp());
        let g = move |s: f64| c((w * s).cos() / (1.0 + s * s));
        let (lo, hi) = (-4.0, 5.0);
        let both = integrate_1d(|s| f(s) * al + g(s) * be, lo, hi, 1e-13).unwrap().value;
        let apart = integrate_1d(f, lo, hi, 1e-13).unwrap().value * al
            + integrate_1d(g, lo, hi, 1e-13).unwrap().value * be;
        prop_assert!((both - apart).norm() <= 1e-11, "{} {}", both, apart);
    }

    #[test]
    fn principal_value_is_the_small_eps_limit(r in -0.8..0.8f64, k in -2.0..2.0f64) {
        // ∫ g/(s − r − iε) → PV ∫ g/(s − r) + iπ g(r).
        let g = move |s: f64| c((-s * s).exp() * (1.0 + k * s));
        let exact = integrate_pv_delta(g, &Smooth(move |s| s - r), &[r], -3.0, 3.0, 1e-12)
            .unwrap()
            .value;
        let eps = 1e-7;
        let q = Integrator::new(Tolerance::absolute(1e-12));
        let reg = q
            .integrate_points(
                |s| g(s) / Complex64::new(s - r, -eps),
                &[-3.0, r - 1e-3, r, r + 1e-3, 3.0],
            )
            .unwrap()
            .value;
        prop_assert!((exact - reg).norm() <= 1e-5, "{} {}", exact, reg);
    }

    #[test]
    fn concurrence_is_symmetric_and_non_negative(
        pa in 0.0..1.0f64, pb in 0.0..1.0f64, x in 0.0..1.0f64,
    ) {
        let k = concurrence(pa, pb, x).unwrap();
        prop_assert!(k >= 0.0);
        prop_assert_eq!(k, concurrence(pb, pa, x).unwrap());
        prop_assert_eq!(k == 0.0, x <= (pa * pb).sqrt());
    }

    #[test]
    fn error_function_symmetries(x in -6.0..6.0f64) {
        prop_assert!((erfc(x).unwrap() + erfc(-x).unwrap() - 2.0).abs() <= 4e-16);
        prop_assert_eq!(dawson(-x).unwrap(), -dawson(x).unwrap());
    }

    #[test]
    fn vacuum_quantities_scale_with_coupling(gap in 0.1..3.0f64, lam in 0.1..10.0f64, l in 0.01..8.0f64) {
        let unit = DetectorParams::with_gap(gap).unwrap();
        let det = DetectorParams::new(gap, lam).unwrap();
        let l2 = lam * lam;
        let (p1, p) = (p_vacuum(&unit).unwrap(), p_vacuum(&det).unwrap());
        prop_assert!(p1 > 0.0 && (p - l2 * p1).abs() <= 1e-14 * p);
        let (x1, x) = (x_vacuum_static(&unit, l).unwrap(), x_vacuum_static(&det, l).unwrap());
        prop_assert!((x - x1 * l2).norm() <= 1e-14 * x.norm());
    }

    #[test]
    fn response_falls_with_gap(gap in 0.1..2.5f64, a in 0.1..4.0f64) {
        let lo = transition_probability(&DetectorParams::with_gap(gap).unwrap(), a).unwrap();
        let hi = transition_probability(&DetectorParams::with_gap(gap + 0.25).unwrap(), a).unwrap();
        prop_assert!(hi > 0.0 && hi < lo, "{} {}", lo, hi);
    }
}

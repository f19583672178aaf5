//! Globally adaptive Gauss-Kronrod (7/15) integration of complex integrands.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::{Error, Result};

// Kronrod abscissae (positive half, descending) and weights; every odd index
// is also a Gauss-Legendre 7 node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Value, error estimate and cost of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_err: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn scale(self, factor: Complex64) -> Self {
        QuadResult {
            value: self.value * factor,
            abs_err: self.abs_err * factor.norm(),
            evaluations: self.evaluations,
        }
    }

    /// Sum of two independent estimates; errors add.
    pub fn combine(self, other: QuadResult) -> Self {
        QuadResult {
            value: self.value + other.value,
            abs_err: self.abs_err + other.abs_err,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Result of integrating an `N`-component integrand on a shared mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecQuadResult<const N: usize> {
    pub values: [Complex64; N],
    /// Largest component error.
    pub abs_err: f64,
    pub evaluations: usize,
}

/// Stopping rule: the summed error estimate must fall below
/// `max(abs, rel · |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, magnitude: f64, resabs: f64) -> f64 {
        // Never ask for less than the rounding noise of the summation.
        let floor = 50.0 * f64::EPSILON * resabs;
        self.abs.max(self.rel * magnitude).max(floor)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    err: f64,
    resabs: f64,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Segment<N> {}
impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn max_norm<const N: usize>(v: &[Complex64; N]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<N>>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = [Complex64::new(0.0, 0.0); N];
    let mut gauss = [Complex64::new(0.0, 0.0); N];
    let mut resabs = WGK[7] * max_norm(&fc);
    for k in 0..N {
        kron[k] = fc[k] * WGK[7];
        gauss[k] = fc[k] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        resabs += WGK[j] * (max_norm(&f1) + max_norm(&f2));
        for k in 0..N {
            let s = f1[k] + f2[k];
            kron[k] += s * WGK[j];
            if j % 2 == 1 {
                gauss[k] += s * WG[j / 2];
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..N {
        kron[k] *= half;
        gauss[k] *= half;
        err = err.max((kron[k] - gauss[k]).norm());
    }
    if !err.is_finite() || kron.iter().any(|z| !z.is_finite()) {
        return Err(Error::Domain(
            "integrand is not finite on the integration range",
        ));
    }
    Ok(Segment {
        a,
        b,
        value: kron,
        err,
        resabs: resabs * half.abs(),
    })
}

/// Adaptive bisection driver shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub tol: Tolerance,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            tol: Tolerance {
                abs: 1e-12,
                rel: 1e-10,
            },
            max_intervals: 4000,
        }
    }
}

impl Integrator {
    pub fn new(tol: Tolerance) -> Self {
        Integrator {
            tol,
            ..Integrator::default()
        }
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    /// Integrates `f` over `[a, b]`; either bound may be infinite.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Complex64,
    {
        self.integrate_try(|x| Ok(f(x)), a, b)
    }

    /// Like [`Integrator::integrate`] for integrands that can fail.
    pub fn integrate_try<F>(&self, mut f: F, a: f64, b: f64) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        if a.is_nan() || b.is_nan() || !(a < b) {
            return Err(Error::Contract("integration range must satisfy a < b"));
        }
        match (a.is_finite(), b.is_finite()) {
            (true, true) => self.integrate_points_try(f, &[a, b]),
            // x = a + t/(1-t), t in [0, 1)
            (true, false) => self.integrate_points_try(
                |t| {
                    let s = 1.0 - t;
                    Ok(f(a + t / s)? / (s * s))
                },
                &[0.0, 1.0],
            ),
            // x = b - t/(1-t)
            (false, true) => self.integrate_points_try(
                |t| {
                    let s = 1.0 - t;
                    Ok(f(b - t / s)? / (s * s))
                },
                &[0.0, 1.0],
            ),
            // x = t/(1-t²) on (-1, 1)
            (false, false) => self.integrate_points_try(
                |t| {
                    let s = 1.0 - t * t;
                    Ok(f(t / s)? * ((1.0 + t * t) / (s * s)))
                },
                &[-1.0, 0.0, 1.0],
            ),
        }
    }

    /// Integrates over `points[0]..points[last]` with the interior points as
    /// forced breakpoints. `points` must be finite and strictly increasing.
    pub fn integrate_points<F>(&self, mut f: F, points: &[f64]) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Complex64,
    {
        self.integrate_points_try(|x| Ok(f(x)), points)
    }

    pub fn integrate_points_try<F>(&self, mut f: F, points: &[f64]) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let r = self.integrate_vec(|x| Ok([f(x)?]), points)?;
        Ok(QuadResult {
            value: r.values[0],
            abs_err: r.abs_err,
            evaluations: r.evaluations,
        })
    }

    /// Integrates an `N`-component integrand on one adaptive mesh; the mesh is
    /// refined until every component meets the tolerance.
    pub fn integrate_vec<const N: usize, F>(
        &self,
        mut f: F,
        points: &[f64],
    ) -> Result<VecQuadResult<N>>
    where
        F: FnMut(f64) -> Result<[Complex64; N]>,
    {
        if points.len() < 2 {
            return Err(Error::Contract(
                "at least two integration points are required",
            ));
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Contract(
                "integration points must be finite and increasing",
            ));
        }

        let mut heap = BinaryHeap::with_capacity(2 * points.len() + 16);
        let mut frozen: Vec<Segment<N>> = Vec::new();
        let mut evaluations = 0usize;
        for w in points.windows(2) {
            heap.push(gk15(&mut f, w[0], w[1])?);
            evaluations += 15;
        }

        let totals = |heap: &BinaryHeap<Segment<N>>, frozen: &[Segment<N>]| {
            let mut value = [Complex64::new(0.0, 0.0); N];
            let mut err = 0.0;
            let mut resabs = 0.0;
            for s in heap.iter().chain(frozen.iter()) {
                for (v, sv) in value.iter_mut().zip(&s.value) {
                    *v += sv;
                }
                err += s.err;
                resabs += s.resabs;
            }
            (value, err, resabs)
        };

        let floor = RESOLUTION * (points[points.len() - 1] - points[0]);
        let (mut value, mut err, mut resabs) = totals(&heap, &frozen);
        loop {
            if err <= self.tol.target(max_norm(&value), resabs) {
                break;
            }
            let Some(worst) = heap.pop() else {
                // Every remaining segment is at the resolution limit.
                return Err(not_converged(value, err, evaluations));
            };
            if heap.len() + frozen.len() + 1 >= self.max_intervals {
                heap.push(worst);
                let (value, err, _) = totals(&heap, &frozen);
                return Err(not_converged(value, err, evaluations));
            }
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) || worst.b - worst.a < floor {
                frozen.push(worst);
                continue;
            }
            let left = gk15(&mut f, worst.a, mid)?;
            let right = gk15(&mut f, mid, worst.b)?;
            evaluations += 30;
            for (k, v) in value.iter_mut().enumerate() {
                *v += left.value[k] + right.value[k] - worst.value[k];
            }
            err += left.err + right.err - worst.err;
            resabs += left.resabs + right.resabs - worst.resabs;
            heap.push(left);
            heap.push(right);
        }

        // Re-sum to shed the drift of the running updates.
        let (values, abs_err, _) = totals(&heap, &frozen);
        Ok(VecQuadResult {
            values,
            abs_err,
            evaluations,
        })
    }
}

/// Segments narrower than this fraction of the range are never split: below
/// it the nodes resolve rounding noise, not the integrand.
const RESOLUTION: f64 = 1e-12;

fn not_converged<const N: usize>(value: [Complex64; N], err: f64, evaluations: usize) -> Error {
    Error::NotConverged {
        value: value[0],
        abs_err: err,
        evaluations,
    }
}

/// One-dimensional adaptive integral to absolute tolerance `tol`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    Integrator::new(Tolerance::absolute(tol)).integrate(f, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn re(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_1d(re(|x| x * x), 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn gaussian_on_truncated_line() {
        let r = integrate_1d(re(|x| (-x * x).exp()), -10.0, 10.0, 1e-13).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn damped_cosine_on_half_line() {
        let r = integrate_1d(
            re(|x| (-x * x).exp() * (5.0 * x).cos()),
            0.0,
            f64::INFINITY,
            1e-14,
        )
        .unwrap();
        let exact = 0.5 * PI.sqrt() * (-25.0f64 / 4.0).exp();
        assert!((r.value.re - exact).abs() < 1e-12, "{}", r.value.re);
        assert!((r.value.re - 1.710_82e-3).abs() < 5e-9);
    }

    #[test]
    fn doubly_infinite_range() {
        let r = integrate_1d(
            re(|x| 1.0 / (1.0 + x * x)),
            f64::NEG_INFINITY,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!((r.value.re - PI).abs() < 1e-10);
    }

    #[test]
    fn vector_components_share_a_mesh() {
        let r = Integrator::new(Tolerance::absolute(1e-13))
            .integrate_vec(
                |x: f64| Ok([Complex64::new(x.cos(), 0.0), Complex64::new(0.0, x * x)]),
                &[0.0, 1.0, 2.0],
            )
            .unwrap();
        assert!((r.values[0].re - 2.0f64.sin()).abs() < 1e-13);
        assert!((r.values[1].im - 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn range_must_be_ordered() {
        assert!(matches!(
            integrate_1d(re(|x| x), 1.0, 0.0, 1e-8),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        // Non-integrable at 0; refinement can never settle.
        let r = Integrator::new(Tolerance::absolute(1e-12))
            .with_max_intervals(50)
            .integrate(re(|x| 1.0 / x), 1e-300, 1.0);
        match r {
            Err(Error::NotConverged {
                value,
                abs_err,
                evaluations,
            }) => {
                assert!(value.re > 0.0 && abs_err > 0.0 && evaluations > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

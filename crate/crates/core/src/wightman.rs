//! Detector worldlines and massless scalar two-point functions.
//!
//! All Wightman functions here are the boundary values `W(Δt − iε, r)` of
//! `−1/(4π²(Δt² − r²))` (vacuum) or of its thermal image sum, with Δt the
//! coordinate-time difference `t − t′` and `r` the spatial distance.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::PI;

use crate::quad::RegulatorPolicy;
use crate::{Error, Result};

const INV_4PI2: f64 = 1.0 / (4.0 * PI * PI);

/// An event in Minkowski space, in units of the switching width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        SpacetimePoint { t, x, y, z }
    }

    /// Spatial distance to `other`.
    pub fn distance(&self, other: &SpacetimePoint) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryKind {
    ParallelA,
    ParallelB,
    AntiparallelA,
    AntiparallelB,
    PerpendicularA,
    PerpendicularB,
    StaticAtOrigin,
    StaticAtL,
}

impl TrajectoryKind {
    pub fn is_accelerated(self) -> bool {
        !matches!(
            self,
            TrajectoryKind::StaticAtOrigin | TrajectoryKind::StaticAtL
        )
    }
}

/// A proper-time parameterised worldline.
///
/// Every `A` kind starts at `x = 1/a` and accelerates along `+x`. The `B`
/// kinds sit a laboratory distance `L` away at `τ = 0`:
///
/// * parallel: `(a⁻¹ sinh aτ, a⁻¹ cosh aτ + L, 0, 0)`
/// * antiparallel: `(a⁻¹ sinh aτ, 2/a − L − a⁻¹ cosh aτ, 0, 0)`, the mirror
///   image of `A` accelerating along `−x`, so the pair separates for all `τ`
/// * perpendicular: `(a⁻¹ sinh aτ, a⁻¹ + L, a⁻¹(cosh aτ − 1), 0)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    kind: TrajectoryKind,
    accel: f64,
    separation: f64,
}

impl Trajectory {
    pub fn new(kind: TrajectoryKind, accel: f64, separation: f64) -> Result<Self> {
        if !(separation >= 0.0 && separation.is_finite()) {
            return Err(Error::Domain("separation must be finite and non-negative"));
        }
        if kind.is_accelerated() {
            if !(accel > 0.0 && accel.is_finite()) {
                return Err(Error::Domain("accelerated trajectories need a > 0"));
            }
        } else if !(accel >= 0.0 && accel.is_finite()) {
            return Err(Error::Domain(
                "acceleration must be finite and non-negative",
            ));
        }
        Ok(Trajectory {
            kind,
            accel,
            separation,
        })
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn accel(&self) -> f64 {
        self.accel
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn point(&self, tau: f64) -> SpacetimePoint {
        use TrajectoryKind::*;
        let (a, l) = (self.accel, self.separation);
        match self.kind {
            StaticAtOrigin => SpacetimePoint::new(tau, 0.0, 0.0, 0.0),
            StaticAtL => SpacetimePoint::new(tau, l, 0.0, 0.0),
            _ => {
                let (s, c) = ((a * tau).sinh() / a, (a * tau).cosh() / a);
                match self.kind {
                    ParallelA | AntiparallelA | PerpendicularA => {
                        SpacetimePoint::new(s, c, 0.0, 0.0)
                    }
                    ParallelB => SpacetimePoint::new(s, c + l, 0.0, 0.0),
                    AntiparallelB => SpacetimePoint::new(s, 2.0 / a - l - c, 0.0, 0.0),
                    PerpendicularB => SpacetimePoint::new(s, 1.0 / a + l, c - 1.0 / a, 0.0),
                    StaticAtOrigin | StaticAtL => unreachable!(),
                }
            }
        }
    }

    /// Four-velocity `dx^μ/dτ`.
    pub fn velocity(&self, tau: f64) -> SpacetimePoint {
        use TrajectoryKind::*;
        let a = self.accel;
        match self.kind {
            StaticAtOrigin | StaticAtL => SpacetimePoint::new(1.0, 0.0, 0.0, 0.0),
            _ => {
                let (sh, ch) = ((a * tau).sinh(), (a * tau).cosh());
                match self.kind {
                    ParallelA | AntiparallelA | PerpendicularA | ParallelB => {
                        SpacetimePoint::new(ch, sh, 0.0, 0.0)
                    }
                    AntiparallelB => SpacetimePoint::new(ch, -sh, 0.0, 0.0),
                    PerpendicularB => SpacetimePoint::new(ch, 0.0, sh, 0.0),
                    StaticAtOrigin | StaticAtL => unreachable!(),
                }
            }
        }
    }

    /// `(σ², ∂σ²/∂τ′, noise)` between `self(τ)` and `other(τ′)` with the
    /// large hyperbolic terms cancelled by hand. Only the `A`–`B` pairs of one
    /// kind have it; `noise` bounds the rounding error of `σ²`.
    pub(crate) fn closed_interval(
        &self,
        tau: f64,
        other: &Trajectory,
        tau2: f64,
    ) -> Option<(f64, f64, f64)> {
        use TrajectoryKind::*;
        if self.accel != other.accel || self.separation != other.separation {
            return None;
        }
        let (a, l) = (self.accel, self.separation);
        let a2 = a * a;
        let noise = |terms: f64| 16.0 * f64::EPSILON * terms / a2;
        match (self.kind, other.kind) {
            (ParallelA, ParallelB) => {
                let s = (0.5 * a * (tau - tau2)).sinh();
                let h = (0.5 * a * (tau + tau2)).sinh();
                let al = a * l;
                let v = 4.0 * s * (s + al * h) - al * al;
                let slope = -2.0 * (a * (tau - tau2)).sinh() / a - 2.0 * l * (a * tau2).sinh();
                let terms = 4.0 * s * s + 4.0 * (al * s * h).abs() + al * al;
                Some((v / a2, slope, noise(terms)))
            }
            (AntiparallelA, AntiparallelB) => {
                let k = 2.0 - a * l;
                let s = (0.5 * a * (tau - tau2)).sinh();
                let d = (0.5 * a * (tau - tau2)).cosh();
                // 2 cosh(aΣ/2) − k cosh(aΔ/2) without the O(1) cancellation.
                let prod = 4.0 * (0.5 * a * tau).sinh() * (0.5 * a * tau2).sinh();
                let m = prod + a * l * d;
                let p = k * s;
                let v = (p - m) * (p + m);
                let slope = 2.0 * (k * (a * tau2).sinh() - (a * (tau + tau2)).sinh()) / a;
                let mt = prod.abs() + a * l * d;
                Some((v / a2, slope, noise(p * p + mt * mt)))
            }
            (PerpendicularA, PerpendicularB) => {
                let m = 1.0 + a * l;
                let (sh, shp) = ((a * tau).sinh(), (a * tau2).sinh());
                let c2 = 2.0 * (0.5 * a * tau2).sinh().powi(2);
                // m (cosh aτ − 1) − sinh aτ sinh aτ′. Small aτ keeps every term
                // O(a²); large aτ folds the leading exponentials together.
                let lead = if (a * tau).abs() < 1.0 {
                    m * 2.0 * (0.5 * a * tau).sinh().powi(2) - sh * shp
                } else if tau > 0.0 {
                    sh * (m - shp) + m * ((-a * tau).exp() - 1.0)
                } else {
                    m * ((a * tau).exp() - 1.0) - sh * (m + shp)
                };
                let v = 2.0 * lead + 2.0 * c2 - a * a * l * l;
                let slope = 2.0 * (shp - sh * (a * tau2).cosh()) / a;
                let terms = 2.0 * (sh.abs() * (m + shp.abs()) + m) + 2.0 * c2 + a * a * l * l;
                Some((v / a2, slope, noise(terms)))
            }
            _ => None,
        }
    }

    /// Coordinate time is the same increasing function of τ for every kind
    /// of a given acceleration; this inverts it.
    pub fn proper_time_at(&self, t: f64) -> f64 {
        if self.kind.is_accelerated() {
            (self.accel * t).asinh() / self.accel
        } else {
            t
        }
    }
}

/// Position of `traj` at proper time `tau`.
pub fn trajectory_point(traj: &Trajectory, tau: f64) -> Result<SpacetimePoint> {
    if !tau.is_finite() {
        return Err(Error::Domain("proper time must be finite"));
    }
    Ok(traj.point(tau))
}

fn finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("Wightman arguments must be finite"))
    }
}

/// `−1/(4π²[(Δt − iε)² − r²])`.
pub fn vacuum_wightman(dt: f64, r: f64, eps: f64) -> Result<Complex64> {
    finite(&[dt, r, eps])?;
    if !(eps > 0.0) {
        return Err(Error::Domain("regulator eps must be positive"));
    }
    Ok(vacuum_at(Complex64::new(dt, -eps), r))
}

fn vacuum_at(z: Complex64, r: f64) -> Complex64 {
    -INV_4PI2 / (z * z - r * r)
}

/// The `m`-th thermal image `−1/(4π²[(z − i m/T)² − r²])` at complex time
/// argument `z = Δt − iε`. Shifting `z` by `−i/T` maps image `m` onto `m + 1`.
pub fn thermal_image_term(z: Complex64, r: f64, temperature: f64, m: i64) -> Complex64 {
    vacuum_at(z - Complex64::new(0.0, m as f64 / temperature), r)
}

/// Symmetric partial image sum over `|m| <= n_max`.
pub fn thermal_wightman_sum(
    dt: f64,
    r: f64,
    temperature: f64,
    n_max: u64,
    eps: f64,
) -> Result<Complex64> {
    finite(&[dt, r, temperature, eps])?;
    if !(temperature > 0.0) {
        return Err(Error::Domain("thermal Wightman function needs T > 0"));
    }
    let z = Complex64::new(dt, -eps);
    let mut sum = thermal_image_term(z, r, temperature, 0);
    for m in 1..=n_max as i64 {
        sum += thermal_image_term(z, r, temperature, m) + thermal_image_term(z, r, temperature, -m);
    }
    Ok(sum)
}

/// Hard cap on the image index of the adaptive sum.
pub const IMAGE_CAP: u64 = 1_000_000;

/// The full image sum. The tail beyond `M` is summed by Euler–Maclaurin
/// through `B₈`; `M` doubles until two successive totals agree to `1e-14`.
///
/// Returns the value and the final `M`.
pub fn thermal_wightman_adaptive(
    dt: f64,
    r: f64,
    temperature: f64,
    eps: f64,
) -> Result<(Complex64, u64)> {
    finite(&[dt, r, temperature, eps])?;
    if !(temperature > 0.0) {
        return Err(Error::Domain("thermal Wightman function needs T > 0"));
    }
    let z = Complex64::new(dt, -eps);
    let mut m = 32u64.max((4.0 * (z.norm() + r) * temperature).ceil() as u64);
    let mut prev = summed_with_tail(z, r, temperature, m);
    while m < IMAGE_CAP {
        let next_m = (2 * m).min(IMAGE_CAP);
        let next = summed_with_tail(z, r, temperature, next_m);
        if (next - prev).norm() <= 1e-14 {
            return Ok((next, next_m));
        }
        prev = next;
        m = next_m;
    }
    Err(Error::NotConverged {
        value: prev,
        abs_err: f64::NAN,
        evaluations: m as usize,
    })
}

fn summed_with_tail(z: Complex64, r: f64, temperature: f64, m: u64) -> Complex64 {
    let mut sum = thermal_image_term(z, r, temperature, 0);
    for k in 1..=m as i64 {
        sum += thermal_image_term(z, r, temperature, k) + thermal_image_term(z, r, temperature, -k);
    }
    sum + image_tail(z, r, 1.0 / temperature, m as f64)
}

// Σ_{m>M} φ(m) with φ(m) = −(1/4π²) Σ_± 1/(w±² − r²), w± = z ∓ iβm, expanded
// as Σ_k r^{2k} w^{-2k-2} (|r/w| ≤ 1/4 because M ≥ 4(|z| + r)T).
fn image_tail(z: Complex64, r: f64, beta: f64, m: f64) -> Complex64 {
    // B_{2k}/(2k)! for k = 1..4
    const EM: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut tail = Complex64::new(0.0, 0.0);
    for sign in [-1.0, 1.0] {
        let c = Complex64::new(0.0, sign * beta); // dw/dm
        let w = z + c * m;
        let q = (r / w.norm()).powi(2);
        let mut rk = 1.0; // r^{2k}
        let mut weight = 1.0; // |r/w|^{2k}
        for k in 0..40 {
            let n = (2 * k + 2) as f64;
            let inv = w.powf(-n);
            let integral = inv * w / (c * (n - 1.0));
            let mut part = integral - inv * 0.5;
            // φ^{(j)} for odd j = 1, 3, 5, 7
            let mut deriv = inv;
            let mut j = 0usize;
            for (idx, coeff) in EM.iter().enumerate() {
                let target = 2 * idx + 1;
                while j < target {
                    deriv = -deriv * (n + j as f64) * c / w;
                    j += 1;
                }
                part -= deriv * *coeff;
            }
            tail += part * rk;
            weight *= q;
            rk *= r * r;
            if weight < 1e-18 || r == 0.0 {
                break;
            }
        }
    }
    tail * (-INV_4PI2)
}

/// `coth w` without overflow for large `|Re w|`.
fn coth(w: Complex64) -> Complex64 {
    if w.re < 0.0 {
        return -coth(-w);
    }
    let e = (-2.0 * w).exp();
    (1.0 + e) / (1.0 - e)
}

/// Thermal Wightman function between static detectors a distance `L` apart:
/// `(T/(8πL)) {coth[πT(L − Δt + iε)] + coth[πT(L + Δt − iε)]}`.
pub fn thermal_wightman_closed(dt: f64, l: f64, temperature: f64, eps: f64) -> Result<Complex64> {
    finite(&[dt, l, temperature, eps])?;
    if !(l > 0.0) {
        return Err(Error::Domain("closed thermal form needs L > 0"));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain("thermal Wightman function needs T > 0"));
    }
    Ok(closed_at(Complex64::new(dt, -eps), l, temperature))
}

fn closed_at(z: Complex64, l: f64, temperature: f64) -> Complex64 {
    let pt = PI * temperature;
    (coth((l - z) * pt) + coth((l + z) * pt)) * (temperature / (8.0 * PI * l))
}

// Coincident limit r = 0 of the image sum: −T²/(4 sinh²(πT z)).
fn coincident_thermal(z: Complex64, temperature: f64) -> Complex64 {
    let s = (z * (PI * temperature)).sinh();
    -temperature * temperature / (4.0 * s * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WightmanKind {
    Vacuum,
    /// Closed coth form, exact for any fixed spatial distance.
    ThermalClosed,
    /// Image sum; `image_cutoff = 0` requests the adaptive sum.
    ThermalSum,
}

/// A two-point function with its regulator policy, as consumed by the
/// generic engine.
#[derive(Debug, Clone, PartialEq)]
pub struct WightmanEvaluator {
    pub kind: WightmanKind,
    pub temperature: f64,
    pub regulator: RegulatorPolicy,
    pub image_cutoff: u64,
}

impl WightmanEvaluator {
    pub fn vacuum() -> Self {
        WightmanEvaluator {
            kind: WightmanKind::Vacuum,
            temperature: 0.0,
            regulator: RegulatorPolicy::default(),
            image_cutoff: 0,
        }
    }

    pub fn thermal_closed(temperature: f64) -> Result<Self> {
        Self::thermal(WightmanKind::ThermalClosed, temperature, 0)
    }

    pub fn thermal_sum(temperature: f64, image_cutoff: u64) -> Result<Self> {
        Self::thermal(WightmanKind::ThermalSum, temperature, image_cutoff)
    }

    fn thermal(kind: WightmanKind, temperature: f64, image_cutoff: u64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::Domain("thermal evaluators need T > 0"));
        }
        Ok(WightmanEvaluator {
            kind,
            temperature,
            regulator: RegulatorPolicy::default(),
            image_cutoff,
        })
    }

    pub fn with_regulator(mut self, regulator: RegulatorPolicy) -> Result<Self> {
        regulator.validate()?;
        self.regulator = regulator;
        Ok(self)
    }

    /// `W(Δt − iε, r)`.
    pub fn eval(&self, dt: f64, r: f64, eps: f64) -> Result<Complex64> {
        match self.kind {
            WightmanKind::Vacuum => vacuum_wightman(dt, r, eps),
            WightmanKind::ThermalClosed => {
                finite(&[dt, r, eps])?;
                let z = Complex64::new(dt, -eps);
                if r < 1e-6 * z.norm().max(1e-300) {
                    Ok(coincident_thermal(z, self.temperature))
                } else {
                    Ok(closed_at(z, r, self.temperature))
                }
            }
            WightmanKind::ThermalSum if self.image_cutoff == 0 => {
                thermal_wightman_adaptive(dt, r, self.temperature, eps).map(|(v, _)| v)
            }
            WightmanKind::ThermalSum => {
                thermal_wightman_sum(dt, r, self.temperature, self.image_cutoff, eps)
            }
        }
    }

    /// `lim_{ε→0} W · (Δt² − r²)`: smooth across the light cone, where it
    /// equals `−1/(4π²)` for every kind.
    pub fn regular_part(&self, dt: f64, r: f64) -> Result<f64> {
        finite(&[dt, r])?;
        let sigma2 = dt * dt - r * r;
        let images = match self.kind {
            WightmanKind::Vacuum => return Ok(-INV_4PI2),
            // The m ≠ 0 images directly: subtracting the vacuum from the
            // closed form cancels catastrophically near the cone.
            _ => {
                let z = Complex64::new(dt, 0.0);
                let t = self.temperature;
                let adaptive = self.kind == WightmanKind::ThermalClosed || self.image_cutoff == 0;
                let n = if adaptive {
                    32u64.max((4.0 * (dt.abs() + r) * t).ceil() as u64)
                } else {
                    self.image_cutoff
                };
                let mut s = Complex64::new(0.0, 0.0);
                for m in 1..=n as i64 {
                    s += thermal_image_term(z, r, t, m) + thermal_image_term(z, r, t, -m);
                }
                if adaptive {
                    s += image_tail(z, r, 1.0 / t, n as f64);
                }
                s.re
            }
        };
        Ok(-INV_4PI2 + sigma2 * images)
    }
}

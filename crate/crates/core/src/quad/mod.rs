//! Adaptive quadrature: Gauss-Kronrod kernel, principal value plus delta
//! pole handling, ε extrapolation and nested 2D integration.

mod extrapolate;
mod gk;
mod pv;
mod window;

pub use extrapolate::{extrapolate_eps, Extrapolated, RegulatorPolicy};
pub use gk::{integrate_1d, Integrator, QuadResult, Tolerance, VecQuadResult};
pub use pv::{
    delta_sum, integrate_pv_delta, principal_value, Denominator, Smooth, WithSlope, ENDPOINT_GAP,
    EXCISION_RADIUS, MIN_SLOPE,
};
pub use window::{
    integrate_2d, integrate_nested, tail_mass, Extent, WindowSpec, RADIUS_QUARTER, RADIUS_UNIT,
};

//! Leading-order entanglement harvesting for two Unruh-DeWitt detectors.
//!
//! The crate evaluates transition probabilities, the correlation term `X`
//! and the concurrence for three detector configurations: uniformly
//! accelerated pairs in the Minkowski vacuum, static pairs in a thermal bath,
//! and static pairs in the vacuum. Everything is expressed in units of the
//! Gaussian switching width (`σ = 1`), so gaps, accelerations, temperatures
//! and separations are the dimensionless groups `Ωσ`, `aσ`, `Tσ` and `L/σ`.
//!
//! Module map:
//!
//! * [`specfun`]: complementary error function and Dawson function.
//! * [`quad`]: adaptive Gauss-Kronrod kernels, principal value plus delta
//!   pole handling, and `ε → 0` extrapolation.
//! * [`wightman`]: detector worldlines and vacuum/thermal two-point functions.
//! * [`harvest`]: the reduced evaluators, the generic trajectory-driven
//!   engine, and concurrence.
//! * [`asymptotics`]: closed-form approximants used as regime validators.
//! * [`analysis`]: `L_max`/`L_crit` finders, sweeps and extremum detection.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod asymptotics;
mod error;
pub mod harvest;
pub mod quad;
pub mod specfun;
pub mod wightman;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Command-line front end for `udw-core`: single points, sweeps, `L_max` and
//! `L_crit` searches and the five figures, written as CSV or JSON.

pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;

pub use error::{CliError, Result};

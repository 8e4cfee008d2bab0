//! Simulation of meandered textile coils for body-scale wireless power
//! transfer and passive inductive telemetry.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds conductor paths (meander, helical, loop) and the
//!   cylindrical body model with its labelled evaluation grid.
//! * [`magnetics`] evaluates quasi-static fields (Biot-Savart), extracts
//!   self and mutual inductance (Neumann) and models AC resistance.
//! * [`circuit`] solves the series-series resonant link and derives
//!   exposure-limited transmit power.
//! * [`telemetry`] models passive LC tags read through a twin-coil bridge.
//! * [`scenarios`] binds the above into reproducible experiment harnesses.
//! * [`commands`] holds the per-subcommand configs and runners.
//! * [`io`] handles configuration overrides, CSV export and atomic output.

pub mod circuit;
pub mod commands;
pub mod error;
pub mod geometry;
pub mod io;
pub mod magnetics;
pub mod scenarios;
pub mod telemetry;
mod vec3;

pub use error::{Error, Result};
pub use vec3::Vec3;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

//! Singular geometry and numerics for a three-timescale ENSO oscillator
//!
//! ```text
//! x' = x (x + y + c (1 - tanh(x + z))) + rho delta (x^2 - a x)
//! y' = -rho delta (a y + x^2)
//! z' = delta (k - z - x / 2)
//! ```
//!
//! [`geometry`] covers the critical manifold, fold lines and folded
//! singularities. [`slowfast`] holds the reduced and intermediate flows and the
//! way-in/way-out map on the plane `x = 0`. [`regimes`] classifies `(c, k)` into
//! the regions `V1`..`V6` and computes the thresholds `a-`, `a+`, `a_p`.
//! [`simulate`] integrates the full system with event detection, and
//! [`analysis`] labels trajectories as steady, relaxation or MMO.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod model;
mod quadrature;
pub mod regimes;
pub mod simulate;
pub mod slowfast;

pub use error::{Error, Result};
pub use model::{Params, State};

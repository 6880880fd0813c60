//! SEIZ rumor-propagation model.
//!
//! * [`model`] holds parameters, states and the (controlled) right-hand side.
//! * [`analysis`] computes the reproduction number, the rumor-free Jacobian
//!   and its stability verdict, and locates endemic steady states.
//! * [`integrator`] is a fixed-step RK4 used forward for states and backward
//!   for costates.
//! * [`control`] contains the Hamiltonian, the costate system and the
//!   forward-backward sweep for the three-control problem.
//! * [`runner`] loads scenario configs and writes CSV and report files.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod control;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod runner;

pub use error::{Error, Result};
pub use model::{ControlSwitches, ControlValue, ModelParams, State};

//! Simulation and control of a quadrotor whose arms fold vertically.
//!
//! - [`morphology`]: fold-angle dependent lengths, CoG and inertia.
//! - [`dynamics`]: Euler-angle rigid-body plant, mixer and synthetic disturbances.
//! - [`observer`]: momentum-based force/torque disturbance observer.
//! - [`controller`]: cascade adaptive sliding-mode controller.
//! - [`harness`]: scenario configs, closed-loop runs, CSV logs, metrics.

// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod math;
pub mod dynamics;
pub mod morphology;
pub mod observer;
pub mod controller;
pub mod harness;
pub mod parallel;

pub use error::{Error, Result};

//! Kinematics, singularity certification and closed-loop line-of-sight
//! stabilization for a 3-RRR spherical parallel manipulator with coaxial
//! input shafts.
//!
//! The crate is organised around four workflows:
//!
//! * [`kinematics`]: geometric closure, inverse/forward geometric models,
//!   Jacobians and angular-rate maps.
//! * [`singularity`]: Type-1 discriminant scans and Kantorovich-based
//!   certification of a prescribed workspace, backed by [`interval`].
//! * [`control`]: the speed-loop controller, actuator and sensor models,
//!   frequency-domain margins and zero-order-hold discretization.
//! * [`simulation`]: the discrete-time stabilization experiment driven by
//!   carrier wave motion.
//!
//! [`config`] and [`cli`] bind these to the `cospm` command-line tool.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod interval;
pub mod kinematics;
pub mod simulation;
pub mod singularity;

pub use error::{Error, Result};
pub use kinematics::{DesignParameters, JointVector, Orientation};

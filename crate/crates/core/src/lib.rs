//! Data-driven PID tuning against a first-order reference model, with an
//! optional predictive outer loop built on the same model.
//!
//! The pipeline takes one closed-loop input/output record, searches for PID
//! gains and a reference time constant whose fictitious closed loop best
//! reproduces the record, and then runs either a plain PID loop or a
//! constrained one-step-cheap MPC that uses the tuned first-order model as
//! its internal predictor.

// `!(x > 0.0)` style guards are deliberate: unlike `x <= 0.0` they also
// trip on NaN, which must never pass a validity check here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod estimator;
pub mod frit;
pub mod mpc;
pub mod optim;
pub mod pid;
pub mod pl;
pub mod plants;
pub mod scenario;
pub mod signals;

pub use error::Error;

/// Shorthand for results carrying this crate's error type.
pub type Result<T> = std::result::Result<T, Error>;

//! Planar multi-link inverted pendulum with modular disturbance-estimation
//! posture control.
//!
//! Link and joint indices are 0-based in the API (link 0 stands on the
//! platform) and 1-based in configuration files. Angles are radians
//! internally and degrees at the file boundary.

// `!(x > 0.0)` is used on purpose in validation so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod chain;
pub mod config;
pub mod dec;
pub mod error;
pub mod output;
pub mod plant;
pub mod scenario;
pub mod sensors;

pub use error::{Error, Result};

//! Crater-landmark absolute localization for planetary rovers.
//!
//! A rover that dead-reckons accumulates position error with distance
//! traveled. This crate matches craters detected near the rover against an
//! orbital crater database to bound that error, with two interchangeable
//! localizers:
//!
//! - [`particle::ParticleFilter`]: weighted pose hypotheses scored by the
//!   average area-IoU between projected detections and map craters;
//! - [`mixture`]: both crater sets as isotropic Gaussian mixtures, aligned by
//!   the translation minimizing a matching-based KL divergence, with the loss
//!   curvature as the standard-error estimate.
//!
//! [`sim`] provides the 2.5D environment (power-law crater fields, noisy
//! body-frame observations, masking, odometry noise) and [`eval`] the seeded
//! Monte Carlo harness comparing both localizers against the
//! fraction-of-distance dead-reckoning budget.

pub mod assoc;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod mixture;
pub mod particle;
pub mod sim;
pub mod types;

pub use error::{Error, Result};

//! Simulation and inference toolkit for rank-based investment tournaments:
//! a stylized market with randomly acting teams, joint Sharpe-ratio equality
//! testing with wild-bootstrap critical values, moment-matching calibration
//! of team behavior, and a backward-induction policy that maximizes the
//! probability of finishing at or above a target rank.

pub mod arena;
pub mod calendar;
pub mod dp_policy;
pub mod empirics;
pub mod error;
pub mod io;
pub mod market;
pub mod msm;
pub mod portfolio;
pub mod rng;
pub mod scoring;
pub mod stats;

pub use error::{Error, Result};

// Matrix types appear in public signatures; re-export the crate so callers
// can name them without pinning their own copy.
pub use nalgebra;

//! Monte Carlo simulation and closed-form analysis of BB84 under
//! detector-efficiency-mismatch attacks.
//!
//! Attacks live in [`attacks`], receivers in [`detector`] and
//! [`protocol`], formulas in [`analysis`]. [`engine`] runs whole scenarios;
//! [`scenario`] reads them from JSON.

pub mod analysis;
pub mod attacks;
pub mod cli;
pub mod detector;
pub mod engine;
pub mod error;
pub mod paper_check;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod types;

pub use error::{Error, Result};

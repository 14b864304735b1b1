//! CHSH violation of a Bell pair under pointer-state decoherence.
//!
//! A singlet whose particles decohere in the σz basis is described by a
//! single complex decoherence factor `r`. This crate computes
//!
//! * the maximal CHSH value `2√(1+|r|²)` from the correlation matrix and, as
//!   an independent check, by multistart gradient ascent over measurement
//!   directions ([`state`], [`optimizer`]);
//! * the fraction of measurement configurations that violate the inequality,
//!   by seeded Monte Carlo over four unit spheres, together with the
//!   cap-counting bound `8|r|²` on that fraction ([`geometry`]);
//! * decoherence factors `r(t)` of a spin bath ([`decoherence`]).
//!
//! The [`commands`] module backs the `chsh-decoherence` binary.

pub mod commands;
pub mod decoherence;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod optimizer;
pub mod sampling;
pub mod selftest;
pub mod state;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::Complex;
pub use state::{DecoherenceFactor, MeasurementConfig, TwoQubitDensityMatrix};

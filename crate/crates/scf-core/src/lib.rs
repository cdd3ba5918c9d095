//! Uplink simulator for cloud radio access networks whose remote radio heads
//! apply spatial-compression-and-forward (SCF): a linear spatial filter
//! followed by per-dimension uniform scalar quantization under a fronthaul
//! rate budget.
//!
//! The crate covers the full pipeline:
//!
//! - [`numerics`]: dense complex Hermitian eigendecomposition and
//!   positive-definite solves used by everything else.
//! - [`scenario`]: reproducible random deployments, path loss, and Rayleigh
//!   channel draws.
//! - [`scf`]: received-signal covariance, filter designs (eigenspace,
//!   matched, zero-forcing, identity), the quantization-noise model, and an
//!   empirical I/Q quantizer for validating it.
//! - [`maxmin`]: max-min SINR power control and MMSE receive beamforming via
//!   the standard-interference-function fixed point plus bisection.
//! - [`bits`]: fronthaul quantization bit allocation (continuous relaxation
//!   and integer rounding).
//! - [`orchestrator`]: alternating optimization, benchmark schemes, the
//!   co-located massive-MIMO baseline, and antenna deployment sweeps.
//!
//! The library is `no_std`-compatible (requires `alloc`); enable the default
//! `std` feature for use in ordinary binaries.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod real;

pub mod bits;
pub mod maxmin;
pub mod numerics;
pub mod orchestrator;
pub mod rng;
pub mod scenario;
pub mod scf;

pub use error::Error;

/// Complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

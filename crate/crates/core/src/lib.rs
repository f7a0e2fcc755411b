//! Compton-camera simulation and sky-map reconstruction.
//!
//! The crate models a compact Compton-camera box (a pixelated front scatter
//! layer with a central pinhole, a four-layer depth-of-interaction rear
//! absorber, GAGG side panels and BGO veto shields), tracks gamma-ray photons
//! through it, turns the resulting interaction histories into detector events
//! and reconstructs sky maps by Compton-cone and pinhole back-projection.
//!
//! Module map:
//!
//! - [`geometry`]: detector volumes, ray/box intersection, attenuation tables
//! - [`transport`]: source sampling, photon tracking, resolution smearing
//! - [`events`]: 16-feature event records, normalization and event selection
//! - [`reconstruction`]: sky-map projection, cone and pinhole back-projection, ARM
//! - [`metrics`]: MSE, SSIM, centroid peak offset and run summaries
//! - [`dataset`]: dataset generation and the on-disk binary formats
//! - [`synthetic`]: noiseless forward-model events for validation

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod events;
pub mod geometry;
pub mod metrics;
pub mod reconstruction;
pub mod rng;
pub mod synthetic;
pub mod transport;

pub use error::{Error, Result};

/// Cartesian vector in detector coordinates (mm), +z towards zenith.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Electron rest-mass energy in keV.
pub const ELECTRON_MASS_KEV: f64 = 510.99895;

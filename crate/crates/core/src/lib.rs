//! Semi-global weighted least squares (SG-WLS) edge-preserving smoothing.
//!
//! The global WLS filter solves one `MN x MN` sparse system. This crate
//! approximates it by a sequence of exact 1D solves: `2r + 1` adjacent columns
//! (or rows) are flattened into a serpentine band that keeps 2D neighbours
//! adjacent, each band's banded system is solved with an r-band LU
//! factorization, and overlapping band solutions are averaged. Column and row
//! passes alternate.
//!
//! Modules:
//!
//! * [`image`]: raster container, BT.601 conversion, PGM/PPM/PFM codecs
//! * [`weights`]: fractional and exponential guidance weights
//! * [`banded`]: subsystem assembly, r-band LU, dense oracle
//! * [`snake`]: serpentine band layout, stride schedule, overlap averaging
//! * [`sgwls`]: the smoothing pipeline and sparse guided interpolation
//! * [`reference`]: exact 2D WLS via conjugate gradient, energy evaluation
//! * [`apps`]: detail enhancement, tone mapping, depth upsampling, colorization
//! * [`bench`]: timing harness
//! * [`synth`]: deterministic synthetic scenes

pub mod apps;
pub mod banded;
pub mod bench;
pub mod error;
pub mod image;
pub mod reference;
pub mod selftest;
pub mod sgwls;
pub mod snake;
pub mod synth;
pub mod weights;

pub use error::{Error, Result};
pub use image::Image;
pub use sgwls::{interpolate_sparse, smooth, Interpolation, SmoothConfig, SparseField};
pub use snake::Axis;
pub use weights::{WeightKind, WeightParams};

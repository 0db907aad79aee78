//! Set-membership observation denoising for Soccer Simulation 2D.
//!
//! Each tracked object carries a convex belief region that is grown by a
//! motion bound every cycle and intersected with the sector implied by each
//! quantized observation. The centroid of the region is the position estimate.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod noise;
pub mod simulator;
pub mod tracker;

pub use error::{DenoiseError, Result};

//! Frame interpolation for videos captured with unknown exposure and
//! readout timing.
//!
//! The pipeline recovers the exposure-to-gap ratio `lambda = t1 / t0` from
//! three displacement fields spanning four key-states, fits a per-pixel
//! constant-acceleration trajectory, refines the composed long-range flow
//! against the trajectory prior, and renders intermediate frames on the
//! uneven time grid the ratio implies.
//!
//! ```text
//!   L0 ──t0── L1 ────t1──── L2 ──t0── L3
//!   |exposure|    gap       |exposure|
//! ```
//!
//! The [`simulator`] module provides analytic constant-acceleration scenes
//! and blur-dataset synthesis so every stage can be checked against
//! closed-form ground truth.

pub mod error;
pub mod flow;
pub mod frames;
pub mod metrics;
pub mod refine;
pub mod simulator;
pub mod synthesis;
pub mod trajectory;

pub use error::{Error, Result};
pub use flow::{ConfidenceMap, FlowField, Mark, Span};
pub use frames::{ExposureConfig, Frame, KeyStateQuad};
pub use trajectory::{LambdaEstimate, LambdaOptions, TrajectoryField};

//! Life-cycle carbon model for HZO ferroelectric FET (FeFET) embedded memories
//! and SRAM baselines.
//!
//! The crate is organised around the flow of a carbon estimate:
//!
//! * [`recipe`] turns an ALD process recipe into per-wafer-area energy (EPA) and
//!   process-gas emission (GPA) of the ferroelectric stack, with optional Monte
//!   Carlo uncertainty on tool power.
//! * [`embodied`] composes those with a CMOS fab baseline into carbon per area
//!   (CPA) and embodied carbon of a memory array.
//! * [`catalog`] ingests characterised memory-array design points and derives
//!   per-access operational carbon.
//! * [`lifecycle`] covers endurance-limited lifetime and total footprint.
//! * [`system`] composes buffers and a compute array into accelerator-level
//!   embodied and per-inference operational carbon.
//! * [`schema`] and [`data`] hold the versioned file formats and the packaged
//!   default datasets.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod data;
pub mod embodied;
mod error;
pub mod lifecycle;
pub mod recipe;
pub mod schema;
pub mod system;
pub mod units;

pub use error::{Error, Result};

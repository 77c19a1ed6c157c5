//! Sigma-delta quantization of oversampled bandlimited signals, followed by
//! decimation (block integration, downsampling and fixed-width packing) and
//! reconstruction through a compensating kernel.
//!
//! The pipeline is
//!
//! ```text
//! signal -> sigma_delta -> decimation -> codec -> reconstruction
//!                                         kernels ---^
//! ```
//!
//! and `experiment` drives it over parameter grids to measure how the
//! reconstruction error trades off against the encoded bit-rate.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decimation;
pub mod error;
pub mod experiment;
pub mod fourier;
pub mod kernels;
pub mod reconstruction;
pub mod sigma_delta;
pub mod signal;

pub use decimation::codec::{PackedBitstream, StreamHeader};
pub use decimation::{DecimatedStream, DecimationParams, Rate};
pub use error::{Error, Result};
pub use experiment::{RateDistortionRecord, SweepConfig};
pub use kernels::{KernelParams, KernelTable, SmoothWindow};
pub use reconstruction::{Reconstruction, ReconstructionPlan};
pub use sigma_delta::{QuantizerConfig, QuantizerRule, SigmaDeltaRun};
pub use signal::{BandlimitedSignal, SampleGrid};

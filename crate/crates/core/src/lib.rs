//! Fixed-posit numbers: a posit variant whose regime and exponent fields have
//! fixed widths.
//!
//! The crate provides a bit-exact codec, a multiplier modelled on a hardware
//! datapath alongside an exact reference, a standard posit codec for
//! comparison, error metrics, and small kernels for substitution studies in
//! which every binary32 multiplication is replaced by a fixed-posit one.

pub mod codec;
pub mod error;
pub mod format;
pub mod metrics;
pub mod multiplier;
pub mod posit;
pub mod report;
pub mod workloads;

pub use codec::{Decoded, Layout, Normal, PositWord, RoundingMode, Word};
pub use error::{Error, Result};
pub use format::{FixedPositFormat, PositFormat, ScaleRange};
pub use metrics::{ErrorReport, SampleDistribution};
pub use multiplier::{FixedPositMul, MulFunction, NativeMul};

/// Seed used when none is given, so casual runs are reproducible.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

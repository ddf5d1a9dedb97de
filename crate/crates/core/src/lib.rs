//! Adaptive noise cancellation with LMS, NLMS and RLS filters.
//!
//! The crate is organised the way the data flows through a run:
//!
//! * [`signal`] builds the inputs: sample buffers, seeded noise, the noise
//!   path channel, a synthetic speech source and a 16-bit PCM WAV codec.
//! * [`filters`] holds the three adaptive filters as single-sample state
//!   machines behind the [`filters::AdaptiveFilter`] trait.
//! * [`metrics`] scores a denoised signal against the clean one.
//! * [`harness`] wires the two-input canceller end to end and sweeps a
//!   parameter grid into comparison tables.
//! * [`cli`] is the argument and config-file layer used by the `anc` binary.

pub mod cli;
pub mod error;
pub mod filters;
pub mod harness;
pub mod metrics;
pub mod signal;

pub use error::{Error, Result};
pub use signal::Signal;

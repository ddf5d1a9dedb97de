//! End-to-end noise cancellation runs and parameter sweeps.
//!
//! A run builds the two canceller inputs from a clean signal `x` and a
//! seeded noise stream `v`:
//!
//! ```text
//! primary   d = x + s · channel(v)
//! reference   = s · v
//! ```
//!
//! where `s` puts the channel output `target SNR` below `x`. The filter
//! predicts the noise in `d` from the reference and the error `e = d − y`
//! is the denoised estimate, scored against `x`.

mod run;
mod sweep;
mod table;

pub use run::{build_inputs, run_anc, run_anc_on, AncInputs, RunConfig, RunOutput, Source};
pub use sweep::{cell_seed, run_sweep, CellSummary, SweepCell, SweepGrid, SweepTable};
pub use table::{emit_table, parse_csv, CsvRecord, TableFormat};

use crate::error::Result;
use crate::signal::{synth_speech, ChannelSpec, Signal};

/// Seed of the standard synthetic speech fixture.
pub const FIXTURE_SEED: u64 = 42;
pub const FIXTURE_RATE: u32 = 8000;
pub const FIXTURE_DURATION_S: f64 = 2.0;
pub const FIXTURE_INPUT_SNR_DB: f64 = 5.0;

/// The standard fixture: 2 s of synthetic speech at 8 kHz, seed 42.
pub fn standard_fixture() -> Result<Signal> {
    synth_speech(FIXTURE_DURATION_S, FIXTURE_RATE, FIXTURE_SEED)
}

/// Noise path used by the standard fixture and the default grid.
pub fn standard_channel() -> ChannelSpec {
    ChannelSpec::room()
}

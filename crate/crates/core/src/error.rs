use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// A weight (or an input feeding a weight update) became non-finite.
    /// `sample` is `None` when raised outside a streaming run.
    #[error("adaptive filter diverged{}", fmt_sample(*.sample))]
    Diverged { sample: Option<usize> },

    /// The RLS inverse correlation matrix lost positive definiteness or
    /// produced non-finite entries. Resetting it to `δ·I` recovers.
    #[error("RLS numerical breakdown{}", fmt_sample(*.sample))]
    Breakdown { sample: Option<usize> },

    #[error("step-size bound undefined: reference signal has zero power")]
    UndefinedBound,

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error(transparent)]
    Wav(#[from] crate::signal::wav::WavError),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

fn fmt_sample(sample: Option<usize>) -> String {
    match sample {
        Some(n) => format!(" at sample {n}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Sample index carried by a divergence or breakdown fault.
    pub fn fault_sample(&self) -> Option<usize> {
        match self {
            Error::Diverged { sample } | Error::Breakdown { sample } => *sample,
            _ => None,
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Diverged { .. } | Error::Breakdown { .. })
    }

    pub(crate) fn at_sample(self, index: usize) -> Self {
        match self {
            Error::Diverged { .. } => Error::Diverged {
                sample: Some(index),
            },
            Error::Breakdown { .. } => Error::Breakdown {
                sample: Some(index),
            },
            other => other,
        }
    }
}

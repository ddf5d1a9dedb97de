//! LMS, NLMS and RLS adaptive filters.
//!
//! Every filter is a single-sample state machine. One call to
//! [`AdaptiveFilter::process_sample`] runs the fixed sequence
//!
//! ```text
//! push n0(n) into the tap line  ->  y(n) = u(n)ᵀ w(n)
//!   ->  e(n) = d(n) - y(n)  ->  w(n+1) = update(w(n), u(n), e(n))
//! ```
//!
//! so the tap vector `u(n)` always includes the current reference sample.
//! In a noise canceller `y(n)` is the noise estimate and `e(n)` the cleaned
//! sample.

mod block;
mod bound;
mod lms;
mod nlms;
mod rls;
mod taps;

pub use block::{process_block, BlockOutput};
pub use bound::lms_step_bound;
pub use lms::{lms_update, Lms, LmsConfig};
pub use nlms::{nlms_update, Nlms, NlmsConfig, DEFAULT_REGULARIZER};
pub use rls::{
    rls_gain, rls_update, Rls, RlsConfig, RlsState, DEFAULT_FORGETTING, DEFAULT_INIT_SCALE,
};
pub use taps::{filter_output, TapLine, WeightVector};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Output of one adaptation step.
///
/// `output + error == desired` as computed (`error = desired - output`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterStep {
    pub output: f64,
    pub error: f64,
}

/// Shared contract of the three algorithms.
pub trait AdaptiveFilter {
    fn order(&self) -> usize;

    fn weights(&self) -> &WeightVector;

    /// Number of samples processed since construction or the last reset.
    fn samples_processed(&self) -> usize;

    /// Runs one push → output → error → update step. A non-finite weight is
    /// reported as [`Error::Diverged`] carrying the sample index; the filter
    /// state is then unspecified until [`reset`](Self::reset).
    fn process_sample(&mut self, desired: f64, reference: f64) -> Result<FilterStep>;

    /// Zero the weights and tap line and restore any algorithm state.
    fn reset(&mut self);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Nlms,
    Lms,
    Rls,
}

impl Algorithm {
    /// Column order of the comparison tables.
    pub const ALL: [Algorithm; 3] = [Algorithm::Nlms, Algorithm::Lms, Algorithm::Rls];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Lms => "lms",
            Algorithm::Nlms => "nlms",
            Algorithm::Rls => "rls",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lms" => Ok(Algorithm::Lms),
            "nlms" => Ok(Algorithm::Nlms),
            "rls" => Ok(Algorithm::Rls),
            other => Err(Error::config(format!(
                "unknown algorithm `{other}` (expected lms, nlms or rls)"
            ))),
        }
    }
}

/// Validated construction parameters for any of the three filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterConfig {
    Lms(LmsConfig),
    Nlms(NlmsConfig),
    Rls(RlsConfig),
}

impl FilterConfig {
    /// Builds a config from the shared `(algorithm, order, step)` triple.
    /// For RLS `step` is the forgetting factor.
    pub fn from_parts(algorithm: Algorithm, order: usize, step: f64) -> Result<Self> {
        Ok(match algorithm {
            Algorithm::Lms => FilterConfig::Lms(LmsConfig::new(order, step)?),
            Algorithm::Nlms => FilterConfig::Nlms(NlmsConfig::new(order, step)?),
            Algorithm::Rls => FilterConfig::Rls(RlsConfig::new(order, step)?),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            FilterConfig::Lms(_) => Algorithm::Lms,
            FilterConfig::Nlms(_) => Algorithm::Nlms,
            FilterConfig::Rls(_) => Algorithm::Rls,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            FilterConfig::Lms(c) => c.order,
            FilterConfig::Nlms(c) => c.order,
            FilterConfig::Rls(c) => c.order,
        }
    }

    pub fn build(&self) -> Filter {
        match *self {
            FilterConfig::Lms(c) => Filter::Lms(Lms::new(c)),
            FilterConfig::Nlms(c) => Filter::Nlms(Nlms::new(c)),
            FilterConfig::Rls(c) => Filter::Rls(Rls::new(c)),
        }
    }
}

/// Any of the three filters, dispatched statically.
#[derive(Debug, Clone)]
pub enum Filter {
    Lms(Lms),
    Nlms(Nlms),
    Rls(Rls),
}

impl AdaptiveFilter for Filter {
    fn order(&self) -> usize {
        match self {
            Filter::Lms(f) => f.order(),
            Filter::Nlms(f) => f.order(),
            Filter::Rls(f) => f.order(),
        }
    }

    fn weights(&self) -> &WeightVector {
        match self {
            Filter::Lms(f) => f.weights(),
            Filter::Nlms(f) => f.weights(),
            Filter::Rls(f) => f.weights(),
        }
    }

    fn samples_processed(&self) -> usize {
        match self {
            Filter::Lms(f) => f.samples_processed(),
            Filter::Nlms(f) => f.samples_processed(),
            Filter::Rls(f) => f.samples_processed(),
        }
    }

    fn process_sample(&mut self, desired: f64, reference: f64) -> Result<FilterStep> {
        match self {
            Filter::Lms(f) => f.process_sample(desired, reference),
            Filter::Nlms(f) => f.process_sample(desired, reference),
            Filter::Rls(f) => f.process_sample(desired, reference),
        }
    }

    fn reset(&mut self) {
        match self {
            Filter::Lms(f) => f.reset(),
            Filter::Nlms(f) => f.reset(),
            Filter::Rls(f) => f.reset(),
        }
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::config("filter order must be at least 1"));
    }
    Ok(())
}

use crate::error::{Error, Result};
use crate::signal::Signal;

/// FIR impulse response carrying the reference noise to the primary input.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    impulse_response: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(impulse_response: Vec<f64>) -> Result<Self> {
        if impulse_response.is_empty() {
            return Err(Error::config("channel impulse response is empty"));
        }
        if impulse_response.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("channel coefficients must be finite"));
        }
        Ok(ChannelSpec { impulse_response })
    }

    pub fn identity() -> Self {
        ChannelSpec {
            impulse_response: vec![1.0],
        }
    }

    /// Three-tap lowpass `[0.5, 0.3, 0.2]`.
    pub fn lowpass3() -> Self {
        ChannelSpec {
            impulse_response: vec![0.5, 0.3, 0.2],
        }
    }

    /// 48-tap reverberant path `0.14 · 0.96^k · (-1)^⌊k/4⌋`.
    ///
    /// Its energy (≈0.24) puts the primary pickup well below the reference,
    /// and its tail outlasts every order in the default grid.
    pub fn room() -> Self {
        let impulse_response = (0..48)
            .map(|k| {
                let sign = if (k / 4) % 2 == 0 { 1.0 } else { -1.0 };
                0.14 * 0.96f64.powi(k) * sign
            })
            .collect();
        ChannelSpec { impulse_response }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(Self::identity()),
            "lowpass3" => Some(Self::lowpass3()),
            "room" => Some(Self::room()),
            _ => None,
        }
    }

    pub fn impulse_response(&self) -> &[f64] {
        &self.impulse_response
    }

    pub fn is_identity(&self) -> bool {
        self.impulse_response == [1.0]
    }
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self::identity()
    }
}

/// Causal linear convolution with zero initial state, truncated to the
/// input length.
pub fn apply_channel(noise: &Signal, channel: &ChannelSpec) -> Signal {
    let x = noise.samples();
    let h = channel.impulse_response();
    let out = (0..x.len())
        .map(|n| {
            h.iter()
                .take(n + 1)
                .enumerate()
                .map(|(k, c)| c * x[n - k])
                .sum()
        })
        .collect();
    Signal::from_finite(out, noise.sample_rate())
}

use crate::error::{Error, Result};
use crate::filters::taps::{check_dims, dot};
use crate::filters::{check_order, AdaptiveFilter, FilterStep, TapLine, WeightVector};

/// ε added to `‖u‖²` so an all-zero tap line never divides by zero.
pub const DEFAULT_REGULARIZER: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlmsConfig {
    pub order: usize,
    /// Normalised step size, strictly inside `(0, 2)`.
    pub step_size: f64,
    pub regularizer: f64,
}

impl NlmsConfig {
    pub fn new(order: usize, step_size: f64) -> Result<Self> {
        Self::with_regularizer(order, step_size, DEFAULT_REGULARIZER)
    }

    pub fn with_regularizer(order: usize, step_size: f64, regularizer: f64) -> Result<Self> {
        check_order(order)?;
        if !(step_size > 0.0 && step_size < 2.0) {
            return Err(Error::config(format!(
                "NLMS step size must lie in the open range (0, 2), got {step_size}"
            )));
        }
        if !(regularizer.is_finite() && regularizer > 0.0) {
            return Err(Error::config(format!(
                "NLMS regularizer must be > 0, got {regularizer}"
            )));
        }
        Ok(NlmsConfig {
            order,
            step_size,
            regularizer,
        })
    }

    /// Same as [`with_regularizer`](Self::with_regularizer) but allows
    /// `ε = 0`, for analysis of the unregularised recursion.
    pub fn unregularized(order: usize, step_size: f64) -> Result<Self> {
        let mut cfg = Self::with_regularizer(order, step_size, 1.0)?;
        cfg.regularizer = 0.0;
        Ok(cfg)
    }
}

/// `w(n+1) = w(n) + μ·e(n)·u(n) / (‖u(n)‖² + ε)`.
pub fn nlms_update(
    w: &WeightVector,
    taps: &TapLine,
    error: f64,
    cfg: &NlmsConfig,
) -> Result<WeightVector> {
    check_dims(taps, w)?;
    let mut next = w.clone();
    nlms_update_in_place(&mut next, taps, error, cfg)?;
    Ok(next)
}

fn nlms_update_in_place(
    w: &mut WeightVector,
    taps: &TapLine,
    error: f64,
    cfg: &NlmsConfig,
) -> Result<()> {
    if !error.is_finite() {
        return Err(Error::Diverged { sample: None });
    }
    let power = taps.squared_norm();
    if !power.is_finite() {
        return Err(Error::Diverged { sample: None });
    }
    if error == 0.0 || power == 0.0 {
        // nothing to add; also covers ε = 0 with a silent tap line
        return Ok(());
    }
    w.add_scaled(
        cfg.step_size * error / (power + cfg.regularizer),
        taps.as_slice(),
    )
}

#[derive(Debug, Clone)]
pub struct Nlms {
    cfg: NlmsConfig,
    taps: TapLine,
    weights: WeightVector,
    processed: usize,
}

impl Nlms {
    pub fn new(cfg: NlmsConfig) -> Self {
        Nlms {
            cfg,
            taps: TapLine::new(cfg.order),
            weights: WeightVector::zeros(cfg.order),
            processed: 0,
        }
    }

    pub fn config(&self) -> &NlmsConfig {
        &self.cfg
    }
}

impl AdaptiveFilter for Nlms {
    fn order(&self) -> usize {
        self.cfg.order
    }

    fn weights(&self) -> &WeightVector {
        &self.weights
    }

    fn samples_processed(&self) -> usize {
        self.processed
    }

    fn process_sample(&mut self, desired: f64, reference: f64) -> Result<FilterStep> {
        let index = self.processed;
        self.processed += 1;
        self.taps.push(reference);
        let output = dot(self.taps.as_slice(), self.weights.as_slice());
        let error = desired - output;
        nlms_update_in_place(&mut self.weights, &self.taps, error, &self.cfg)
            .map_err(|e| e.at_sample(index))?;
        Ok(FilterStep { output, error })
    }

    fn reset(&mut self) {
        self.taps.clear();
        self.weights.clear();
        self.processed = 0;
    }
}

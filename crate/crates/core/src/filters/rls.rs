//! Recursive least squares.
//!
//! With `P` the inverse correlation matrix, `m` the forgetting factor and
//! `u` the tap vector:
//!
//! ```text
//! k(n)   = P u / (m + uᵀ P u)
//! w(n+1) = w(n) + e(n) k(n)
//! P'     = (P - k (uᵀ P)) / m,   then P' <- (P' + P'ᵀ) / 2
//! ```
//!
//! `P(0) = δ·I` and `w(0) = 0`.

use crate::error::{Error, Result};
use crate::filters::taps::{check_dims, dot};
use crate::filters::{check_order, AdaptiveFilter, FilterStep, TapLine, WeightVector};

pub const DEFAULT_FORGETTING: f64 = 0.999;
pub const DEFAULT_INIT_SCALE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlsConfig {
    pub order: usize,
    /// Forgetting factor `m` in `(0, 1]`; 1 is the growing-window limit.
    pub forgetting: f64,
    /// δ in `P(0) = δ·I`.
    pub init_scale: f64,
}

impl RlsConfig {
    pub fn new(order: usize, forgetting: f64) -> Result<Self> {
        Self::with_init_scale(order, forgetting, DEFAULT_INIT_SCALE)
    }

    pub fn with_init_scale(order: usize, forgetting: f64, init_scale: f64) -> Result<Self> {
        check_order(order)?;
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::config(format!(
                "RLS forgetting factor must lie in (0, 1], got {forgetting}"
            )));
        }
        if !(init_scale.is_finite() && init_scale > 0.0) {
            return Err(Error::config(format!(
                "RLS initial scale δ must be > 0, got {init_scale}"
            )));
        }
        Ok(RlsConfig {
            order,
            forgetting,
            init_scale,
        })
    }
}

impl Default for RlsConfig {
    fn default() -> Self {
        RlsConfig {
            order: 1,
            forgetting: DEFAULT_FORGETTING,
            init_scale: DEFAULT_INIT_SCALE,
        }
    }
}

/// Inverse correlation matrix, last gain vector and their parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    order: usize,
    /// Row-major `N × N`.
    inv_corr: Vec<f64>,
    gain: Vec<f64>,
    forgetting: f64,
    init_scale: f64,
    /// Scratch for `P u`.
    pu: Vec<f64>,
}

impl RlsState {
    pub fn new(cfg: &RlsConfig) -> Self {
        let n = cfg.order;
        let mut state = RlsState {
            order: n,
            inv_corr: vec![0.0; n * n],
            gain: vec![0.0; n],
            forgetting: cfg.forgetting,
            init_scale: cfg.init_scale,
            pu: vec![0.0; n],
        };
        state.reset_inverse();
        state
    }

    /// Builds a state from an explicit row-major matrix.
    pub fn from_matrix(order: usize, inv_corr: Vec<f64>, forgetting: f64) -> Result<Self> {
        let cfg = RlsConfig::new(order, forgetting)?;
        if inv_corr.len() != order * order {
            return Err(Error::LengthMismatch {
                expected: order * order,
                found: inv_corr.len(),
            });
        }
        let mut state = RlsState::new(&cfg);
        state.inv_corr = inv_corr;
        Ok(state)
    }

    /// Restores `P = δ·I` after a numerical breakdown. The gain is cleared.
    pub fn reset_inverse(&mut self) {
        let n = self.order;
        self.inv_corr.iter_mut().for_each(|p| *p = 0.0);
        for i in 0..n {
            self.inv_corr[i * n + i] = self.init_scale;
        }
        self.gain.iter_mut().for_each(|k| *k = 0.0);
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn inv_corr(&self) -> &[f64] {
        &self.inv_corr
    }

    pub fn gain(&self) -> &[f64] {
        &self.gain
    }

    pub fn forgetting(&self) -> f64 {
        self.forgetting
    }

    /// `‖P − Pᵀ‖∞ / ‖P‖∞` using the max-row-sum norm.
    pub fn asymmetry(&self) -> f64 {
        let n = self.order;
        let p = &self.inv_corr;
        let mut diff: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for i in 0..n {
            let (mut d, mut s) = (0.0, 0.0);
            for j in 0..n {
                d += (p[i * n + j] - p[j * n + i]).abs();
                s += p[i * n + j].abs();
            }
            diff = diff.max(d);
            norm = norm.max(s);
        }
        if norm == 0.0 {
            0.0
        } else {
            diff / norm
        }
    }

    fn check_taps(&self, taps: &TapLine) -> Result<()> {
        if taps.len() != self.order {
            return Err(Error::LengthMismatch {
                expected: self.order,
                found: taps.len(),
            });
        }
        Ok(())
    }

    /// Computes `P u` into scratch and the gain into `self.gain`.
    fn compute_gain(&mut self, u: &[f64]) -> Result<()> {
        let n = self.order;
        for (i, pu) in self.pu.iter_mut().enumerate() {
            *pu = dot(&self.inv_corr[i * n..(i + 1) * n], u);
        }
        let denom = self.forgetting + dot(u, &self.pu);
        if !(denom.is_finite() && denom > 0.0) {
            return Err(Error::Breakdown { sample: None });
        }
        for (k, pu) in self.gain.iter_mut().zip(&self.pu) {
            *k = pu / denom;
        }
        Ok(())
    }

    /// Riccati step using the `P u` left by the matching `compute_gain`.
    fn update_inverse(&mut self) -> Result<()> {
        let n = self.order;
        let inv_m = 1.0 / self.forgetting;
        let (p, k, pu) = (&mut self.inv_corr, &self.gain, &self.pu);
        for i in 0..n {
            for j in i..n {
                // P is symmetric, so uᵀP = (P u)ᵀ
                let a = p[i * n + j] - k[i] * pu[j];
                let b = p[j * n + i] - k[j] * pu[i];
                let v = 0.5 * (a + b) * inv_m;
                p[i * n + j] = v;
                p[j * n + i] = v;
            }
        }
        if p.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Breakdown { sample: None })
        }
    }

    fn step(&mut self, w: &mut WeightVector, u: &[f64], error: f64) -> Result<()> {
        if !error.is_finite() {
            return Err(Error::Diverged { sample: None });
        }
        self.compute_gain(u)?;
        w.add_scaled(error, &self.gain)?;
        self.update_inverse()
    }
}

/// `k = P u / (m + uᵀ P u)`. The result is also stored as the state's gain.
pub fn rls_gain(state: &mut RlsState, taps: &TapLine) -> Result<Vec<f64>> {
    state.check_taps(taps)?;
    state.compute_gain(taps.as_slice())?;
    Ok(state.gain.clone())
}

/// Applies `w + e·k` with the state's stored gain and advances `P`.
///
/// The stored gain must come from [`rls_gain`] on the same `taps` and the
/// current `P`.
pub fn rls_update(
    state: &RlsState,
    w: &WeightVector,
    taps: &TapLine,
    error: f64,
) -> Result<(WeightVector, RlsState)> {
    check_dims(taps, w)?;
    state.check_taps(taps)?;
    if !error.is_finite() {
        return Err(Error::Diverged { sample: None });
    }
    let mut next = state.clone();
    let n = next.order;
    let u = taps.as_slice();
    for i in 0..n {
        next.pu[i] = dot(&next.inv_corr[i * n..(i + 1) * n], u);
    }
    let mut w = w.clone();
    w.add_scaled(error, &next.gain)?;
    next.update_inverse()?;
    Ok((w, next))
}

#[derive(Debug, Clone)]
pub struct Rls {
    cfg: RlsConfig,
    taps: TapLine,
    weights: WeightVector,
    state: RlsState,
    processed: usize,
}

impl Rls {
    pub fn new(cfg: RlsConfig) -> Self {
        Rls {
            cfg,
            taps: TapLine::new(cfg.order),
            weights: WeightVector::zeros(cfg.order),
            state: RlsState::new(&cfg),
            processed: 0,
        }
    }

    pub fn config(&self) -> &RlsConfig {
        &self.cfg
    }

    pub fn state(&self) -> &RlsState {
        &self.state
    }

    /// Recovers from a breakdown by resetting `P` to `δ·I`, keeping the
    /// weights and tap line.
    pub fn reset_inverse(&mut self) {
        self.state.reset_inverse();
    }
}

impl AdaptiveFilter for Rls {
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
        self.state
            .step(&mut self.weights, self.taps.as_slice(), error)
            .map_err(|e| e.at_sample(index))?;
        Ok(FilterStep { output, error })
    }

    fn reset(&mut self) {
        self.taps.clear();
        self.weights.clear();
        self.state.reset_inverse();
        self.processed = 0;
    }
}

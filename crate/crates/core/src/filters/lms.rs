use crate::error::{Error, Result};
use crate::filters::taps::{check_dims, dot};
use crate::filters::{check_order, AdaptiveFilter, FilterStep, TapLine, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmsConfig {
    pub order: usize,
    pub step_size: f64,
}

impl LmsConfig {
    pub fn new(order: usize, step_size: f64) -> Result<Self> {
        check_order(order)?;
        if !(step_size.is_finite() && step_size > 0.0) {
            return Err(Error::config(format!(
                "LMS step size must be > 0, got {step_size}"
            )));
        }
        Ok(LmsConfig { order, step_size })
    }
}

/// `w(n+1) = w(n) + μ·e(n)·u(n)`.
pub fn lms_update(
    w: &WeightVector,
    taps: &TapLine,
    error: f64,
    cfg: &LmsConfig,
) -> Result<WeightVector> {
    check_dims(taps, w)?;
    let mut next = w.clone();
    lms_update_in_place(&mut next, taps, error, cfg.step_size)?;
    Ok(next)
}

fn lms_update_in_place(w: &mut WeightVector, taps: &TapLine, error: f64, mu: f64) -> Result<()> {
    if !error.is_finite() {
        return Err(Error::Diverged { sample: None });
    }
    if error == 0.0 {
        return Ok(());
    }
    w.add_scaled(mu * error, taps.as_slice())
}

#[derive(Debug, Clone)]
pub struct Lms {
    cfg: LmsConfig,
    taps: TapLine,
    weights: WeightVector,
    processed: usize,
}

impl Lms {
    pub fn new(cfg: LmsConfig) -> Self {
        Lms {
            cfg,
            taps: TapLine::new(cfg.order),
            weights: WeightVector::zeros(cfg.order),
            processed: 0,
        }
    }

    pub fn config(&self) -> &LmsConfig {
        &self.cfg
    }
}

impl AdaptiveFilter for Lms {
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
        lms_update_in_place(&mut self.weights, &self.taps, error, self.cfg.step_size)
            .map_err(|e| e.at_sample(index))?;
        Ok(FilterStep { output, error })
    }

    fn reset(&mut self) {
        self.taps.clear();
        self.weights.clear();
        self.processed = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taps(v: &[f64]) -> TapLine {
        TapLine::from_taps(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_error_freezes_weights() {
        let w = WeightVector::from_vec(vec![0.3, -1.2]).unwrap();
        let cfg = LmsConfig::new(2, 0.7).unwrap();
        assert_eq!(lms_update(&w, &taps(&[5.0, 6.0]), 0.0, &cfg).unwrap(), w);
    }

    #[test]
    fn hand_evaluated_update() {
        let cfg = LmsConfig::new(2, 0.5).unwrap();
        let w = lms_update(&WeightVector::zeros(2), &taps(&[1.0, 2.0]), 1.0, &cfg).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 1.0]);
    }

    #[test]
    fn zero_input_sample() {
        let cfg = LmsConfig::new(1, 0.05).unwrap();
        let w = WeightVector::from_vec(vec![1.0]).unwrap();
        assert_eq!(
            lms_update(&w, &taps(&[0.0]), 7.0, &cfg).unwrap().as_slice(),
            &[1.0]
        );
    }

    #[test]
    fn non_finite_error_is_divergence() {
        let cfg = LmsConfig::new(1, 0.05).unwrap();
        let w = WeightVector::zeros(1);
        assert!(matches!(
            lms_update(&w, &taps(&[1.0]), f64::NAN, &cfg),
            Err(Error::Diverged { sample: None })
        ));
        assert!(matches!(
            lms_update(&w, &taps(&[f64::INFINITY]), 1.0, &cfg),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(LmsConfig::new(0, 0.1).is_err());
        assert!(LmsConfig::new(4, 0.0).is_err());
        assert!(LmsConfig::new(4, -0.1).is_err());
        assert!(LmsConfig::new(4, f64::NAN).is_err());
        assert!(LmsConfig::new(4, 3.0).is_ok());
    }

    #[test]
    fn first_sample_error_equals_desired() {
        let mut f = Lms::new(LmsConfig::new(3, 0.1).unwrap());
        let step = f.process_sample(0.8, 0.4).unwrap();
        assert_eq!(step.output, 0.0);
        assert_eq!(step.error, 0.8);
        assert_eq!(f.samples_processed(), 1);
    }

    #[test]
    fn reset_restores_initial_state() {
        let mut f = Lms::new(LmsConfig::new(2, 0.1).unwrap());
        f.process_sample(1.0, 1.0).unwrap();
        f.reset();
        assert_eq!(f.weights(), &WeightVector::zeros(2));
        assert_eq!(f.process_sample(0.5, 0.0).unwrap().error, 0.5);
    }
}

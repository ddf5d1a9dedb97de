use crate::error::{Error, Result};

/// Delay line holding the most recent `N` reference samples, newest first.
///
/// Slots that have not been filled yet hold exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TapLine {
    taps: Vec<f64>,
}

impl TapLine {
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "tap line length must be positive");
        TapLine {
            taps: vec![0.0; order],
        }
    }

    /// Builds a tap line from explicit contents, newest first.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::config("tap line length must be positive"));
        }
        Ok(TapLine { taps })
    }

    /// Shifts every tap one slot older, dropping the oldest, and stores `x`
    /// as the newest.
    pub fn push(&mut self, x: f64) {
        self.taps.rotate_right(1);
        self.taps[0] = x;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn squared_norm(&self) -> f64 {
        self.taps.iter().map(|x| x * x).sum()
    }

    pub fn clear(&mut self) {
        self.taps.iter_mut().for_each(|t| *t = 0.0);
    }
}

/// The `N` adaptive coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn zeros(order: usize) -> Self {
        WeightVector(vec![0.0; order])
    }

    pub fn from_vec(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("weight vector must be non-empty"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged { sample: None });
        }
        Ok(WeightVector(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|w| w.is_finite())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn clear(&mut self) {
        self.0.iter_mut().for_each(|w| *w = 0.0);
    }

    /// `w += scale · u`, then a finiteness check.
    pub(crate) fn add_scaled(&mut self, scale: f64, taps: &[f64]) -> Result<()> {
        for (w, u) in self.0.iter_mut().zip(taps) {
            *w += scale * u;
        }
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Diverged { sample: None })
        }
    }
}

pub(crate) fn check_dims(taps: &TapLine, w: &WeightVector) -> Result<()> {
    if taps.len() != w.order() {
        return Err(Error::LengthMismatch {
            expected: w.order(),
            found: taps.len(),
        });
    }
    Ok(())
}

/// Inner product `u(n)ᵀ w(n)`.
pub fn filter_output(taps: &TapLine, w: &WeightVector) -> Result<f64> {
    check_dims(taps, w)?;
    Ok(dot(taps.as_slice(), w.as_slice()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taps(v: &[f64]) -> TapLine {
        TapLine::from_taps(v.to_vec()).unwrap()
    }

    fn weights(v: &[f64]) -> WeightVector {
        WeightVector::from_vec(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_padding_before_fill() {
        let mut line = TapLine::new(4);
        line.push(1.0);
        line.push(2.0);
        assert_eq!(line.as_slice(), &[2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn push_drops_oldest() {
        let mut line = TapLine::new(3);
        for x in 1..=5 {
            line.push(x as f64);
        }
        assert_eq!(line.as_slice(), &[5.0, 4.0, 3.0]);
        assert_eq!(line.len(), 3);
    }

    #[test]
    fn output_zero_weights() {
        assert_eq!(
            filter_output(&taps(&[1.0, 2.0, 3.0]), &WeightVector::zeros(3)).unwrap(),
            0.0
        );
    }

    #[test]
    fn output_unit_impulse_selects_first_weight() {
        let c = -0.37;
        assert_eq!(
            filter_output(&taps(&[1.0, 0.0, 0.0]), &weights(&[c, 5.0, 9.0])).unwrap(),
            c
        );
    }

    #[test]
    fn output_hand_evaluated() {
        let y = filter_output(&taps(&[1.0, 2.0, 3.0]), &weights(&[0.5, 0.25, 0.1])).unwrap();
        assert!((y - 1.3).abs() < 1e-15);
    }

    #[test]
    fn output_length_mismatch() {
        assert!(matches!(
            filter_output(&taps(&[1.0, 2.0]), &WeightVector::zeros(3)),
            Err(Error::LengthMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn non_finite_weights_rejected() {
        assert!(matches!(
            WeightVector::from_vec(vec![0.0, f64::INFINITY]),
            Err(Error::Diverged { .. })
        ));
    }
}

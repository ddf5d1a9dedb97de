//! Output-quality metrics of a denoised signal against the clean one.

use crate::error::{Error, Result};
use crate::filters::Algorithm;
use crate::signal::{NoiseKind, Signal};

fn check_pair(clean: &Signal, estimate: &Signal, min_len: usize) -> Result<()> {
    if clean.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: clean.len(),
            found: estimate.len(),
        });
    }
    if clean.len() < min_len {
        return Err(Error::config(format!(
            "metric needs at least {min_len} samples, got {}",
            clean.len()
        )));
    }
    Ok(())
}

fn residual_energy(clean: &Signal, estimate: &Signal) -> f64 {
    clean
        .samples()
        .iter()
        .zip(estimate.samples())
        .map(|(c, e)| (c - e).powi(2))
        .sum()
}

/// `(1/L) Σ (clean − estimate)²`.
pub fn mse(clean: &Signal, estimate: &Signal) -> Result<f64> {
    check_pair(clean, estimate, 1)?;
    Ok(residual_energy(clean, estimate) / clean.len() as f64)
}

/// `10·log10(Σ clean² / Σ (clean − estimate)²)` in dB.
///
/// A zero residual gives `f64::INFINITY`.
pub fn snr_db(clean: &Signal, estimate: &Signal) -> Result<f64> {
    check_pair(clean, estimate, 1)?;
    let signal = clean.energy();
    if signal <= 0.0 {
        return Err(Error::config("clean signal has zero power"));
    }
    let residual = residual_energy(clean, estimate);
    if residual == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / residual).log10())
}

/// Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn correlation(clean: &Signal, estimate: &Signal) -> Result<f64> {
    check_pair(clean, estimate, 2)?;
    let n = clean.len() as f64;
    let mean_c = clean.samples().iter().sum::<f64>() / n;
    let mean_e = estimate.samples().iter().sum::<f64>() / n;
    let (mut sce, mut scc, mut see) = (0.0, 0.0, 0.0);
    for (c, e) in clean.samples().iter().zip(estimate.samples()) {
        let (dc, de) = (c - mean_c, e - mean_e);
        sce += dc * de;
        scc += dc * dc;
        see += de * de;
    }
    if scc == 0.0 || see == 0.0 {
        return Err(Error::DegenerateMetric(
            "correlation undefined for a zero-variance signal".into(),
        ));
    }
    Ok((sce / (scc * see).sqrt()).clamp(-1.0, 1.0))
}

/// The metric triple of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Output SNR in dB; `+∞` when the estimate is exact.
    pub snr_db: f64,
    /// `None` when either signal has zero variance.
    pub correlation: Option<f64>,
    pub mse: f64,
}

impl Metrics {
    pub fn compute(clean: &Signal, estimate: &Signal) -> Result<Self> {
        let correlation = match correlation(clean, estimate) {
            Ok(c) => Some(c),
            Err(Error::DegenerateMetric(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Metrics {
            snr_db: snr_db(clean, estimate)?,
            correlation,
            mse: mse(clean, estimate)?,
        })
    }
}

/// Metrics of one cancellation run plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AncReport {
    pub algorithm: Algorithm,
    pub order: usize,
    /// μ for LMS/NLMS, the forgetting factor for RLS.
    pub step_size: f64,
    pub noise_kind: NoiseKind,
    pub seed: u64,
    pub input_snr_db: f64,
    /// `None` when the run diverged.
    pub metrics: Option<Metrics>,
    pub diverged_at: Option<usize>,
}

impl AncReport {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn snr_db(&self) -> Option<f64> {
        self.metrics.map(|m| m.snr_db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec(), 8000).unwrap()
    }

    #[test]
    fn mse_examples() {
        let x = sig(&[0.3, -0.1, 0.8]);
        assert_eq!(mse(&x, &x).unwrap(), 0.0);
        assert_eq!(mse(&sig(&[1.0, 1.0]), &sig(&[0.0, 0.0])).unwrap(), 1.0);
        let v = mse(&sig(&[1.0, 2.0, 3.0]), &sig(&[1.0, 1.0, 1.0])).unwrap();
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mse_errors() {
        assert!(mse(&sig(&[]), &sig(&[])).is_err());
        assert!(matches!(
            mse(&sig(&[1.0]), &sig(&[1.0, 2.0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn snr_examples() {
        let x = sig(&[1.0, -1.0]);
        assert_eq!(snr_db(&x, &x).unwrap(), f64::INFINITY);
        // residual equals the clean signal
        assert_eq!(snr_db(&x, &sig(&[0.0, 0.0])).unwrap(), 0.0);
        // clean power 1, residual power 4
        let v = snr_db(&x, &sig(&[3.0, -3.0])).unwrap();
        assert!((v - 10.0 * 0.25f64.log10()).abs() < 1e-12);
        assert!((v + 6.0206).abs() < 1e-4);
        assert!(snr_db(&sig(&[0.0, 0.0]), &x).is_err());
    }

    #[test]
    fn correlation_examples() {
        let x = sig(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(correlation(&x, &x).unwrap(), 1.0);
        let neg = sig(&[-1.0, -2.0, -3.0, -4.0]);
        assert_eq!(correlation(&x, &neg).unwrap(), -1.0);
        let scaled = sig(&[2.0, 4.0, 6.0, 8.0]);
        assert!((correlation(&x, &scaled).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_degenerate() {
        let x = sig(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            correlation(&x, &sig(&[5.0, 5.0, 5.0])),
            Err(Error::DegenerateMetric(_))
        ));
        assert!(correlation(&sig(&[1.0]), &sig(&[1.0])).is_err());
        let m = Metrics::compute(&x, &sig(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(m.correlation, None);
    }

    proptest! {
        #[test]
        fn correlation_affine_sign(
            xs in prop::collection::vec(-1.0f64..1.0, 3..64),
            a in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
            b in -10.0f64..10.0,
        ) {
            let x = sig(&xs);
            prop_assume!(x.samples().iter().any(|v| (v - xs[0]).abs() > 1e-3));
            let y = sig(&xs.iter().map(|v| a * v + b).collect::<Vec<_>>());
            let c = correlation(&y, &x).unwrap();
            prop_assert!((c - a.signum()).abs() < 1e-9, "{}", c);
        }

        #[test]
        fn mse_and_snr_move_together(
            xs in prop::collection::vec(-1.0f64..1.0, 4..64),
            r1 in prop::collection::vec(-1.0f64..1.0, 64),
            s1 in 0.01f64..2.0,
            s2 in 0.01f64..2.0,
        ) {
            let clean = sig(&xs);
            prop_assume!(clean.energy() > 1e-6);
            let est = |s: f64| sig(&xs.iter().zip(&r1).map(|(x, r)| x + s * r).collect::<Vec<_>>());
            let (e1, e2) = (est(s1), est(s2));
            let (m1, m2) = (mse(&clean, &e1).unwrap(), mse(&clean, &e2).unwrap());
            let (q1, q2) = (snr_db(&clean, &e1).unwrap(), snr_db(&clean, &e2).unwrap());
            prop_assume!(m1 > 0.0 && m2 > 0.0 && m1 != m2);
            prop_assert_eq!(m1 < m2, q1 > q2);
        }
    }
}

use crate::error::{Error, Result};
use crate::filters::check_order;
use crate::signal::Signal;

const TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 1_000_000;

/// Biased sample autocorrelation `r[k] = (1/L) Σ x[i]·x[i+k]` for lags
/// `0..order`.
pub(crate) fn autocorrelation(x: &[f64], order: usize) -> Vec<f64> {
    let len = x.len() as f64;
    (0..order)
        .map(|k| {
            if k >= x.len() {
                return 0.0;
            }
            x.iter().zip(&x[k..]).map(|(a, b)| a * b).sum::<f64>() / len
        })
        .collect()
}

/// Largest eigenvalue of the symmetric Toeplitz matrix with first row `r`,
/// by power iteration until the residual `‖R v − θ v‖` drops below
/// `1e-8 · θ`.
pub(crate) fn toeplitz_max_eigenvalue(r: &[f64]) -> f64 {
    let n = r.len();
    let apply = |v: &[f64], out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = v
                .iter()
                .enumerate()
                .map(|(j, vj)| r[i.abs_diff(j)] * vj)
                .sum();
        }
    };
    // asymmetric start so it is not orthogonal to a skew-symmetric eigenvector
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 / (i + 1) as f64).collect();
    normalize(&mut v);
    let mut rv = vec![0.0; n];
    let mut theta = 0.0;
    for _ in 0..MAX_ITERATIONS {
        apply(&v, &mut rv);
        theta = v.iter().zip(&rv).map(|(a, b)| a * b).sum();
        let residual = rv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= TOLERANCE * theta.abs() {
            break;
        }
        v.copy_from_slice(&rv);
        if normalize(&mut v) == 0.0 {
            return 0.0;
        }
    }
    theta
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Upper step-size bound `1 / λ_max(R)` for LMS, where `R` is the `N × N`
/// autocorrelation matrix estimated from `reference`.
///
/// This bounds convergence of the mean weights. Mean-square stability of
/// white input needs roughly `μ < 2 / (N + 2)σ²`, which is tighter for
/// `N > 2`.
pub fn lms_step_bound(reference: &Signal, order: usize) -> Result<f64> {
    check_order(order)?;
    if reference.is_empty() {
        return Err(Error::config("reference signal is empty"));
    }
    let r = autocorrelation(reference.samples(), order);
    if r[0] <= 0.0 {
        return Err(Error::UndefinedBound);
    }
    let lambda_max = toeplitz_max_eigenvalue(&r);
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::UndefinedBound);
    }
    Ok(1.0 / lambda_max)
}

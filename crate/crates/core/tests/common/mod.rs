//! Shared helpers for the integration tests: a brute-force reference
//! transcription of the three update rules, written from the textbook
//! formulas without touching the library's tap line or weight types.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use anc_core::filters::{AdaptiveFilter, Algorithm, FilterConfig};

/// Per-sample `(y, e)` pairs.
pub type Trace = Vec<(f64, f64)>;

/// Regressor `[x(n), x(n-1), …, x(n-N+1)]` with zeros before the start.
pub fn regressor(x: &[f64], n: usize, order: usize) -> DVector<f64> {
    DVector::from_fn(order, |k, _| if k <= n { x[n - k] } else { 0.0 })
}

pub fn oracle_lms(d: &[f64], x: &[f64], order: usize, mu: f64) -> Trace {
    let mut w = DVector::<f64>::zeros(order);
    (0..d.len())
        .map(|n| {
            let u = regressor(x, n, order);
            let y = w.dot(&u);
            let e = d[n] - y;
            w += mu * e * &u;
            (y, e)
        })
        .collect()
}

pub fn oracle_nlms(d: &[f64], x: &[f64], order: usize, mu: f64, eps: f64) -> Trace {
    let mut w = DVector::<f64>::zeros(order);
    (0..d.len())
        .map(|n| {
            let u = regressor(x, n, order);
            let y = w.dot(&u);
            let e = d[n] - y;
            let power = u.norm_squared();
            if power + eps > 0.0 {
                w += (mu * e / (eps + power)) * &u;
            }
            (y, e)
        })
        .collect()
}

/// Exponentially weighted RLS with `P(0) = δI`, a-priori error.
pub fn oracle_rls(d: &[f64], x: &[f64], order: usize, m: f64, delta: f64) -> (Trace, DMatrix<f64>) {
    let mut w = DVector::<f64>::zeros(order);
    let mut p = DMatrix::<f64>::identity(order, order) * delta;
    let trace = (0..d.len())
        .map(|n| {
            let u = regressor(x, n, order);
            let pu = &p * &u;
            let k = &pu / (m + u.dot(&pu));
            let y = w.dot(&u);
            let e = d[n] - y;
            w += &k * e;
            p = (&p - &k * u.transpose() * &p) / m;
            (y, e)
        })
        .collect();
    (trace, p)
}

/// Runs the library filter over the same streams.
pub fn library_trace(alg: Algorithm, d: &[f64], x: &[f64], order: usize, step: f64) -> Trace {
    let mut f = FilterConfig::from_parts(alg, order, step).unwrap().build();
    d.iter()
        .zip(x)
        .map(|(&dn, &xn)| {
            let s = f.process_sample(dn, xn).unwrap();
            (s.output, s.error)
        })
        .collect()
}

pub fn max_trace_diff(a: &Trace, b: &Trace) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|((y1, e1), (y2, e2))| (y1 - y2).abs().max((e1 - e2).abs()))
        .fold(0.0, f64::max)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller, independent of the library's generator.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn white(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| gaussian(&mut rng)).collect()
}

/// First-order autoregressive process `x(n) = ρ x(n-1) + √(1-ρ²) g(n)`,
/// unit variance.
pub fn ar1(len: usize, rho: f64, seed: u64) -> Vec<f64> {
    let g = white(len, seed);
    let c = (1.0 - rho * rho).sqrt();
    let mut prev = 0.0;
    g.iter()
        .map(|v| {
            prev = rho * prev + c * v;
            prev
        })
        .collect()
}

/// `d(n) = Σ h[k] x(n-k) + σ g(n)`.
pub fn plant(x: &[f64], h: &[f64], sigma: f64, seed: u64) -> Vec<f64> {
    let g = white(x.len(), seed);
    (0..x.len())
        .map(|n| {
            let clean: f64 = h
                .iter()
                .enumerate()
                .filter(|(k, _)| *k <= n)
                .map(|(k, hk)| hk * x[n - k])
                .sum();
            clean + sigma * g[n]
        })
        .collect()
}

/// Biased autocorrelation matrix of `x`, built densely.
pub fn autocorrelation_matrix(x: &[f64], order: usize) -> DMatrix<f64> {
    let len = x.len() as f64;
    DMatrix::from_fn(order, order, |i, j| {
        let lag = i.abs_diff(j);
        x.iter().zip(&x[lag..]).map(|(a, b)| a * b).sum::<f64>() / len
    })
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.max()
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// `√2·sin(2π f n / fs)` plus a little white noise: a narrowband input whose
/// power sits almost entirely in the largest autocorrelation eigenvalue.
pub fn narrowband(len: usize, freq_hz: f64, rate: f64, noise: f64, seed: u64) -> Vec<f64> {
    let g = white(len, seed);
    (0..len)
        .map(|n| {
            std::f64::consts::SQRT_2
                * (2.0 * std::f64::consts::PI * freq_hz * n as f64 / rate).sin()
                + noise * g[n]
        })
        .collect()
}

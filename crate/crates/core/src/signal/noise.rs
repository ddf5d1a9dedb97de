use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// The two corruption processes.
///
/// "Random" noise is i.i.d. uniform on `[-a, a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseKind {
    WhiteGaussian,
    UniformRandom,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 2] = [NoiseKind::WhiteGaussian, NoiseKind::UniformRandom];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::WhiteGaussian => "white",
            NoiseKind::UniformRandom => "random",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "white" | "white_gaussian" | "gaussian" => Ok(NoiseKind::WhiteGaussian),
            "random" | "uniform_random" | "uniform" => Ok(NoiseKind::UniformRandom),
            other => Err(Error::config(format!(
                "unknown noise kind `{other}` (expected white or random)"
            ))),
        }
    }
}

/// Noise generator parameters.
///
/// `level` is the standard deviation for white Gaussian noise and the
/// half-width `a` for uniform noise. The stream is a pure function of
/// `(kind, level, seed)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, level: f64, seed: u64) -> Result<Self> {
        if !level.is_finite() || level < 0.0 {
            return Err(Error::config(format!(
                "noise level must be finite and non-negative, got {level}"
            )));
        }
        Ok(NoiseSpec { kind, level, seed })
    }
}

/// Generates `length` samples of seeded noise.
///
/// The PRNG is ChaCha8 seeded through `seed_from_u64`; Gaussian samples come
/// from the Box–Muller transform, two per pair of uniforms.
pub fn gen_noise(spec: &NoiseSpec, length: usize, sample_rate: u32) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples = match spec.kind {
        NoiseKind::WhiteGaussian => {
            let mut out = Vec::with_capacity(length + 1);
            while out.len() < length {
                // 1 - u lies in (0, 1], keeping the log finite.
                let u1: f64 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen();
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, c) = (TAU * u2).sin_cos();
                out.push(spec.level * r * c);
                out.push(spec.level * r * s);
            }
            out.truncate(length);
            out
        }
        NoiseKind::UniformRandom => (0..length)
            .map(|_| spec.level * (2.0 * rng.gen::<f64>() - 1.0))
            .collect(),
    };
    Signal::from_finite(samples, sample_rate)
}

/// Gain `s` such that `s · noise` sits `target_snr_db` below `clean`;
/// 0 for the `+∞` sentinel.
pub fn snr_scale(clean: &Signal, noise: &Signal, target_snr_db: f64) -> Result<f64> {
    if target_snr_db.is_nan() || target_snr_db == f64::NEG_INFINITY {
        return Err(Error::config(format!(
            "invalid target SNR {target_snr_db} dB"
        )));
    }
    let clean_power = clean.power();
    if clean_power <= 0.0 {
        return Err(Error::config("clean signal has zero power"));
    }
    if target_snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    let noise_power = noise.power();
    if noise_power <= 0.0 {
        return Err(Error::config(
            "noise has zero power; cannot reach a finite SNR",
        ));
    }
    Ok((clean_power / (noise_power * 10f64.powf(target_snr_db / 10.0))).sqrt())
}

/// Scales `noise` so that `10·log10(P_clean / P_noise) == target_snr_db` and
/// adds it to `clean`. Returns `(corrupted, scaled_noise)`.
///
/// `target_snr_db = +∞` is the no-noise sentinel: the scaled noise is all
/// zeros and the corrupted signal equals `clean`.
pub fn mix_at_snr(clean: &Signal, noise: &Signal, target_snr_db: f64) -> Result<(Signal, Signal)> {
    clean.check_compatible(noise)?;
    let scale = snr_scale(clean, noise, target_snr_db)?;
    let scaled: Vec<f64> = noise.samples().iter().map(|n| n * scale).collect();
    let corrupted = clean
        .samples()
        .iter()
        .zip(&scaled)
        .map(|(x, n)| x + n)
        .collect();
    Ok((
        Signal::new(corrupted, clean.sample_rate())?,
        Signal::new(scaled, clean.sample_rate())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(kind: NoiseKind, level: f64, seed: u64) -> NoiseSpec {
        NoiseSpec::new(kind, level, seed).unwrap()
    }

    #[test]
    fn empty_length() {
        assert!(gen_noise(&spec(NoiseKind::WhiteGaussian, 1.0, 1), 0, 8000).is_empty());
    }

    #[test]
    fn seed_determinism() {
        for kind in NoiseKind::ALL {
            let a = gen_noise(&spec(kind, 1.0, 7), 1001, 8000);
            let b = gen_noise(&spec(kind, 1.0, 7), 1001, 8000);
            let c = gen_noise(&spec(kind, 1.0, 8), 1001, 8000);
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn gaussian_moments_large_sample() {
        let len = 1_000_000;
        let sigma = 0.5;
        let s = gen_noise(&spec(NoiseKind::WhiteGaussian, sigma, 2024), len, 8000);
        let mean = s.samples().iter().sum::<f64>() / len as f64;
        let var = s.samples().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len as f64;
        assert!(
            mean.abs() < 4.0 * sigma / (len as f64).sqrt(),
            "mean {mean}"
        );
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn uniform_variance() {
        let len = 200_000;
        let s = gen_noise(&spec(NoiseKind::UniformRandom, 1.0, 3), len, 8000);
        let var = s.power();
        assert!((var - 1.0 / 3.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn mix_at_zero_db_matches_power() {
        let clean = gen_noise(&spec(NoiseKind::UniformRandom, 0.3, 1), 4000, 8000);
        let noise = gen_noise(&spec(NoiseKind::WhiteGaussian, 2.0, 2), 4000, 8000);
        let (_, scaled) = mix_at_snr(&clean, &noise, 0.0).unwrap();
        assert!((scaled.power() / clean.power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mix_infinite_snr_passthrough() {
        let clean = Signal::new(vec![0.1, -0.2, 0.3], 8000).unwrap();
        let noise = Signal::new(vec![1.0, 1.0, -1.0], 8000).unwrap();
        let (corrupted, scaled) = mix_at_snr(&clean, &noise, f64::INFINITY).unwrap();
        assert_eq!(corrupted, clean);
        assert!(scaled.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn mix_scale_factor_hand_computed() {
        // clean power 0.04, noise power 1.0, 10 dB -> scale sqrt(0.004)
        let clean = Signal::new(vec![0.2, -0.2, 0.2, -0.2], 8000).unwrap();
        let noise = Signal::new(vec![1.0, -1.0, -1.0, 1.0], 8000).unwrap();
        let (_, scaled) = mix_at_snr(&clean, &noise, 10.0).unwrap();
        let expected = 0.004f64.sqrt();
        for (s, n) in scaled.samples().iter().zip(noise.samples()) {
            assert!((s - expected * n).abs() < 1e-15);
        }
    }

    #[test]
    fn mix_rejects_silent_clean_and_mismatch() {
        let zero = Signal::silence(3, 8000).unwrap();
        let noise = Signal::new(vec![1.0, 1.0, 1.0], 8000).unwrap();
        assert!(matches!(
            mix_at_snr(&zero, &noise, 0.0),
            Err(Error::Config(_))
        ));
        let short = Signal::new(vec![1.0], 8000).unwrap();
        assert!(mix_at_snr(&noise, &short, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn uniform_never_exceeds_amplitude(a in 0.0f64..10.0, seed: u64) {
            let s = gen_noise(&spec(NoiseKind::UniformRandom, a, seed), 512, 8000);
            prop_assert!(s.samples().iter().all(|x| x.abs() <= a));
        }

        #[test]
        fn mix_power_ratio_holds(seed: u64, snr in -20.0f64..40.0, gain in 0.01f64..10.0) {
            let clean = gen_noise(&spec(NoiseKind::UniformRandom, gain, seed), 256, 8000);
            let noise = gen_noise(&spec(NoiseKind::WhiteGaussian, 1.0, seed ^ 0x5a5a), 256, 8000);
            let (corrupted, scaled) = mix_at_snr(&clean, &noise, snr).unwrap();
            let got = 10.0 * (clean.power() / scaled.power()).log10();
            prop_assert!(((got - snr) / snr.abs().max(1.0)).abs() < 1e-9);
            for ((c, x), n) in corrupted.samples().iter().zip(clean.samples()).zip(scaled.samples()) {
                prop_assert_eq!(*c, x + n);
            }
        }
    }
}

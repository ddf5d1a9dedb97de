use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::Signal;

const PEAK: f64 = 0.9;
const HARMONICS: usize = 4;

#[derive(Clone, Copy)]
enum Segment {
    Voiced { f0_start: f64, f0_end: f64 },
    Unvoiced,
    Silence,
}

/// Deterministic speech-like test signal.
///
/// Alternates voiced syllables (four harmonics of a gliding pitch under a
/// raised-cosine envelope), short fricative bursts (differenced noise) and
/// silence gaps, then normalises the peak to 0.9.
pub fn synth_speech(duration_s: f64, sample_rate: u32, seed: u64) -> Result<Signal> {
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(Error::config(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    if sample_rate == 0 {
        return Err(Error::config("sample rate must be positive"));
    }
    let len = (duration_s * sample_rate as f64).round() as usize;
    if len == 0 {
        return Err(Error::config("duration shorter than one sample"));
    }
    let fs = sample_rate as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    let mut phase = 0.0f64;
    let mut last_noise = 0.0f64;
    let mut next_voiced = true;

    while out.len() < len {
        let segment = if next_voiced {
            let f0_start = rng.gen_range(100.0..200.0);
            Segment::Voiced {
                f0_start,
                f0_end: f0_start * rng.gen_range(0.8..1.25),
            }
        } else if rng.gen_bool(0.5) {
            Segment::Unvoiced
        } else {
            Segment::Silence
        };
        next_voiced = !next_voiced;

        let seg_s = match segment {
            Segment::Voiced { .. } => rng.gen_range(0.15..0.30),
            Segment::Unvoiced => rng.gen_range(0.05..0.10),
            Segment::Silence => rng.gen_range(0.03..0.08),
        };
        let seg_len = ((seg_s * fs) as usize).clamp(1, len - out.len());
        let amps: [f64; HARMONICS] =
            std::array::from_fn(|k| rng.gen_range(0.5..1.0) / (k + 1) as f64);
        let gain = rng.gen_range(0.6..1.0);

        for i in 0..seg_len {
            let t = i as f64 / seg_len as f64;
            let envelope = 0.5 - 0.5 * (TAU * t).cos();
            let sample = match segment {
                Segment::Voiced { f0_start, f0_end } => {
                    let f0 = f0_start + (f0_end - f0_start) * t;
                    phase = (phase + TAU * f0 / fs) % TAU;
                    // slow syllabic tremor on top of the envelope
                    let tremor = 1.0 + 0.2 * (PI * 3.0 * t).sin();
                    let voiced: f64 = amps
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * ((k + 1) as f64 * phase).sin())
                        .sum();
                    gain * envelope * tremor * voiced
                }
                Segment::Unvoiced => {
                    let white = rng.gen_range(-1.0..1.0);
                    let hiss = white - last_noise;
                    last_noise = white;
                    0.15 * gain * envelope * hiss
                }
                Segment::Silence => 0.0,
            };
            out.push(sample);
        }
    }

    let peak = out.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        let scale = PEAK / peak;
        out.iter_mut().for_each(|s| *s *= scale);
    }
    Signal::new(out, sample_rate)
}

use std::path::PathBuf;

use crate::error::Result;
use crate::filters::{process_block, Algorithm, FilterConfig};
use crate::metrics::{AncReport, Metrics};
use crate::signal::{
    apply_channel, gen_noise, snr_scale, synth_speech, wav, ChannelSpec, NoiseSpec, Signal,
};

/// Where the clean signal comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Wav(PathBuf),
    Synth {
        seed: u64,
        duration_s: f64,
        sample_rate: u32,
    },
}

impl Source {
    pub fn load(&self) -> Result<Signal> {
        match self {
            Source::Wav(path) => wav::wav_read(path),
            Source::Synth {
                seed,
                duration_s,
                sample_rate,
            } => synth_speech(*duration_s, *sample_rate, *seed),
        }
    }
}

/// One cancellation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub order: usize,
    /// μ for LMS/NLMS, forgetting factor for RLS.
    pub step_size: f64,
    pub noise: NoiseSpec,
    pub channel: ChannelSpec,
    /// SNR of the corrupted primary input; `+∞` disables the noise.
    pub input_snr_db: f64,
    pub source: Source,
}

impl RunConfig {
    pub fn filter_config(&self) -> Result<FilterConfig> {
        FilterConfig::from_parts(self.algorithm, self.order, self.step_size)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: AncReport,
    /// Error signal of the filter; `None` when the run diverged.
    pub denoised: Option<Signal>,
}

/// The two canceller inputs built from a clean signal.
#[derive(Debug, Clone)]
pub struct AncInputs {
    pub primary: Signal,
    pub reference: Signal,
}

/// Builds primary and reference inputs for `clean`.
pub fn build_inputs(
    clean: &Signal,
    noise: &NoiseSpec,
    channel: &ChannelSpec,
    input_snr_db: f64,
) -> Result<AncInputs> {
    let raw = gen_noise(noise, clean.len(), clean.sample_rate());
    let shaped = apply_channel(&raw, channel);
    let scale = snr_scale(clean, &shaped, input_snr_db)?;
    let primary = clean
        .samples()
        .iter()
        .zip(shaped.samples())
        .map(|(x, v)| x + scale * v)
        .collect();
    let reference = raw.samples().iter().map(|v| scale * v).collect();
    Ok(AncInputs {
        primary: Signal::new(primary, clean.sample_rate())?,
        reference: Signal::new(reference, clean.sample_rate())?,
    })
}

/// Loads the configured source and runs the canceller on it.
pub fn run_anc(config: &RunConfig) -> Result<RunOutput> {
    let clean = config.source.load()?;
    run_anc_on(config, &clean)
}

/// Runs the canceller on an already loaded clean signal; `config.source`
/// is only echoed.
///
/// Divergence is not an error here: it comes back as a report with
/// `diverged_at` set and no metrics.
pub fn run_anc_on(config: &RunConfig, clean: &Signal) -> Result<RunOutput> {
    run_parts(
        clean,
        config.algorithm,
        config.order,
        config.step_size,
        &config.noise,
        &config.channel,
        config.input_snr_db,
    )
}

pub(crate) fn run_parts(
    clean: &Signal,
    algorithm: Algorithm,
    order: usize,
    step_size: f64,
    noise: &NoiseSpec,
    channel: &ChannelSpec,
    input_snr_db: f64,
) -> Result<RunOutput> {
    let mut filter = FilterConfig::from_parts(algorithm, order, step_size)?.build();
    let inputs = build_inputs(clean, noise, channel, input_snr_db)?;
    let mut report = AncReport {
        algorithm,
        order,
        step_size,
        noise_kind: noise.kind,
        seed: noise.seed,
        input_snr_db,
        metrics: None,
        diverged_at: None,
    };
    match process_block(&mut filter, &inputs.primary, &inputs.reference, &[]) {
        Ok(out) => {
            report.metrics = Some(Metrics::compute(clean, &out.error)?);
            Ok(RunOutput {
                report,
                denoised: Some(out.error),
            })
        }
        Err(e) if e.is_divergence() => {
            report.diverged_at = e.fault_sample();
            Ok(RunOutput {
                report,
                denoised: None,
            })
        }
        Err(e) => Err(e),
    }
}

//! Command-line layer of the `anc` binary.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 I/O or WAV
//! parse error, 4 filter divergence.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::Error;
use crate::filters::{lms_step_bound, Algorithm, DEFAULT_FORGETTING};
use crate::harness::{
    build_inputs, emit_table, run_sweep, RunConfig, Source, SweepGrid, TableFormat,
    FIXTURE_DURATION_S, FIXTURE_RATE, FIXTURE_SEED,
};
use crate::metrics::AncReport;
use crate::signal::{synth_speech, wav, ChannelSpec, NoiseKind, NoiseSpec, Signal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "anc",
    version,
    about = "Adaptive noise cancellation with LMS, NLMS and RLS filters"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corrupt a speech signal with seeded noise and cancel it with one filter.
    Denoise(DenoiseArgs),
    /// Run the comparison grid and render the results table.
    Sweep(SweepArgs),
    /// Write the synthetic speech fixture as a WAV file.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Clean speech WAV (16-bit PCM; stereo is downmixed).
    #[arg(long, value_name = "WAV", conflicts_with = "synth")]
    pub input: Option<PathBuf>,

    /// Use synthetic speech generated from this seed instead of a WAV file.
    #[arg(long, value_name = "SEED")]
    pub synth: Option<u64>,

    /// Synthetic speech duration in seconds (> 0).
    #[arg(long, default_value_t = FIXTURE_DURATION_S)]
    pub duration: f64,

    /// Synthetic speech sample rate in Hz (> 0).
    #[arg(long, default_value_t = FIXTURE_RATE)]
    pub rate: u32,

    /// lms, nlms or rls.
    #[arg(long, default_value = "nlms")]
    pub algorithm: String,

    /// Filter length N (>= 1).
    #[arg(long, default_value_t = 10)]
    pub order: usize,

    /// LMS: step size > 0; mean convergence needs mu <= 1/lambda_max of the
    /// reference autocorrelation matrix (printed on stderr), and
    /// mean-square stability needs less for long filters.
    /// NLMS: normalised step in the open range (0, 2).
    /// RLS: forgetting factor in (0, 1] (default 0.999).
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,

    /// white (Gaussian) or random (uniform on [-a, a]).
    #[arg(long, default_value = "white")]
    pub noise: String,

    /// SNR of the corrupted input in dB; `inf` disables the noise.
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub input_snr_db: f64,

    /// Noise seed (any u64).
    #[arg(long, env = "ANC_SEED", default_value_t = FIXTURE_SEED)]
    pub seed: u64,

    /// Noise path: identity, lowpass3, room, or comma-separated taps.
    #[arg(long, default_value = "identity")]
    pub channel: String,

    /// Write the denoised signal here.
    #[arg(long, value_name = "WAV")]
    pub out: Option<PathBuf>,

    /// Write the report record here (it is always printed on stdout).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,

    /// `key = value` file whose keys are flag names; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `key = value` grid file (orders, step_sizes, algorithms, noise_kinds,
    /// repetitions, rls_forgetting, input_snr_db, channel, noise_level, seed).
    #[arg(long, value_name = "PATH")]
    pub grid: Option<PathBuf>,

    /// Clean signal: a WAV path or `synth:SEED` (2 s at 8 kHz).
    #[arg(long, default_value = "synth:42")]
    pub fixture: String,

    /// text, csv or records.
    #[arg(long, default_value = "text")]
    pub format: String,

    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Master seed, any u64 (overrides the grid file).
    #[arg(long, env = "ANC_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Duration in seconds (> 0).
    #[arg(long, default_value_t = FIXTURE_DURATION_S, allow_hyphen_values = true)]
    pub duration: f64,

    /// Sample rate in Hz (> 0).
    #[arg(long, default_value_t = FIXTURE_RATE)]
    pub rate: u32,

    /// Generator seed (any u64).
    #[arg(long, env = "ANC_SEED", default_value_t = FIXTURE_SEED)]
    pub seed: u64,

    /// Output WAV (16-bit PCM mono).
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
}

/// Failure of a subcommand, already classified by exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Wav(_) | Error::Io(_) => EXIT_IO,
            Error::Diverged { .. } | Error::Breakdown { .. } => EXIT_DIVERGED,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses a `key = value` file. `#` starts a comment line; keys are
/// normalised to snake_case.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", i + 1))?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", i + 1));
        }
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_key_values(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn flag_present(args: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    args.iter()
        .filter_map(|a| a.to_str())
        .any(|a| a == flag || a.starts_with(&eq))
}

/// Splices `--config` file entries in front of the command-line flags so
/// that explicit flags win.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "denoise") else {
        return Ok(args);
    };
    let tail = &args[pos + 1..];
    let path = tail.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        if s == "--config" {
            tail.get(i + 1).map(PathBuf::from)
        } else {
            s.strip_prefix("--config=").map(PathBuf::from)
        }
    });
    let Some(path) = path else {
        return Ok(args);
    };
    let entries = read_config(&path)?;
    let cmd = Cli::command();
    let denoise = cmd
        .find_subcommand("denoise")
        .expect("denoise subcommand exists");
    let known: Vec<String> = denoise
        .get_arguments()
        .filter_map(|a| a.get_long())
        .map(|l| l.replace('-', "_"))
        .collect();
    let cli_has_source = flag_present(tail, "--input") || flag_present(tail, "--synth");

    let mut expanded: Vec<OsString> = args[..=pos].to_vec();
    for (key, value) in entries {
        if !known.contains(&key) || key == "config" {
            return Err(CliError::usage(format!(
                "{}: unknown key `{key}`",
                path.display()
            )));
        }
        if cli_has_source && (key == "input" || key == "synth") {
            continue;
        }
        expanded.push(format!("--{}", key.replace('_', "-")).into());
        expanded.push(value.into());
    }
    expanded.extend_from_slice(tail);
    Ok(expanded)
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            return e.code;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Denoise(a) => cmd_denoise(&a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(&a, stdout),
        Command::Synth(a) => cmd_synth(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

pub fn parse_channel(text: &str) -> Result<ChannelSpec, Error> {
    if let Some(ch) = ChannelSpec::by_name(text.trim()) {
        return Ok(ch);
    }
    let taps = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            Error::Config(format!(
                "channel `{text}` is neither identity, lowpass3, room nor a tap list"
            ))
        })?;
    ChannelSpec::new(taps)
}

/// One `key=value` line echoing everything needed to rerun the report.
pub fn report_record(report: &AncReport, channel: &str, source: &Source) -> String {
    let source = match source {
        Source::Wav(p) => format!("input={}", p.display()),
        Source::Synth {
            seed,
            duration_s,
            sample_rate,
        } => format!("synth={seed} duration={duration_s} rate={sample_rate}"),
    };
    let (snr, corr, mse) = match report.metrics {
        Some(m) => (
            m.snr_db.to_string(),
            m.correlation.map(|c| c.to_string()).unwrap_or_default(),
            m.mse.to_string(),
        ),
        None => Default::default(),
    };
    format!(
        "{source} algorithm={} order={} mu={} noise={} input_snr_db={} seed={} channel={} snr_db={snr} correlation={corr} mse={mse} diverged_at={}",
        report.algorithm,
        report.order,
        report.step_size,
        report.noise_kind,
        report.input_snr_db,
        report.seed,
        channel.replace(' ', ""),
        report.diverged_at.map(|d| d.to_string()).unwrap_or_default(),
    )
}

fn cmd_denoise(
    a: &DenoiseArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let source = match (&a.input, a.synth) {
        (Some(path), None) => Source::Wav(path.clone()),
        (None, Some(seed)) => Source::Synth {
            seed,
            duration_s: a.duration,
            sample_rate: a.rate,
        },
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "--input and --synth cannot be used together",
            ))
        }
        (None, None) => {
            return Err(CliError::usage(
                "no input source: pass --input <WAV> or --synth <SEED>\n\n\
                 Usage: anc denoise (--input <WAV> | --synth <SEED>) [OPTIONS]\n\n\
                 For more information, try 'anc denoise --help'.",
            ));
        }
    };
    let algorithm: Algorithm = a.algorithm.parse()?;
    let step_size = a.mu.unwrap_or(match algorithm {
        Algorithm::Rls => DEFAULT_FORGETTING,
        _ => 0.05,
    });
    let config = RunConfig {
        algorithm,
        order: a.order,
        step_size,
        noise: NoiseSpec::new(a.noise.parse::<NoiseKind>()?, 1.0, a.seed)?,
        channel: parse_channel(&a.channel)?,
        input_snr_db: a.input_snr_db,
        source: source.clone(),
    };
    config.filter_config()?;

    let clean = source.load()?;
    if algorithm == Algorithm::Lms {
        let inputs = build_inputs(&clean, &config.noise, &config.channel, config.input_snr_db)?;
        match lms_step_bound(&inputs.reference, config.order) {
            Ok(bound) => {
                let _ = writeln!(
                    stderr,
                    "LMS step bound 1/lambda_max = {bound:.6} (mu = {step_size})"
                );
            }
            Err(Error::UndefinedBound) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let output = crate::harness::run_anc_on(&config, &clean)?;
    let record = report_record(&output.report, &a.channel, &source);
    let _ = writeln!(stdout, "{record}");
    if let Some(path) = &a.report {
        fs::write(path, format!("{record}\n")).map_err(Error::from)?;
    }
    if let Some(at) = output.report.diverged_at {
        return Err(CliError {
            code: EXIT_DIVERGED,
            message: format!("{} filter diverged at sample {at}", algorithm),
        });
    }
    if let (Some(path), Some(denoised)) = (&a.out, &output.denoised) {
        wav::wav_write(path, denoised)?;
    }
    Ok(())
}

fn list<T>(key: &str, value: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    let items: Option<Vec<T>> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect();
    match items {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::usage(format!(
            "grid key `{key}`: cannot parse `{value}`"
        ))),
    }
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("grid key `{key}`: cannot parse `{value}`")))
}

/// Builds a grid from `key = value` text, starting from the defaults.
pub fn parse_grid(text: &str) -> Result<SweepGrid, CliError> {
    let entries = parse_key_values(text).map_err(CliError::usage)?;
    let mut grid = SweepGrid::default();
    for (key, value) in &entries {
        let (k, v) = (key.as_str(), value.as_str());
        match k {
            "orders" => grid.orders = list(k, v, |s| s.parse().ok())?,
            "step_sizes" => grid.step_sizes = list(k, v, |s| s.parse().ok())?,
            "algorithms" => grid.algorithms = list(k, v, |s| s.parse().ok())?,
            "noise_kinds" => grid.noise_kinds = list(k, v, |s| s.parse().ok())?,
            "repetitions" => grid.repetitions = scalar(k, v)?,
            "rls_forgetting" => grid.rls_forgetting = scalar(k, v)?,
            "input_snr_db" => grid.input_snr_db = scalar(k, v)?,
            "noise_level" => grid.noise_level = scalar(k, v)?,
            "seed" => grid.master_seed = scalar(k, v)?,
            "channel" => {
                grid.channel = parse_channel(v)
                    .map_err(|e| CliError::usage(format!("grid key `channel`: {e}")))?
            }
            other => return Err(CliError::usage(format!("unknown grid key `{other}`"))),
        }
    }
    Ok(grid)
}

fn load_fixture(spec: &str) -> Result<Signal, CliError> {
    match spec.strip_prefix("synth:") {
        Some(seed) => {
            let seed: u64 = seed
                .parse()
                .map_err(|_| CliError::usage(format!("bad fixture seed in `{spec}`")))?;
            Ok(synth_speech(FIXTURE_DURATION_S, FIXTURE_RATE, seed)?)
        }
        None => Ok(wav::wav_read(spec)?),
    }
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut grid = match &a.grid {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError {
                code: EXIT_IO,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_grid(&text).map_err(|e| CliError {
                code: e.code,
                message: format!("{}: {}", path.display(), e.message),
            })?
        }
        None => SweepGrid::default(),
    };
    if let Some(seed) = a.seed {
        grid.master_seed = seed;
    }
    let format: TableFormat = a.format.parse()?;
    grid.validate()?;
    let fixture = load_fixture(&a.fixture)?;
    let table = run_sweep(&grid, &fixture)?;
    let rendered = emit_table(&table, format);
    match &a.out {
        Some(path) => fs::write(path, rendered).map_err(Error::from)?,
        None => stdout.write_all(rendered.as_bytes()).map_err(Error::from)?,
    }
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let signal = synth_speech(a.duration, a.rate, a.seed)?;
    wav::wav_write(&a.out, &signal)?;
    Ok(())
}

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::{Algorithm, FilterConfig, DEFAULT_FORGETTING};
use crate::harness::run::run_parts;
use crate::harness::{standard_channel, FIXTURE_INPUT_SNR_DB, FIXTURE_SEED};
use crate::metrics::AncReport;
use crate::signal::{ChannelSpec, NoiseKind, NoiseSpec, Signal};

/// Axes and constants of a sweep.
///
/// RLS has no step size: its cells use `rls_forgetting` whatever the step
/// row, so the RLS column repeats down the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub orders: Vec<usize>,
    pub step_sizes: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub noise_kinds: Vec<NoiseKind>,
    pub repetitions: usize,
    pub rls_forgetting: f64,
    pub input_snr_db: f64,
    pub channel: ChannelSpec,
    /// Generator level before SNR scaling (σ or half-width).
    pub noise_level: f64,
    pub master_seed: u64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            orders: vec![5, 10, 15],
            step_sizes: vec![0.05, 0.10, 0.15],
            algorithms: Algorithm::ALL.to_vec(),
            noise_kinds: NoiseKind::ALL.to_vec(),
            repetitions: 5,
            rls_forgetting: DEFAULT_FORGETTING,
            input_snr_db: FIXTURE_INPUT_SNR_DB,
            channel: standard_channel(),
            noise_level: 1.0,
            master_seed: FIXTURE_SEED,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty()
            || self.step_sizes.is_empty()
            || self.algorithms.is_empty()
            || self.noise_kinds.is_empty()
        {
            return Err(Error::config("sweep grid has an empty axis"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("sweep needs at least one repetition"));
        }
        NoiseSpec::new(NoiseKind::WhiteGaussian, self.noise_level, 0)?;
        for &order in &self.orders {
            for &alg in &self.algorithms {
                let step = match alg {
                    Algorithm::Rls => self.rls_forgetting,
                    _ => {
                        for &mu in &self.step_sizes {
                            FilterConfig::from_parts(alg, order, mu)?;
                        }
                        continue;
                    }
                };
                FilterConfig::from_parts(alg, order, step)?;
            }
        }
        Ok(())
    }

    pub fn cells_per_repetition(&self) -> usize {
        self.orders.len() * self.step_sizes.len() * self.algorithms.len() * self.noise_kinds.len()
    }

    /// Cell coordinates in table order: order, step, noise kind, algorithm.
    fn coordinates(&self) -> Vec<(usize, f64, NoiseKind, Algorithm)> {
        let mut out = Vec::with_capacity(self.cells_per_repetition());
        for &order in &self.orders {
            for &mu in &self.step_sizes {
                for &kind in &self.noise_kinds {
                    for &alg in &self.algorithms {
                        out.push((order, mu, kind, alg));
                    }
                }
            }
        }
        out
    }
}

/// Noise seed of repetition `repetition`: `master ⊕ splitmix64(repetition)`.
///
/// Every cell of one repetition sees the same noise stream, so algorithms,
/// orders and step sizes are compared on identical realisations, and new
/// grid axes never move an existing cell's seed.
pub fn cell_seed(master: u64, repetition: usize) -> u64 {
    master ^ splitmix64(repetition as u64)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// All repetitions of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub algorithm: Algorithm,
    pub noise_kind: NoiseKind,
    pub order: usize,
    /// Step row of the grid (also for RLS, whose filter ignores it).
    pub step_size: f64,
    pub reports: Vec<AncReport>,
}

/// Means over the non-diverged repetitions of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub snr_db: Option<f64>,
    pub correlation: Option<f64>,
    pub mse: Option<f64>,
    pub runs: usize,
    pub diverged: usize,
}

impl SweepCell {
    pub fn summary(&self) -> CellSummary {
        let ok: Vec<_> = self.reports.iter().filter_map(|r| r.metrics).collect();
        let mean = |vals: Vec<f64>| {
            if vals.is_empty() {
                None
            } else {
                Some(vals.iter().sum::<f64>() / vals.len() as f64)
            }
        };
        let correlations: Option<Vec<f64>> = ok.iter().map(|m| m.correlation).collect();
        CellSummary {
            snr_db: mean(ok.iter().map(|m| m.snr_db).collect()),
            correlation: correlations.and_then(mean),
            mse: mean(ok.iter().map(|m| m.mse).collect()),
            runs: self.reports.len(),
            diverged: self.reports.len() - ok.len(),
        }
    }

    pub fn mean_snr_db(&self) -> Option<f64> {
        self.summary().snr_db
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub grid: SweepGrid,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn empty(grid: SweepGrid) -> Self {
        SweepTable {
            grid,
            cells: Vec::new(),
        }
    }

    pub fn cell(
        &self,
        algorithm: Algorithm,
        noise_kind: NoiseKind,
        order: usize,
        step_size: f64,
    ) -> Option<&SweepCell> {
        self.cells.iter().find(|c| {
            c.algorithm == algorithm
                && c.noise_kind == noise_kind
                && c.order == order
                && c.step_size == step_size
        })
    }

    pub fn reports(&self) -> impl Iterator<Item = &AncReport> {
        self.cells.iter().flat_map(|c| c.reports.iter())
    }
}

/// Runs every grid cell for every repetition on `fixture`.
///
/// Cells run in parallel and are reassembled in table order, so the result
/// is a pure function of `(grid, fixture)`. A diverged cell is recorded,
/// never fatal.
pub fn run_sweep(grid: &SweepGrid, fixture: &Signal) -> Result<SweepTable> {
    grid.validate()?;
    let coords = grid.coordinates();
    let jobs: Vec<(usize, usize)> = (0..coords.len())
        .flat_map(|cell| (0..grid.repetitions).map(move |rep| (cell, rep)))
        .collect();

    let reports = jobs
        .par_iter()
        .map(|&(cell, rep)| {
            let (order, mu, kind, alg) = coords[cell];
            let step = if alg == Algorithm::Rls {
                grid.rls_forgetting
            } else {
                mu
            };
            let noise = NoiseSpec::new(kind, grid.noise_level, cell_seed(grid.master_seed, rep))?;
            run_parts(
                fixture,
                alg,
                order,
                step,
                &noise,
                &grid.channel,
                grid.input_snr_db,
            )
            .map(|out| out.report)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut reports = reports.into_iter();
    let cells = coords
        .into_iter()
        .map(|(order, step_size, noise_kind, algorithm)| SweepCell {
            algorithm,
            noise_kind,
            order,
            step_size,
            reports: reports.by_ref().take(grid.repetitions).collect(),
        })
        .collect();
    Ok(SweepTable {
        grid: grid.clone(),
        cells,
    })
}

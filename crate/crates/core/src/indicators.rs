//! The express integral indicator and whole-run system state.
//!
//! For each valid step `t` the indicator of parameter `i` is the absolute row
//! sum of the window correlation matrix, `G_i(t) = Σ_j |r_ij(t)|` (diagonal
//! included). The per-step total is `G(t) = Σ_i G_i(t)` and the system state
//! is `G = Σ_t G(t)` over the valid range `t ∈ [k + 1, t_max]`.
//!
//! Strategies are compared by `ΔG = G_base − G_strategy`, so a negative delta
//! means the alternative strategy is the more interconnected system.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{
    blocked_rows, correlation_of_window, CorrelationConfig, CorrelationMatrix, CorrelationMode, PreparedWindow,
    RollingMoments, DEFAULT_REINIT_INTERVAL,
};
use crate::error::{Error, Result};
use crate::model::{window_slice, Dataset, WindowSpec};

pub const DEFAULT_BLOCK_SIZE: usize = 64;

/// Route used to evaluate the per-step matrices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    /// Slide [`RollingMoments`] through the run.
    #[default]
    Rolling,
    /// Recompute each step from its window, tile by tile.
    Recompute,
    /// Recompute and materialize the full matrix at each step.
    FullMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorConfig {
    #[serde(flatten)]
    pub correlation: CorrelationConfig,
    pub evaluation: Evaluation,
    pub block_size: usize,
    pub reinit_interval: usize,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        IndicatorConfig {
            correlation: CorrelationConfig::default(),
            evaluation: Evaluation::Rolling,
            block_size: DEFAULT_BLOCK_SIZE,
            reinit_interval: DEFAULT_REINIT_INTERVAL,
        }
    }
}

impl IndicatorConfig {
    pub fn with_mode(mode: CorrelationMode) -> Self {
        let mut c = Self::default();
        c.correlation.mode = mode;
        c
    }

    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self
    }
}

/// `G_i(t)` for every valid `t`, with per-step and whole-run totals.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    k: usize,
    mode: CorrelationMode,
    first_t: usize,
    g_rows: Vec<Vec<f64>>,
    g_step: Vec<f64>,
    g_total: f64,
    inactive: Vec<usize>,
}

impl IndicatorSeries {
    /// Assembles a series from per-step indicator vectors, starting at `first_t`.
    pub fn from_rows(
        k: usize,
        mode: CorrelationMode,
        first_t: usize,
        g_rows: Vec<Vec<f64>>,
        inactive: Vec<usize>,
    ) -> Self {
        assert_eq!(g_rows.len(), inactive.len());
        let g_step: Vec<f64> = g_rows.iter().map(|r| r.iter().sum()).collect();
        let g_total = g_step.iter().sum();
        IndicatorSeries {
            k,
            mode,
            first_t,
            g_rows,
            g_step,
            g_total,
            inactive,
        }
    }

    /// A series known only through its per-step totals, e.g. reported figures.
    pub fn from_step_totals(k: usize, mode: CorrelationMode, first_t: usize, g_step: Vec<f64>) -> Self {
        let len = g_step.len();
        Self::from_rows(
            k,
            mode,
            first_t,
            g_step.into_iter().map(|g| vec![g]).collect(),
            vec![0; len],
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> CorrelationMode {
        self.mode
    }

    pub fn first_t(&self) -> usize {
        self.first_t
    }

    pub fn last_t(&self) -> usize {
        self.first_t + self.g_step.len() - 1
    }

    pub fn times(&self) -> std::ops::RangeInclusive<usize> {
        self.first_t..=self.last_t()
    }

    pub fn len(&self) -> usize {
        self.g_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_step.is_empty()
    }

    /// `(G_1(t), …, G_n(t))` for the `idx`-th valid step.
    pub fn g_rows(&self) -> &[Vec<f64>] {
        &self.g_rows
    }

    pub fn g_step(&self) -> &[f64] {
        &self.g_step
    }

    pub fn g_total(&self) -> f64 {
        self.g_total
    }

    /// Inactive column count at each step.
    pub fn inactive_counts(&self) -> &[usize] {
        &self.inactive
    }

    /// `G(t)` at time step `t`, if it is in range.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.first_t).and_then(|i| self.g_step.get(i).copied())
    }
}

/// `G_i = Σ_j |r_ij|` for each row of `corr`.
pub fn express_indicator(corr: &CorrelationMatrix) -> Vec<f64> {
    (0..corr.n())
        .map(|i| corr.row(i).iter().map(|r| r.abs()).sum())
        .collect()
}

pub fn indicator_series(dataset: &Dataset, spec: WindowSpec, config: &IndicatorConfig) -> Result<IndicatorSeries> {
    let (first, last) = spec.range_for(dataset.t_max())?;
    let corr = &config.correlation;
    let per_step: Vec<(Vec<f64>, usize)> = match config.evaluation {
        Evaluation::Rolling => {
            let mut moments = RollingMoments::init(dataset, spec, config.reinit_interval)?;
            let mut out = Vec::with_capacity(last - first + 1);
            for t in first..=last {
                out.push((
                    moments.indicator_rows(corr),
                    moments.inactive_count(corr.variance_threshold),
                ));
                if t < last {
                    moments.advance(dataset)?;
                }
            }
            out
        }
        Evaluation::Recompute => {
            let block = config.block_size.max(1);
            (first..=last)
                .into_par_iter()
                .map(|t| {
                    let prepared = PreparedWindow::new(&window_slice(dataset, t, spec)?, corr);
                    let inactive = prepared.active.iter().filter(|a| !**a).count();
                    Ok((blocked_rows(&prepared, block), inactive))
                })
                .collect::<Result<_>>()?
        }
        Evaluation::FullMatrix => (first..=last)
            .into_par_iter()
            .map(|t| {
                let matrix = correlation_of_window(&window_slice(dataset, t, spec)?, corr);
                Ok((express_indicator(&matrix), matrix.inactive_count()))
            })
            .collect::<Result<_>>()?,
    };
    let (g_rows, inactive) = per_step.into_iter().unzip();
    Ok(IndicatorSeries::from_rows(spec.k(), corr.mode, first, g_rows, inactive))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    pub first_t: usize,
    /// `G_a − G_b` over the whole run.
    pub delta_total: f64,
    /// `G_a(t) − G_b(t)` per step.
    pub delta_step: Vec<f64>,
}

/// `ΔG = G_a − G_b`; `a` is the base strategy.
///
/// Both series must share `k`, mode and time range.
pub fn compare_strategies(a: &IndicatorSeries, b: &IndicatorSeries) -> Result<ComparisonResult> {
    if a.k != b.k {
        return Err(Error::ConfigMismatch(format!("window k differs: {} vs {}", a.k, b.k)));
    }
    if a.mode != b.mode {
        return Err(Error::ConfigMismatch(format!("mode differs: {} vs {}", a.mode, b.mode)));
    }
    if a.first_t != b.first_t || a.len() != b.len() {
        return Err(Error::ConfigMismatch(format!(
            "time range differs: [{}, {}] vs [{}, {}]",
            a.first_t,
            a.last_t(),
            b.first_t,
            b.last_t()
        )));
    }
    Ok(ComparisonResult {
        first_t: a.first_t,
        delta_total: a.g_total - b.g_total,
        delta_step: a.g_step.iter().zip(&b.g_step).map(|(x, y)| x - y).collect(),
    })
}

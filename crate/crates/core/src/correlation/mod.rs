//! Window correlation matrices `R_k(t)`.
//!
//! Three evaluation routes produce the same numbers:
//!
//! * [`correlation_at`] recomputes the full `n × n` matrix from the window.
//! * [`RollingMoments`] keeps running sums over the window and slides it one
//!   step at a time in `O(n²)`, instead of `O(k·n²)` per recomputation.
//! * [`indicator_rows_blocked`] never materializes the matrix and only
//!   returns the absolute row sums, working through `B × B` tiles.
//!
//! Two estimators are available. [`CorrelationMode::Pearson`] centres and
//! scales each window column (sample statistics, denominator `k - 1`).
//! [`CorrelationMode::RawMoment`] is the uncentred product sum
//! `r_ij = Σ_l x^i(t-l) x^j(t-l) / (k - 1)`.
//!
//! In Pearson mode a column whose window sample variance is below the
//! configured threshold is *inactive*: its whole row and column, diagonal
//! included, are zero. The raw-moment estimator has no such policy.

mod blocked;
mod rolling;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{window_slice, Dataset, Window, WindowSpec};

pub(crate) use blocked::blocked_rows;
pub use blocked::indicator_rows_blocked;
pub use rolling::{RollingMoments, DEFAULT_REINIT_INTERVAL};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationMode {
    #[default]
    Pearson,
    RawMoment,
}

impl std::fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrelationMode::Pearson => "pearson",
            CorrelationMode::RawMoment => "raw-moment",
        })
    }
}

impl std::str::FromStr for CorrelationMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pearson" => Ok(CorrelationMode::Pearson),
            "raw-moment" | "raw" => Ok(CorrelationMode::RawMoment),
            other => Err(format!("unknown mode `{other}` (expected pearson or raw-moment)")),
        }
    }
}

/// Estimator settings shared by every evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationConfig {
    pub mode: CorrelationMode,
    /// Absolute bound on the window sample variance below which a column is inactive.
    pub variance_threshold: f64,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        CorrelationConfig {
            mode: CorrelationMode::Pearson,
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
        }
    }
}

impl CorrelationConfig {
    pub fn pearson() -> Self {
        Self::default()
    }

    pub fn raw_moment() -> Self {
        CorrelationConfig {
            mode: CorrelationMode::RawMoment,
            ..Self::default()
        }
    }
}

/// Dense symmetric `n × n` correlation matrix for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    t: usize,
    n: usize,
    mode: CorrelationMode,
    entries: Vec<f64>,
    active: Vec<bool>,
}

impl CorrelationMatrix {
    /// Wraps a row-major table. Panics if it is not square or not symmetric.
    pub fn from_entries(t: usize, mode: CorrelationMode, n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * n, "matrix must be n x n");
        for i in 0..n {
            for j in 0..i {
                assert_eq!(entries[i * n + j], entries[j * n + i], "matrix must be symmetric");
            }
        }
        let active = (0..n).map(|i| entries[i * n + i] != 0.0).collect();
        CorrelationMatrix {
            t,
            n,
            mode,
            entries,
            active,
        }
    }

    pub(crate) fn from_upper(
        t: usize,
        mode: CorrelationMode,
        active: Vec<bool>,
        mut entry: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let n = active.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let r = entry(i, j);
                entries[i * n + j] = r;
                entries[j * n + i] = r;
            }
        }
        CorrelationMatrix {
            t,
            n,
            mode,
            entries,
            active,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> CorrelationMode {
        self.mode
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Whether column `i` had variance at or above the threshold in this window.
    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn inactive_count(&self) -> usize {
        self.active.iter().filter(|a| !**a).count()
    }
}

/// Sample mean and variance (denominator `len - 1`) by two passes, in slice order.
///
/// Every route computes column statistics through this function, in the same
/// newest-first order, so activity decisions agree bit for bit.
pub(crate) fn column_stats(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (k - 1.0))
}

/// Window columns transformed so that `r_ij = <p_i, p_j> / (k - 1)`.
pub(crate) struct PreparedWindow {
    pub k: usize,
    pub n: usize,
    pub mode: CorrelationMode,
    pub data: Vec<f64>,
    pub active: Vec<bool>,
}

impl PreparedWindow {
    pub fn new(window: &Window, config: &CorrelationConfig) -> Self {
        let (k, n) = (window.k(), window.n());
        let mut data = Vec::with_capacity(k * n);
        let mut active = Vec::with_capacity(n);
        for i in 0..n {
            let col = window.column(i);
            let (mean, var) = column_stats(col);
            let is_active = var >= config.variance_threshold && var > 0.0;
            active.push(is_active);
            match config.mode {
                CorrelationMode::Pearson if is_active => {
                    let sd = var.sqrt();
                    data.extend(col.iter().map(|v| (v - mean) / sd));
                }
                CorrelationMode::Pearson => data.extend(std::iter::repeat_n(0.0, k)),
                CorrelationMode::RawMoment => data.extend_from_slice(col),
            }
        }
        PreparedWindow {
            k,
            n,
            mode: config.mode,
            data,
            active,
        }
    }

    fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self.mode {
            CorrelationMode::Pearson => {
                if !self.active[i] || !self.active[j] {
                    0.0
                } else if i == j {
                    1.0
                } else {
                    let dot: f64 = self.column(i).iter().zip(self.column(j)).map(|(a, b)| a * b).sum();
                    (dot / (self.k - 1) as f64).clamp(-1.0, 1.0)
                }
            }
            CorrelationMode::RawMoment => {
                let dot: f64 = self.column(i).iter().zip(self.column(j)).map(|(a, b)| a * b).sum();
                dot / (self.k - 1) as f64
            }
        }
    }
}

/// Full correlation matrix of the window ending just before `t`.
pub fn correlation_at(
    dataset: &Dataset,
    t: usize,
    spec: WindowSpec,
    config: &CorrelationConfig,
) -> Result<CorrelationMatrix> {
    let window = window_slice(dataset, t, spec)?;
    Ok(correlation_of_window(&window, config))
}

pub fn correlation_of_window(window: &Window, config: &CorrelationConfig) -> CorrelationMatrix {
    let prepared = PreparedWindow::new(window, config);
    CorrelationMatrix::from_upper(window.t(), config.mode, prepared.active.clone(), |i, j| {
        prepared.entry(i, j)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dataset whose window at t = k + 1 has the given columns (newest first).
    fn window_dataset(columns: &[&[f64]]) -> (Dataset, usize, WindowSpec) {
        let k = columns[0].len();
        // window rows are x(k), …, x(1): reverse into chronological order, add x(k+1)
        let mut rows: Vec<Vec<f64>> = (0..k).rev().map(|l| columns.iter().map(|c| c[l]).collect()).collect();
        rows.push(vec![0.0; columns.len()]);
        (Dataset::unlabeled(&rows).unwrap(), k + 1, WindowSpec::new(k).unwrap())
    }

    fn textbook_pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn perfect_positive_dependence() {
        let (ds, t, spec) = window_dataset(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        let r = correlation_at(&ds, t, spec, &CorrelationConfig::pearson()).unwrap();
        assert!((r.get(0, 1) - 1.0).abs() < 1e-15);
        assert_eq!(r.get(0, 0), 1.0);
        assert_eq!(r.get(1, 1), 1.0);
    }

    #[test]
    fn perfect_negative_dependence() {
        let (ds, t, spec) = window_dataset(&[&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]]);
        let r = correlation_at(&ds, t, spec, &CorrelationConfig::pearson()).unwrap();
        assert!((r.get(0, 1) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_dependence_matches_hand_value() {
        // cov = 0.5, var1 = 7/3, var2 = 1
        let expected = 0.5 / (7.0f64 / 3.0).sqrt();
        assert!((textbook_pearson(&[1.0, 2.0, 4.0], &[1.0, 3.0, 2.0]) - expected).abs() < 1e-15);
        let (ds, t, spec) = window_dataset(&[&[1.0, 2.0, 4.0], &[1.0, 3.0, 2.0]]);
        let r = correlation_at(&ds, t, spec, &CorrelationConfig::pearson()).unwrap();
        assert!((r.get(0, 1) - expected).abs() < 1e-14);
        assert!((r.get(0, 1) - 0.3273).abs() < 1e-4);
    }

    #[test]
    fn raw_moment_is_uncentred_product_sum() {
        let (ds, t, spec) = window_dataset(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        let r = correlation_at(&ds, t, spec, &CorrelationConfig::raw_moment()).unwrap();
        assert_eq!(r.get(0, 1), 14.0);
        assert_eq!(r.get(1, 0), 14.0);
        assert_eq!(r.get(0, 0), 7.0);
        assert_eq!(r.mode(), CorrelationMode::RawMoment);
    }

    #[test]
    fn constant_column_is_inactive() {
        let (ds, t, spec) = window_dataset(&[&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0], &[3.0, 1.0, 2.0]]);
        let r = correlation_at(&ds, t, spec, &CorrelationConfig::pearson()).unwrap();
        for j in 0..3 {
            assert_eq!(r.get(1, j), 0.0);
            assert_eq!(r.get(j, 1), 0.0);
        }
        assert_eq!(r.inactive_count(), 1);
        assert!(!r.is_active(1));
        assert_eq!(r.get(0, 0), 1.0);
    }

    #[test]
    fn out_of_range_propagates() {
        let (ds, _, spec) = window_dataset(&[&[1.0, 2.0, 3.0]]);
        assert!(correlation_at(&ds, 3, spec, &CorrelationConfig::pearson()).is_err());
    }

    #[test]
    fn mode_parses() {
        assert_eq!("pearson".parse::<CorrelationMode>().unwrap(), CorrelationMode::Pearson);
        assert_eq!(
            "raw-moment".parse::<CorrelationMode>().unwrap(),
            CorrelationMode::RawMoment
        );
        assert!("spearman".parse::<CorrelationMode>().is_err());
        assert_eq!(CorrelationMode::RawMoment.to_string(), "raw-moment");
    }
}

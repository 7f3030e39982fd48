//! System identification types: the time axis, the parameter space and the
//! look-back window used to analyse the system at each time step.
//!
//! A [`Dataset`] is the system `S = {T, X}`: `t_max` periods, each described
//! by an `n`-vector of parameter values. Time indices are 1-based throughout
//! the public API, matching how periods are numbered in the input files.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which part of the parameter space a column belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParameterSpace {
    Actual,
    Control,
    Environment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterMeta {
    pub id: String,
    pub name: String,
    pub space: ParameterSpace,
    #[serde(default)]
    pub units: String,
}

impl ParameterMeta {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        space: ParameterSpace,
        units: impl Into<String>,
    ) -> Self {
        ParameterMeta {
            id: id.into(),
            name: name.into(),
            space,
            units: units.into(),
        }
    }
}

/// Rectangular `t_max × n` table of finite values, stored column-major.
///
/// Immutable once built; every constructor validates shape, finiteness and
/// id uniqueness.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    t_max: usize,
    meta: Vec<ParameterMeta>,
    // column i occupies values[i * t_max .. (i + 1) * t_max]
    values: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from one value series per parameter.
    pub fn from_columns(meta: Vec<ParameterMeta>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if meta.len() != columns.len() {
            return Err(Error::Schema(format!(
                "{} metadata entries for {} columns",
                meta.len(),
                columns.len()
            )));
        }
        let t_max = columns.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(t_max * columns.len());
        for (m, col) in meta.iter().zip(&columns) {
            if col.len() != t_max {
                return Err(Error::LengthMismatch {
                    id: m.id.clone(),
                    expected: t_max,
                    actual: col.len(),
                });
            }
            values.extend_from_slice(col);
        }
        Self::from_column_major(meta, t_max, values)
    }

    /// Builds a dataset from row vectors `x(1) … x(t_max)`.
    pub fn from_rows(meta: Vec<ParameterMeta>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = meta.len();
        let t_max = rows.len();
        let mut values = vec![0.0; n * t_max];
        for (t, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    id: format!("row {}", t + 1),
                    expected: n,
                    actual: row.len(),
                });
            }
            for (i, &v) in row.iter().enumerate() {
                values[i * t_max + t] = v;
            }
        }
        Self::from_column_major(meta, t_max, values)
    }

    pub(crate) fn from_column_major(meta: Vec<ParameterMeta>, t_max: usize, values: Vec<f64>) -> Result<Self> {
        if t_max == 0 || meta.is_empty() {
            return Err(Error::EmptyData);
        }
        debug_assert_eq!(values.len(), t_max * meta.len());
        let mut seen = HashSet::with_capacity(meta.len());
        for m in &meta {
            if m.id.is_empty() {
                return Err(Error::Schema("empty parameter id".into()));
            }
            if !seen.insert(m.id.as_str()) {
                return Err(Error::DuplicateParameter(m.id.clone()));
            }
        }
        for (i, col) in values.chunks_exact(t_max).enumerate() {
            if let Some(t) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    parameter: meta[i].id.clone(),
                    t: t + 1,
                });
            }
        }
        Ok(Dataset { t_max, meta, values })
    }

    /// Convenience constructor with generated ids `x1 … xn`, all tagged `Actual`.
    pub fn unlabeled(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let meta = (1..=n)
            .map(|i| ParameterMeta::new(format!("x{i}"), format!("x{i}"), ParameterSpace::Actual, ""))
            .collect();
        Self::from_rows(meta, rows)
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn n(&self) -> usize {
        self.meta.len()
    }

    pub fn meta(&self) -> &[ParameterMeta] {
        &self.meta
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.meta.iter().position(|m| m.id == id)
    }

    /// Full series of parameter `i` (0-based column), indexed by `t - 1`.
    pub fn column(&self, i: usize) -> &[f64] {
        &self.values[i * self.t_max..(i + 1) * self.t_max]
    }

    /// Value of parameter `i` at time `t` (1-based).
    pub fn value(&self, t: usize, i: usize) -> f64 {
        assert!((1..=self.t_max).contains(&t), "t = {t} out of 1..={}", self.t_max);
        self.values[i * self.t_max + t - 1]
    }

    /// The state vector `x(t)` (1-based `t`).
    pub fn row(&self, t: usize) -> Vec<f64> {
        (0..self.n()).map(|i| self.value(t, i)).collect()
    }

    pub(crate) fn row_into(&self, t: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.values[i * self.t_max + t - 1];
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<ParameterMeta>, usize, Vec<f64>) {
        (self.meta, self.t_max, self.values)
    }
}

/// Look-back window length `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct WindowSpec {
    k: usize,
}

impl WindowSpec {
    pub const DEFAULT_K: usize = 6;

    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidWindow(k));
        }
        Ok(WindowSpec { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Valid time steps `[k + 1, t_max]` for a dataset of `t_max` steps.
    pub fn range_for(&self, t_max: usize) -> Result<(usize, usize)> {
        if t_max < self.k + 1 {
            return Err(Error::InsufficientData { t_max, k: self.k });
        }
        Ok((self.k + 1, t_max))
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec { k: Self::DEFAULT_K }
    }
}

impl TryFrom<usize> for WindowSpec {
    type Error = Error;
    fn try_from(k: usize) -> Result<Self> {
        WindowSpec::new(k)
    }
}

impl From<WindowSpec> for usize {
    fn from(w: WindowSpec) -> usize {
        w.k
    }
}

/// First and last valid time step for `dataset` under `spec`.
pub fn analysis_range(dataset: &Dataset, spec: WindowSpec) -> Result<(usize, usize)> {
    spec.range_for(dataset.t_max())
}

/// The `k × n` window matrix for time `t`: rows `x(t-1), x(t-2), …, x(t-k)`.
///
/// The current state `x(t)` is not part of its own window.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    t: usize,
    k: usize,
    n: usize,
    // column-major: column i is data[i * k .. (i + 1) * k], newest first
    data: Vec<f64>,
}

impl Window {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Column `i` of the window, ordered `x^i(t-1), …, x^i(t-k)`.
    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    /// Row `l` (1-based), i.e. `x(t - l)`.
    pub fn row(&self, l: usize) -> Vec<f64> {
        assert!((1..=self.k).contains(&l));
        (0..self.n).map(|i| self.data[i * self.k + l - 1]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (1..=self.k).map(|l| self.row(l)).collect()
    }
}

pub fn window_slice(dataset: &Dataset, t: usize, spec: WindowSpec) -> Result<Window> {
    let k = spec.k();
    if t < k + 1 || t > dataset.t_max() {
        return Err(Error::OutOfRange {
            t,
            first: k + 1,
            last: dataset.t_max(),
        });
    }
    let n = dataset.n();
    let mut data = Vec::with_capacity(k * n);
    for i in 0..n {
        let col = dataset.column(i);
        // x(t-1) sits at index t-2
        data.extend((1..=k).map(|l| col[t - 1 - l]));
    }
    Ok(Window { t, k, n, data })
}

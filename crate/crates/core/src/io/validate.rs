use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::correlation::column_stats;
use crate::model::{Dataset, WindowSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    InsufficientData { t_max: usize, k: usize },
    NeverActive { id: String },
    DuplicateColumns { first: String, second: String },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::InsufficientData { t_max, k } => {
                write!(f, "InsufficientData: t_max = {t_max} < k + 1 = {}", k + 1)
            }
            Finding::NeverActive { id } => write!(f, "column `{id}` is inactive in every window (0% active)"),
            Finding::DuplicateColumns { first, second } => {
                write!(f, "columns `{first}` and `{second}` are identical")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub id: String,
    pub min: f64,
    pub max: f64,
    /// Fraction of analysis windows with variance at or above the threshold;
    /// `None` when no window fits in the data.
    pub active_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub t_max: usize,
    pub n: usize,
    pub k: usize,
    pub analysis_range: Option<(usize, usize)>,
    pub min: f64,
    pub max: f64,
    pub columns: Vec<ColumnSummary>,
    pub duplicates: Vec<(String, String)>,
    pub findings: Vec<Finding>,
}

impl ValidationSummary {
    /// The window fits in the data, so indicators can be computed.
    pub fn is_analyzable(&self) -> bool {
        self.analysis_range.is_some()
    }
}

/// Diagnostic pass over a dataset: feasibility, column activity, duplicates
/// and value ranges.
pub fn validate(dataset: &Dataset, spec: WindowSpec, variance_threshold: f64) -> ValidationSummary {
    let k = spec.k();
    let range = spec.range_for(dataset.t_max()).ok();
    let mut findings = Vec::new();
    if range.is_none() {
        findings.push(Finding::InsufficientData {
            t_max: dataset.t_max(),
            k,
        });
    }

    let mut columns = Vec::with_capacity(dataset.n());
    let mut window = Vec::with_capacity(k);
    for (i, m) in dataset.meta().iter().enumerate() {
        let col = dataset.column(i);
        let min = col.iter().copied().fold(f64::INFINITY, f64::min);
        let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let active_fraction = range.map(|(first, last)| {
            let active = (first..=last)
                .filter(|&t| {
                    window.clear();
                    window.extend((1..=k).map(|l| col[t - 1 - l]));
                    let (_, var) = column_stats(&window);
                    var >= variance_threshold && var > 0.0
                })
                .count();
            active as f64 / (last - first + 1) as f64
        });
        if active_fraction == Some(0.0) {
            findings.push(Finding::NeverActive { id: m.id.clone() });
        }
        columns.push(ColumnSummary {
            id: m.id.clone(),
            min,
            max,
            active_fraction,
        });
    }

    let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for i in 0..dataset.n() {
        let key = dataset.column(i).iter().map(|v| v.to_bits()).collect();
        groups.entry(key).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = groups
        .values()
        .flat_map(|g| {
            g.iter()
                .enumerate()
                .flat_map(move |(a, &i)| g[a + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    pairs.sort_unstable();
    let id = |i: usize| dataset.meta()[i].id.clone();
    let duplicates: Vec<(String, String)> = pairs.iter().map(|&(i, j)| (id(i), id(j))).collect();
    for (a, b) in &duplicates {
        findings.push(Finding::DuplicateColumns {
            first: a.clone(),
            second: b.clone(),
        });
    }

    ValidationSummary {
        t_max: dataset.t_max(),
        n: dataset.n(),
        k,
        analysis_range: range,
        min: columns.iter().map(|c| c.min).fold(f64::INFINITY, f64::min),
        max: columns.iter().map(|c| c.max).fold(f64::NEG_INFINITY, f64::max),
        columns,
        duplicates,
        findings,
    }
}

impl fmt::Display for ValidationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "t_max = {}, n = {}, k = {}", self.t_max, self.n, self.k)?;
        match self.analysis_range {
            Some((a, b)) => writeln!(f, "analysis range: t = {a} .. {b} ({} steps)", b - a + 1)?,
            None => writeln!(f, "analysis range: empty")?,
        }
        writeln!(f, "value range: [{}, {}]", self.min, self.max)?;
        let fractions: Vec<f64> = self.columns.iter().filter_map(|c| c.active_fraction).collect();
        if !fractions.is_empty() {
            let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
            writeln!(f, "mean column activity: {:.1}%", 100.0 * mean)?;
        }
        if self.findings.is_empty() {
            writeln!(f, "findings: none")
        } else {
            writeln!(f, "findings:")?;
            for finding in &self.findings {
                writeln!(f, "  - {finding}")?;
            }
            Ok(())
        }
    }
}

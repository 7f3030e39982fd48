use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::json::{format_number, read_json, to_json_string};
use super::FORMAT_VERSION;
use crate::correlation::CorrelationMode;
use crate::error::{Error, Result};
use crate::indicators::{Evaluation, IndicatorConfig, IndicatorSeries};
use crate::scenario::Comparison;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Effective configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub mode: CorrelationMode,
    pub variance_threshold: f64,
    pub evaluation: Evaluation,
    pub block_size: usize,
    pub reinit_interval: usize,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub rng: Option<String>,
    #[serde(default)]
    pub method_label: Option<String>,
}

impl ConfigEcho {
    pub fn new(k: usize, config: &IndicatorConfig) -> Self {
        ConfigEcho {
            k,
            mode: config.correlation.mode,
            variance_threshold: config.correlation.variance_threshold,
            evaluation: config.evaluation,
            block_size: config.block_size,
            reinit_interval: config.reinit_interval,
            threads: None,
            seeds: Vec::new(),
            rng: None,
            method_label: None,
        }
    }
}

/// One strategy's indicator dynamics `G(t)` and whole-run state `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub label: String,
    pub n: usize,
    pub g_total: f64,
    pub first_t: usize,
    pub last_t: usize,
    pub g_step: Vec<f64>,
    /// Inactive column count at each step.
    pub inactive_counts: Vec<usize>,
}

impl StrategyReport {
    pub fn from_series(label: impl Into<String>, series: &IndicatorSeries) -> Self {
        StrategyReport {
            label: label.into(),
            n: series.g_rows().first().map_or(0, Vec::len),
            g_total: series.g_total(),
            first_t: series.first_t(),
            last_t: series.last_t(),
            g_step: series.g_step().to_vec(),
            inactive_counts: series.inactive_counts().to_vec(),
        }
    }
}

/// Self-describing result file for `compute` (one strategy) and `compare` (two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub format_version: u32,
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub strategies: Vec<StrategyReport>,
    /// `G_base − G_strategy`; absent for single-strategy reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_step: Option<Vec<f64>>,
}

impl ComparisonReport {
    pub fn single(label: &str, series: &IndicatorSeries, config: ConfigEcho) -> Self {
        ComparisonReport {
            format_version: FORMAT_VERSION,
            tool: ToolInfo::default(),
            config,
            strategies: vec![StrategyReport::from_series(label, series)],
            delta_total: None,
            delta_step: None,
        }
    }

    pub fn from_comparison(base_label: &str, strategy_label: &str, cmp: &Comparison, config: ConfigEcho) -> Self {
        ComparisonReport {
            format_version: FORMAT_VERSION,
            tool: ToolInfo::default(),
            config,
            strategies: vec![
                StrategyReport::from_series(base_label, &cmp.base),
                StrategyReport::from_series(strategy_label, &cmp.strategy),
            ],
            delta_total: Some(cmp.result.delta_total),
            delta_step: Some(cmp.result.delta_step.clone()),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::InvalidReport("no strategies".into()));
        }
        for s in &self.strategies {
            if s.g_step.is_empty() {
                return Err(Error::InvalidReport(format!(
                    "strategy `{}` has an empty per-step series",
                    s.label
                )));
            }
            if s.g_step.len() != s.inactive_counts.len() || s.last_t + 1 != s.first_t + s.g_step.len() {
                return Err(Error::InvalidReport(format!(
                    "strategy `{}`: series length does not match its time range",
                    s.label
                )));
            }
        }
        if let Some(d) = &self.delta_step {
            if d.len() != self.strategies[0].g_step.len() {
                return Err(Error::InvalidReport("delta_step length mismatch".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.check()?;
        Ok(to_json_string(self))
    }
}

pub fn write_report(report: &ComparisonReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = report.to_json()?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ComparisonReport> {
    let report: ComparisonReport = read_json(path)?;
    report.check()?;
    Ok(report)
}

/// Writes `t,G_<label>,…`: the per-step totals of one or more strategies.
pub fn write_series_csv(series: &[(&str, &IndicatorSeries)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (_, first) = series
        .first()
        .ok_or_else(|| Error::InvalidReport("no series to write".into()))?;
    for (_, s) in &series[1..] {
        if s.first_t() != first.first_t() || s.len() != first.len() {
            return Err(Error::RangeMismatch {
                a_first: first.first_t(),
                a_last: first.last_t(),
                b_first: s.first_t(),
                b_last: s.last_t(),
            });
        }
    }
    let mut out = String::from("t");
    for (label, _) in series {
        out.push_str(",G_");
        out.push_str(label);
    }
    out.push('\n');
    for (idx, t) in first.times().enumerate() {
        out.push_str(&t.to_string());
        for (_, s) in series {
            out.push(',');
            out.push_str(&format_number(s.g_step()[idx]));
        }
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Parsed series CSV: labels without the `G_` prefix, time steps, one column per label.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub labels: Vec<String>,
    pub times: Vec<usize>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_series_csv(path: impl AsRef<Path>) -> Result<SeriesTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::EmptyData)?;
    let mut fields = header.split(',');
    if fields.next() != Some("t") {
        return Err(Error::Schema(format!("{}: first column must be `t`", path.display())));
    }
    let labels: Vec<String> = fields.map(|f| f.strip_prefix("G_").unwrap_or(f).to_string()).collect();
    let mut table = SeriesTable {
        columns: vec![Vec::new(); labels.len()],
        labels,
        times: Vec::new(),
    };
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let parse_err = |column: &str, message: String| Error::Parse {
            path: path.to_path_buf(),
            row: row + 2,
            column: column.to_string(),
            message,
        };
        if cells.len() != table.labels.len() + 1 {
            return Err(parse_err("-", format!("expected {} fields", table.labels.len() + 1)));
        }
        table.times.push(
            cells[0]
                .parse()
                .map_err(|_| parse_err("t", format!("bad time `{}`", cells[0])))?,
        );
        for (c, cell) in cells[1..].iter().enumerate() {
            let v = cell
                .parse()
                .map_err(|_| parse_err(&table.labels[c], format!("malformed number `{cell}`")))?;
            table.columns[c].push(v);
        }
    }
    Ok(table)
}

//! File formats: dataset CSV with a JSON metadata sidecar, strategy and
//! synthetic-spec definitions, the JSON comparison report and the per-step
//! series CSV.
//!
//! Every number is written in its shortest round-trip decimal form, so
//! parsing a written file reproduces the values bit for bit.

mod dataset;
mod json;
mod report;
mod validate;

pub use dataset::{load_csv, load_csv_with, sidecar_path, write_dataset, LoadOptions, MetadataFile};
pub use json::{format_number, read_json, write_json};
pub use report::{
    read_report, read_series_csv, write_report, write_series_csv, ComparisonReport, ConfigEcho, SeriesTable,
    StrategyReport, ToolInfo,
};
pub use validate::{validate, ColumnSummary, Finding, ValidationSummary};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{Strategy, SyntheticSpec};

pub const FORMAT_VERSION: u32 = 1;

fn format_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    #[serde(default = "format_version")]
    format_version: u32,
    #[serde(flatten)]
    strategy: Strategy,
}

pub fn read_strategy(path: impl AsRef<Path>) -> Result<Strategy> {
    let file: StrategyFile = read_json(path)?;
    Ok(file.strategy)
}

pub fn write_strategy(strategy: &Strategy, path: impl AsRef<Path>) -> Result<()> {
    write_json(
        &StrategyFile {
            format_version: FORMAT_VERSION,
            strategy: strategy.clone(),
        },
        path,
    )
}

#[derive(Serialize, Deserialize)]
struct SyntheticSpecFile {
    #[serde(default = "format_version")]
    format_version: u32,
    #[serde(flatten)]
    spec: SyntheticSpec,
}

pub fn read_synthetic_spec(path: impl AsRef<Path>) -> Result<SyntheticSpec> {
    let file: SyntheticSpecFile = read_json(path)?;
    Ok(file.spec)
}

pub fn write_synthetic_spec(spec: &SyntheticSpec, path: impl AsRef<Path>) -> Result<()> {
    write_json(
        &SyntheticSpecFile {
            format_version: FORMAT_VERSION,
            spec: spec.clone(),
        },
        path,
    )
}

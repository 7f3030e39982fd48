// Write a dataset with its metadata sidecar, load it back and run the
// validation pass.

use integral_indicators::io::{load_csv, sidecar_path, validate, write_dataset, ValidationSummary};
use integral_indicators::{Dataset, ParameterMeta, ParameterSpace, Result, WindowSpec};

pub fn run() -> Result<ValidationSummary> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let meta = vec![
        ParameterMeta::new("revenue", "Sales revenue", ParameterSpace::Actual, "currency"),
        ParameterMeta::new("audits", "Safety audits", ParameterSpace::Control, "count"),
        ParameterMeta::new("audits_copy", "Safety audits (copy)", ParameterSpace::Control, "count"),
        ParameterMeta::new("rate", "Key rate", ParameterSpace::Environment, "%"),
    ];
    let columns = vec![
        (0..12).map(|t| 100.0 + 3.0 * t as f64 + (t % 3) as f64).collect(),
        (0..12).map(|t| (t % 4) as f64).collect(),
        (0..12).map(|t| (t % 4) as f64).collect(),
        vec![7.5; 12],
    ];
    let ds = Dataset::from_columns(meta, columns)?;

    let csv = dir.path().join("plant.csv");
    write_dataset(&ds, &csv, sidecar_path(&csv))?;
    let loaded = load_csv(&csv, sidecar_path(&csv))?;
    assert_eq!(loaded, ds);

    let summary = validate(&loaded, WindowSpec::default(), 1e-12);
    print!("{summary}");
    Ok(summary)
}

fn main() -> Result<()> {
    run().map(|_| ())
}

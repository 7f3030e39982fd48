use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::json::{format_number, read_json, write_json};
use super::FORMAT_VERSION;
use crate::error::{Error, Result};
use crate::model::{Dataset, ParameterMeta};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Read blank cells as `0` (sparse ledger exports) instead of failing.
    pub fill_zero: bool,
}

/// Metadata sidecar: one entry per data column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataFile {
    pub format_version: u32,
    pub parameters: Vec<ParameterMeta>,
}

/// `data.csv` → `data.meta.json`.
pub fn sidecar_path(csv_path: impl AsRef<Path>) -> PathBuf {
    csv_path.as_ref().with_extension("meta.json")
}

pub fn load_csv(path: impl AsRef<Path>, meta_path: impl AsRef<Path>) -> Result<Dataset> {
    load_csv_with(path, meta_path, LoadOptions::default())
}

/// Reads a dataset CSV (`t` column then one column per parameter id) and its sidecar.
pub fn load_csv_with(path: impl AsRef<Path>, meta_path: impl AsRef<Path>, options: LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let meta_path = meta_path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.get(0) != Some("t") {
        return Err(Error::Schema(format!(
            "{}: first column must be `t`, found `{}`",
            path.display(),
            header.get(0).unwrap_or("")
        )));
    }
    let ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if ids.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(pos) = ids.iter().position(String::is_empty) {
        return Err(Error::Schema(format!(
            "{}: empty parameter id in header column {}",
            path.display(),
            pos + 2
        )));
    }

    let n = ids.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut record = csv::StringRecord::new();
    let mut expected_t = 1usize;
    while reader.read_record(&mut record).map_err(|e| csv_error(path, e))? {
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != n + 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: line,
                column: "-".into(),
                message: format!("expected {} fields, found {}", n + 1, record.len()),
            });
        }
        let t_cell = &record[0];
        let t: usize = t_cell.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            row: line,
            column: "t".into(),
            message: format!("malformed time index `{t_cell}`"),
        })?;
        if t != expected_t {
            return Err(Error::Schema(format!(
                "{}: line {line}: time must be consecutive from 1, expected t = {expected_t}, found {t}",
                path.display()
            )));
        }
        for (c, cell) in record.iter().skip(1).enumerate() {
            let column = || format!("{} ({})", ids[c], c + 2);
            let v = if cell.is_empty() {
                if options.fill_zero {
                    0.0
                } else {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row: line,
                        column: column(),
                        message: "blank cell".into(),
                    });
                }
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => v,
                    Ok(_) => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            row: line,
                            column: column(),
                            message: format!("non-finite value `{cell}`"),
                        })
                    }
                    Err(_) => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            row: line,
                            column: column(),
                            message: format!("malformed number `{cell}`"),
                        })
                    }
                }
            };
            columns[c].push(v);
        }
        expected_t += 1;
    }
    if expected_t == 1 {
        return Err(Error::EmptyData);
    }

    let meta = load_sidecar(meta_path, &ids)?;
    Dataset::from_columns(meta, columns)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Parse {
            path: path.to_path_buf(),
            row,
            column: "-".into(),
            message: format!("{kind:?}"),
        },
    }
}

fn load_sidecar(meta_path: &Path, ids: &[String]) -> Result<Vec<ParameterMeta>> {
    if !meta_path.exists() {
        return Err(Error::Schema(format!(
            "metadata sidecar not found: {}",
            meta_path.display()
        )));
    }
    let file: MetadataFile = read_json(meta_path)?;
    let mut by_id: HashMap<&str, &ParameterMeta> = HashMap::with_capacity(file.parameters.len());
    for m in &file.parameters {
        if by_id.insert(m.id.as_str(), m).is_some() {
            return Err(Error::Schema(format!(
                "{}: duplicate id `{}`",
                meta_path.display(),
                m.id
            )));
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateParameter(id.clone()));
        }
    }
    let data_ids: BTreeSet<&str> = ids.iter().map(String::as_str).collect();
    let meta_ids: BTreeSet<&str> = by_id.keys().copied().collect();
    if data_ids != meta_ids {
        let only_data: Vec<&str> = data_ids.difference(&meta_ids).copied().collect();
        let only_meta: Vec<&str> = meta_ids.difference(&data_ids).copied().collect();
        return Err(Error::Schema(format!(
            "parameter ids differ between data and sidecar {}: only in data {:?}, only in sidecar {:?}",
            meta_path.display(),
            only_data,
            only_meta
        )));
    }
    Ok(ids.iter().map(|id| by_id[id.as_str()].clone()).collect())
}

/// Writes the dataset CSV and its metadata sidecar.
pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>, meta_path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        write!(out, "t")?;
        for m in dataset.meta() {
            write!(out, ",{}", m.id)?;
        }
        writeln!(out)?;
        for t in 1..=dataset.t_max() {
            write!(out, "{t}")?;
            for i in 0..dataset.n() {
                write!(out, ",{}", format_number(dataset.value(t, i)))?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))?;
    write_json(
        &MetadataFile {
            format_version: FORMAT_VERSION,
            parameters: dataset.meta().to_vec(),
        },
        meta_path,
    )
}

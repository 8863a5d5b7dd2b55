//! CSV ingestion and export, plus the JSON metadata sidecar written next to
//! simulated datasets.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::simgen::Dataset;
use crate::slicing::{Response, ResponseKind};

/// Which CSV column holds the response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    /// One-based column position.
    Position(usize),
}

impl ColumnRef {
    /// A header name, or a one-based position when `s` is all digits.
    pub fn parse(s: &str) -> ColumnRef {
        match s.parse::<usize>() {
            Ok(k) => ColumnRef::Position(k),
            Err(_) => ColumnRef::Name(s.to_string()),
        }
    }
}

fn data_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn resolve_column(path: &Path, headers: &[String], column: &ColumnRef) -> Result<usize> {
    match column {
        ColumnRef::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| data_error(path, format!("unknown column {name:?}"))),
        // A header that happens to be numeric wins over the position reading.
        ColumnRef::Position(k) => match headers.iter().position(|h| *h == k.to_string()) {
            Some(j) => Ok(j),
            None if (1..=headers.len()).contains(k) => Ok(k - 1),
            None => Err(data_error(
                path,
                format!("column position {k} out of range 1..{}", headers.len()),
            )),
        },
    }
}

/// Reads a rectangular CSV with a header row. Every non-response column
/// becomes a covariate. Rows are numbered from 1, excluding the header.
///
/// Count responses must be non-negative integers and categorical responses
/// integers in `1..=levels`, where `levels` is the largest label present.
pub fn read_csv(path: impl AsRef<Path>, response: &ColumnRef, kind: ResponseKind) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers.len() < 2 {
        return Err(data_error(path, "need a response column and at least one covariate"));
    }
    let yj = resolve_column(path, &headers, response)?;
    let p = headers.len() - 1;

    let mut y_raw: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); p];
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != headers.len() {
            return Err(data_error(
                path,
                format!("row {row}: expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(data_error(path, format!("row {row}, column {:?}: missing value", headers[j])));
            }
            if j == yj {
                y_raw.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                data_error(path, format!("row {row}, column {:?}: not a number: {cell:?}", headers[j]))
            })?;
            if !v.is_finite() {
                return Err(data_error(path, format!("row {row}, column {:?}: non-finite value", headers[j])));
            }
            columns[if j < yj { j } else { j - 1 }].push(v);
        }
    }
    if y_raw.is_empty() {
        return Err(data_error(path, "no data rows"));
    }

    let yname = &headers[yj];
    let cell_error = |row: usize, what: &str, cell: &str| {
        data_error(path, format!("row {row}, column {yname:?}: {what}: {cell:?}"))
    };
    let response = match kind {
        ResponseKind::Continuous => {
            let mut y = Vec::with_capacity(y_raw.len());
            for (r, cell) in y_raw.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| cell_error(r + 1, "not a number", cell))?;
                if !v.is_finite() {
                    return Err(cell_error(r + 1, "non-finite value", cell));
                }
                y.push(v);
            }
            Response::Continuous(y)
        }
        ResponseKind::Count => Response::Count(
            y_raw
                .iter()
                .enumerate()
                .map(|(r, cell)| {
                    cell.parse::<u64>()
                        .map_err(|_| cell_error(r + 1, "count responses must be non-negative integers", cell))
                })
                .collect::<Result<_>>()?,
        ),
        ResponseKind::Categorical => {
            let values: Vec<u32> = y_raw
                .iter()
                .enumerate()
                .map(|(r, cell)| {
                    cell.parse::<u32>()
                        .map_err(|_| cell_error(r + 1, "categorical responses must be integers", cell))
                })
                .collect::<Result<_>>()?;
            let levels = values.iter().copied().max().unwrap_or(0).max(2);
            if let Some(r) = values.iter().position(|&v| v == 0) {
                return Err(data_error(
                    path,
                    format!("row {}, column {yname:?}: levels must be 1..{levels}, found 0", r + 1),
                ));
            }
            Response::Categorical { values, levels }
        }
    };

    let column_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != yj)
        .map(|(_, h)| h.clone())
        .collect();
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Dataset {
        x: Matrix::from_columns(&columns)?,
        response,
        truth: Vec::new(),
        label,
        column_names,
    })
}

/// Writes `y` followed by the covariates, using the shortest decimal form
/// that parses back to the same `f64`.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    write!(w, "y")?;
    for name in &data.column_names {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    let y: Vec<String> = match &data.response {
        Response::Continuous(v) => v.iter().map(|x| x.to_string()).collect(),
        Response::Count(v) => v.iter().map(|x| x.to_string()).collect(),
        Response::Categorical { values, .. } => values.iter().map(|x| x.to_string()).collect(),
    };
    for (i, yi) in y.iter().enumerate() {
        write!(w, "{yi}")?;
        for j in 0..data.p() {
            write!(w, ",{}", data.x.get(i, j))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Metadata written beside a simulated CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub model: String,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub response_kind: ResponseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    /// One-based indices of the active covariates.
    pub truth: Vec<usize>,
}

impl Sidecar {
    pub fn for_dataset(model: &str, seed: u64, data: &Dataset) -> Self {
        Sidecar {
            model: model.to_string(),
            seed,
            n: data.n(),
            p: data.p(),
            response_kind: data.response.kind(),
            levels: match &data.response {
                Response::Categorical { levels, .. } => Some(*levels),
                _ => None,
            },
            truth: data.truth.iter().map(|j| j + 1).collect(),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path.as_ref())?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
    }
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

//! Array files (`.npy` and plain numeric `.csv`) and analysis reports.

mod npy;
pub mod report;

use std::fs;
use std::path::Path;

use crate::dataset::{validate_dataset, LogitDataset};
use crate::error::{Error, FormatError, Result};

pub use report::{read_report_json, write_report, Provenance, Report, ReportFile, ReportFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
    I64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArrayData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    I64(Vec<i64>),
}

impl ArrayData {
    fn len(&self) -> usize {
        match self {
            ArrayData::F32(v) => v.len(),
            ArrayData::F64(v) => v.len(),
            ArrayData::I64(v) => v.len(),
        }
    }
}

/// A rank-1 or rank-2 row-major array with its on-disk dtype.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    shape: Vec<usize>,
    data: ArrayData,
}

impl Array {
    pub fn new(shape: Vec<usize>, data: ArrayData) -> Result<Self> {
        if shape.is_empty() || shape.len() > 2 {
            return Err(Error::ShapeMismatch(format!(
                "arrays must be 1-D or 2-D, got shape {shape:?}"
            )));
        }
        if shape.iter().product::<usize>() != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} does not hold {} values",
                data.len()
            )));
        }
        Ok(Array { shape, data })
    }

    pub(crate) fn from_parts(shape: Vec<usize>, data: ArrayData) -> Self {
        Array { shape, data }
    }

    pub fn matrix(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(vec![rows, cols], ArrayData::F64(values))
    }

    pub fn labels(values: Vec<i64>) -> Self {
        Array {
            shape: vec![values.len()],
            data: ArrayData::I64(values),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &ArrayData {
        &self.data
    }

    pub fn dtype(&self) -> Dtype {
        match self.data {
            ArrayData::F32(_) => Dtype::F32,
            ArrayData::F64(_) => Dtype::F64,
            ArrayData::I64(_) => Dtype::I64,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.len() == 0
    }

    fn byte_len(&self) -> usize {
        self.len() * if self.dtype() == Dtype::F32 { 4 } else { 8 }
    }

    /// `(rows, cols)`; a 1-D array is one column.
    pub fn dims(&self) -> (usize, usize) {
        match self.shape[..] {
            [n] => (n, 1),
            [r, c] => (r, c),
            _ => unreachable!("rank checked on construction"),
        }
    }

    /// Values widened to `f64`. Integers beyond 2^53 lose precision.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.data {
            ArrayData::F32(v) => v.iter().map(|&x| f64::from(x)).collect(),
            ArrayData::F64(v) => v.clone(),
            ArrayData::I64(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayFormat {
    Npy,
    Csv,
}

impl ArrayFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("npy") => Ok(ArrayFormat::Npy),
            Some("csv") => Ok(ArrayFormat::Csv),
            _ => Err(Error::format(path, FormatError::UnknownExtension)),
        }
    }
}

/// Reads an `.npy` or `.csv` array, chosen by extension.
pub fn read_array(path: impl AsRef<Path>) -> Result<Array> {
    let path = path.as_ref();
    let format = ArrayFormat::from_path(path)?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        ArrayFormat::Npy => npy::decode(&bytes).map_err(|k| Error::format(path, k)),
        ArrayFormat::Csv => parse_csv(&bytes).map_err(|k| Error::format(path, k)),
    }
}

fn parse_csv(bytes: &[u8]) -> std::result::Result<Array, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FormatError::Csv(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if rows == 0 {
            cols = record.len();
        }
        for (c, field) in record.iter().enumerate() {
            let v = field.parse::<f64>().map_err(|_| {
                FormatError::Csv(format!("row {r}, column {c}: {field:?} is not a number"))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(FormatError::Csv("no data rows".into()));
    }
    Ok(Array::from_parts(vec![rows, cols], ArrayData::F64(values)))
}

/// Shortest round-trip text, in exponent form for very large or small
/// magnitudes.
fn short_float<T: std::fmt::Display + std::fmt::LowerExp + Into<f64> + Copy>(v: T) -> String {
    let mag = v.into().abs();
    if mag == 0.0 || (1e-5..1e16).contains(&mag) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_bytes(array: &Array) -> Vec<u8> {
    let (rows, cols) = array.dims();
    let cell = |i: usize| -> String {
        match array.data() {
            ArrayData::F32(v) => short_float(v[i]),
            ArrayData::F64(v) => short_float(v[i]),
            ArrayData::I64(v) => v[i].to_string(),
        }
    };
    let mut out = String::new();
    for r in 0..rows {
        let line: Vec<String> = (0..cols).map(|c| cell(r * cols + c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Writes an array. Empty arrays and non-finite floats are rejected.
pub fn write_array(array: &Array, path: impl AsRef<Path>, format: ArrayFormat) -> Result<()> {
    let path = path.as_ref();
    if array.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "refusing to write empty array to {}",
            path.display()
        )));
    }
    let non_finite = match array.data() {
        ArrayData::F32(v) => v.iter().position(|x| !x.is_finite()),
        ArrayData::F64(v) => v.iter().position(|x| !x.is_finite()),
        ArrayData::I64(_) => None,
    };
    if let Some(index) = non_finite {
        return Err(Error::NonFiniteValue { index });
    }
    let bytes = match format {
        ArrayFormat::Npy => npy::encode(array),
        ArrayFormat::Csv => csv_bytes(array),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a label vector: integer dtype, or floats holding whole numbers,
/// laid out as 1-D, a single column, or a single row.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let array = read_array(path)?;
    let (rows, cols) = array.dims();
    if rows != 1 && cols != 1 {
        return Err(Error::ShapeMismatch(format!(
            "{}: labels must be a vector, got {rows}x{cols}",
            path.display()
        )));
    }
    match array.data() {
        ArrayData::I64(v) => Ok(v.clone()),
        _ => array
            .to_f64()
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.fract() == 0.0 && v.abs() <= (1u64 << 53) as f64 {
                    Ok(v as i64)
                } else {
                    Err(Error::InvalidArgument(format!(
                        "{}: label {v} at index {i} is not an integer",
                        path.display()
                    )))
                }
            })
            .collect(),
    }
}

/// Loads an `N x C` logit matrix (upcast to `f64`) with optional labels.
pub fn load_dataset(logits: impl AsRef<Path>, labels: Option<&Path>) -> Result<LogitDataset> {
    let logits = logits.as_ref();
    let array = read_array(logits)?;
    if array.shape().len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "{}: logits must be a 2-D matrix, got shape {:?}",
            logits.display(),
            array.shape()
        )));
    }
    let (rows, cols) = array.dims();
    let labels = labels.map(read_labels).transpose()?;
    let name = logits
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(validate_dataset(array.to_f64(), rows, cols, labels.as_deref())?.with_name(name))
}

/// Writes logits as `f64` and labels (when present) as `i64`.
pub fn save_dataset(dataset: &LogitDataset, logits: &Path, labels: Option<&Path>) -> Result<()> {
    let matrix = Array::matrix(
        dataset.len(),
        dataset.num_classes(),
        dataset.logits().to_vec(),
    )?;
    write_array(&matrix, logits, ArrayFormat::from_path(logits)?)?;
    if let (Some(path), Some(values)) = (labels, dataset.labels()) {
        let labels = Array::labels(values.iter().map(|&v| v as i64).collect());
        write_array(&labels, path, ArrayFormat::from_path(path)?)?;
    }
    Ok(())
}

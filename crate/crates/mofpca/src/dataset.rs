//! Tabular loading, standardization and the two-group row partition.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Column scaling applied before the basis is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMode {
    /// Center every column to mean 0 and scale to unit variance
    /// (population standard deviation, statistics over all samples jointly).
    ZScore,
    /// Divide every cell by 255; no centering.
    Pixel,
    /// Pass the values through unchanged.
    None,
}

/// Numeric table as read from disk, before any scaling.
#[derive(Debug, Clone)]
pub struct RawTable {
    values: Mat,
    column_names: Vec<String>,
}

impl RawTable {
    pub fn new(values: Mat, column_names: Vec<String>) -> Result<Self> {
        if values.nrows() < 2 {
            return Err(Error::input(format!(
                "need at least 2 samples, got {}",
                values.nrows()
            )));
        }
        if values.ncols() < 1 {
            return Err(Error::input("need at least 1 attribute"));
        }
        if column_names.len() != values.ncols() {
            return Err(Error::input("column name count does not match matrix"));
        }
        for i in 0..values.nrows() {
            for (j, v) in values.row(i).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::input(format!(
                        "non-finite value at row {i}, column '{}'",
                        column_names[j]
                    )));
                }
            }
        }
        Ok(RawTable {
            values,
            column_names,
        })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

/// Row partition induced by the sensitive attribute.
#[derive(Debug, Clone)]
pub struct GroupLabels {
    pub group_a_rows: Vec<usize>,
    pub group_b_rows: Vec<usize>,
    pub group_a_value: String,
    pub group_b_value: String,
}

/// Options for [`load_csv_with`]. The sensitive column is removed from the
/// feature matrix by default; `keep_sensitive` retains it (it must then
/// parse as a number).
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub keep_sensitive: bool,
}

/// Load a CSV file (one header row, comma separated) and split its rows into
/// two groups by the value of `sensitive_column`. Rows whose sensitive value
/// equals `group_a_value` form group A; the remaining value forms group B.
pub fn load_csv(
    path: impl AsRef<Path>,
    sensitive_column: &str,
    group_a_value: &str,
) -> Result<(RawTable, GroupLabels)> {
    load_csv_with(
        path,
        sensitive_column,
        group_a_value,
        LoadOptions::default(),
    )
}

pub fn load_csv_with(
    path: impl AsRef<Path>,
    sensitive_column: &str,
    group_a_value: &str,
    options: LoadOptions,
) -> Result<(RawTable, GroupLabels)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::FileRead {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::input(format!("cannot parse header: {e}")))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let sensitive_idx = headers
        .iter()
        .position(|h| h == sensitive_column)
        .ok_or_else(|| Error::input(format!("sensitive column '{sensitive_column}' not found")))?;

    let column_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| options.keep_sensitive || *j != sensitive_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut sensitive_values: Vec<String> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::input(format!("row {}: {e}", i + 1)))?;
        if record.len() != headers.len() {
            return Err(Error::input(format!(
                "row {}: expected {} fields, got {}",
                i + 1,
                headers.len(),
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(column_names.len());
        for (j, cell) in record.iter().enumerate() {
            if j == sensitive_idx {
                sensitive_values.push(cell.to_string());
                if !options.keep_sensitive {
                    continue;
                }
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::input(format!(
                    "row {}, column '{}': non-numeric value '{}'",
                    i + 1,
                    headers[j],
                    cell
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::input("no data rows"));
    }

    let mut distinct: Vec<&String> = Vec::new();
    for v in &sensitive_values {
        if !distinct.contains(&v) {
            distinct.push(v);
        }
        if distinct.len() > 2 {
            return Err(Error::input(format!(
                "sensitive attribute not binary: column '{sensitive_column}' has more than two distinct values"
            )));
        }
    }
    if distinct.len() < 2 {
        return Err(Error::input(format!(
            "sensitive attribute not binary: column '{sensitive_column}' has a single value"
        )));
    }
    if !distinct.iter().any(|v| v.as_str() == group_a_value) {
        return Err(Error::input(format!(
            "group A value '{group_a_value}' not present in column '{sensitive_column}' \
             (values are '{}' and '{}')",
            distinct[0], distinct[1]
        )));
    }
    let group_b_value = distinct
        .iter()
        .find(|v| v.as_str() != group_a_value)
        .expect("two distinct values")
        .to_string();

    let mut group_a_rows = Vec::new();
    let mut group_b_rows = Vec::new();
    for (i, v) in sensitive_values.iter().enumerate() {
        if v == group_a_value {
            group_a_rows.push(i);
        } else {
            group_b_rows.push(i);
        }
    }
    if group_a_rows.is_empty() || group_b_rows.is_empty() {
        return Err(Error::input("one of the sensitive groups is empty"));
    }

    let table = RawTable::new(Mat::from_rows(&rows), column_names)?;
    let labels = GroupLabels {
        group_a_rows,
        group_b_rows,
        group_a_value: group_a_value.to_string(),
        group_b_value,
    };
    Ok((table, labels))
}

/// Standardized sample matrix plus the group partition.
#[derive(Debug, Clone)]
pub struct StandardizedDataset {
    x: Mat,
    group_a_rows: Vec<usize>,
    group_b_rows: Vec<usize>,
    scaling: ScalingMode,
    /// Columns that were constant under zscore and mapped to all zeros.
    constant_columns: Vec<usize>,
}

impl StandardizedDataset {
    pub fn x(&self) -> &Mat {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn group_a_rows(&self) -> &[usize] {
        &self.group_a_rows
    }

    pub fn group_b_rows(&self) -> &[usize] {
        &self.group_b_rows
    }

    pub fn n_a(&self) -> usize {
        self.group_a_rows.len()
    }

    pub fn n_b(&self) -> usize {
        self.group_b_rows.len()
    }

    pub fn scaling(&self) -> ScalingMode {
        self.scaling
    }

    pub fn constant_columns(&self) -> &[usize] {
        &self.constant_columns
    }

    /// Build directly from an in-memory matrix and a group A row list
    /// (every other row goes to group B). Used by tests and synthetic fixtures.
    pub fn from_parts(x: Mat, group_a_rows: Vec<usize>, scaling: ScalingMode) -> Result<Self> {
        let n = x.nrows();
        let mut is_a = vec![false; n];
        for &i in &group_a_rows {
            if i >= n {
                return Err(Error::input("group row index out of range"));
            }
            if is_a[i] {
                return Err(Error::input("duplicate group row index"));
            }
            is_a[i] = true;
        }
        let group_b_rows: Vec<usize> = (0..n).filter(|i| !is_a[*i]).collect();
        if group_a_rows.is_empty() || group_b_rows.is_empty() {
            return Err(Error::input("one of the sensitive groups is empty"));
        }
        Ok(StandardizedDataset {
            x,
            group_a_rows,
            group_b_rows,
            scaling,
            constant_columns: Vec::new(),
        })
    }
}

/// Scale `table` according to `mode` and attach the group partition.
///
/// Under zscore, statistics are computed over all samples jointly and the
/// population standard deviation (divide by n) is used, so each non-constant
/// column ends up with mean 0 and variance exactly 1. Constant columns map
/// to all zeros and are recorded in `constant_columns`.
pub fn standardize(
    table: RawTable,
    groups: &GroupLabels,
    mode: ScalingMode,
) -> StandardizedDataset {
    let n = table.n();
    let d = table.dim();
    let mut x = table.values;
    let mut constant_columns = Vec::new();

    match mode {
        ScalingMode::None => {}
        ScalingMode::Pixel => {
            for i in 0..n {
                for v in x.row_mut(i) {
                    *v /= 255.0;
                }
            }
        }
        ScalingMode::ZScore => {
            for j in 0..d {
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                let mut sum = 0.0;
                for i in 0..n {
                    let v = x.get(i, j);
                    min = min.min(v);
                    max = max.max(v);
                    sum += v;
                }
                if min == max {
                    constant_columns.push(j);
                    for i in 0..n {
                        x.set(i, j, 0.0);
                    }
                    continue;
                }
                let mean = sum / n as f64;
                let var = (0..n).map(|i| (x.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
                let sd = var.sqrt();
                for i in 0..n {
                    let v = x.get(i, j);
                    x.set(i, j, (v - mean) / sd);
                }
            }
        }
    }

    StandardizedDataset {
        x,
        group_a_rows: groups.group_a_rows.clone(),
        group_b_rows: groups.group_b_rows.clone(),
        scaling: mode,
        constant_columns,
    }
}

//! Tabular datasets with a binary target: CSV ingestion, categorical
//! encoding and z-score normalization.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Cell values treated as unknown during ingestion.
pub const MISSING_TOKENS: &[&str] = &["", "?", "NA", "N/A", "NaN", "nan", "null", "NULL"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnData {
    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }

    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryEncoding {
    pub column: String,
    /// `categories[code]` is the original label.
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputation {
    pub column: String,
    pub count: usize,
    pub value: String,
}

/// Everything ingestion and preprocessing did to the raw file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows: usize,
    pub features: usize,
    pub target: String,
    /// Raw target label → class.
    pub target_mapping: BTreeMap<String, u8>,
    pub minority_fraction: f64,
    pub kinds: Vec<(String, ColumnKind)>,
    pub rows_with_unknown: usize,
    pub imputations: Vec<Imputation>,
    pub encodings: Vec<CategoryEncoding>,
    pub normalized: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',' }
    }
}

/// Feature columns plus a 0/1 target. Immutable once built; every
/// preprocessing step returns a new dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    target_name: String,
    target: Vec<u8>,
    report: IngestReport,
}

impl Dataset {
    /// Builds an all-numeric dataset from columns and target.
    pub fn from_numeric(
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
        target_name: &str,
        target: Vec<u8>,
    ) -> Result<Self, DataError> {
        let columns = names
            .into_iter()
            .zip(columns)
            .map(|(name, values)| Column {
                name,
                data: ColumnData::Numeric(values),
            })
            .collect();
        Self::from_columns(columns, target_name, target)
    }

    pub fn from_columns(columns: Vec<Column>, target_name: &str, target: Vec<u8>) -> Result<Self, DataError> {
        if columns.is_empty() {
            return Err(DataError::NoFeatures);
        }
        if target.is_empty() {
            return Err(DataError::EmptyInput);
        }
        if let Some(c) = columns.iter().find(|c| c.data.len() != target.len()) {
            return Err(DataError::InvalidConfig(format!(
                "column `{}` has {} values, target has {}",
                c.name,
                c.data.len(),
                target.len()
            )));
        }
        if target.iter().any(|&t| t > 1) {
            return Err(DataError::NonBinaryTarget {
                column: target_name.to_string(),
                detail: "entries must be 0 or 1".into(),
            });
        }
        let mut report = IngestReport {
            rows: target.len(),
            features: columns.len(),
            target: target_name.to_string(),
            target_mapping: [("0".to_string(), 0), ("1".to_string(), 1)].into(),
            ..IngestReport::default()
        };
        report.minority_fraction = minority_fraction(&target);
        report.kinds = columns.iter().map(|c| (c.name.clone(), c.data.kind())).collect();
        Ok(Self {
            columns,
            target_name: target_name.to_string(),
            target,
            report,
        })
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn kinds(&self) -> Vec<ColumnKind> {
        self.columns.iter().map(|c| c.data.kind()).collect()
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn target(&self) -> &[u8] {
        &self.target
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    pub fn is_numeric(&self) -> bool {
        self.columns.iter().all(|c| c.data.kind() == ColumnKind::Numeric)
    }

    /// Values of feature `i`, or an error if it is still categorical.
    pub fn numeric_column(&self, i: usize) -> Result<&[f64], DataError> {
        match &self.columns[i].data {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Categorical(_) => Err(DataError::NotNumeric(self.columns[i].name.clone())),
        }
    }

    /// Dataset restricted to `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                data: match &c.data {
                    ColumnData::Numeric(v) => ColumnData::Numeric(indices.iter().map(|&i| v[i]).collect()),
                    ColumnData::Categorical(v) => {
                        ColumnData::Categorical(indices.iter().map(|&i| v[i].clone()).collect())
                    }
                },
            })
            .collect();
        let target: Vec<u8> = indices.iter().map(|&i| self.target[i]).collect();
        let mut report = self.report.clone();
        report.rows = target.len();
        report.minority_fraction = minority_fraction(&target);
        Dataset {
            columns,
            target_name: self.target_name.clone(),
            target,
            report,
        }
    }

    /// Writes the dataset as CSV with the target as the last column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DataError> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = self.feature_names();
        header.push(self.target_name.clone());
        writer.write_record(&header)?;
        for row in 0..self.rows() {
            let mut record: Vec<String> = self
                .columns
                .iter()
                .map(|c| match &c.data {
                    ColumnData::Numeric(v) => format!("{}", v[row]),
                    ColumnData::Categorical(v) => v[row].clone(),
                })
                .collect();
            record.push(self.target[row].to_string());
            writer.write_record(&record)?;
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn minority_fraction(target: &[u8]) -> f64 {
    if target.is_empty() {
        return 0.0;
    }
    let ones = target.iter().filter(|&&t| t == 1).count();
    ones.min(target.len() - ones) as f64 / target.len() as f64
}

fn is_missing(cell: &str) -> bool {
    MISSING_TOKENS.contains(&cell)
}

/// Reads a CSV with a header row. Column kinds are inferred: a column whose
/// known cells all parse as finite numbers is numeric, anything else is
/// categorical. Unknown cells are imputed (median for numeric columns, most
/// frequent label for categorical ones) and counted in the report.
pub fn ingest_csv<R: Read>(source: R, target_column: &str, options: &CsvOptions) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(DataError::EmptyInput);
    }
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| DataError::MissingTarget(target_column.to_string()))?;

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(DataError::RaggedRow {
                row: row + 1,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (col, cell) in record.iter().enumerate() {
            raw[col].push(cell.to_string());
        }
    }
    let rows = raw[0].len();
    if rows == 0 {
        return Err(DataError::EmptyInput);
    }

    let (target, target_mapping) = map_target(target_column, &raw[target_idx])?;

    let mut report = IngestReport {
        rows,
        target: target_column.to_string(),
        target_mapping,
        minority_fraction: minority_fraction(&target),
        ..IngestReport::default()
    };
    let mut unknown_rows = vec![false; rows];
    let mut columns = Vec::with_capacity(header.len() - 1);
    for (col, name) in header.iter().enumerate() {
        if col == target_idx {
            continue;
        }
        let cells = &raw[col];
        for (r, cell) in cells.iter().enumerate() {
            if is_missing(cell) {
                unknown_rows[r] = true;
            }
        }
        let data = infer_column(name, cells, &mut report);
        columns.push(Column {
            name: name.clone(),
            data,
        });
    }
    if columns.is_empty() {
        return Err(DataError::NoFeatures);
    }
    report.features = columns.len();
    report.rows_with_unknown = unknown_rows.iter().filter(|&&u| u).count();
    report.kinds = columns.iter().map(|c| (c.name.clone(), c.data.kind())).collect();
    Ok(Dataset {
        columns,
        target_name: target_column.to_string(),
        target,
        report,
    })
}

/// `{0,1}` targets pass through; any other two-valued column maps its smaller
/// label (numerically if both parse, else lexically) to 0.
fn map_target(column: &str, cells: &[String]) -> Result<(Vec<u8>, BTreeMap<String, u8>), DataError> {
    if let Some(r) = cells.iter().position(|c| is_missing(c)) {
        return Err(DataError::NonBinaryTarget {
            column: column.to_string(),
            detail: format!("unknown value in row {}", r + 1),
        });
    }
    let mut distinct: Vec<&str> = Vec::new();
    for c in cells {
        if !distinct.contains(&c.as_str()) {
            distinct.push(c);
            if distinct.len() > 2 {
                return Err(DataError::NonBinaryTarget {
                    column: column.to_string(),
                    detail: format!("more than two distinct values ({})", distinct.join(", ")),
                });
            }
        }
    }
    let parsed: Option<Vec<f64>> = distinct.iter().map(|d| d.parse::<f64>().ok()).collect();
    let mapping: BTreeMap<String, u8> = match parsed {
        Some(values) if values.iter().all(|&v| v == 0.0 || v == 1.0) => distinct
            .iter()
            .zip(values)
            .map(|(d, v)| (d.to_string(), v as u8))
            .collect(),
        Some(values) => {
            let mut pairs: Vec<(f64, &str)> = values.into_iter().zip(distinct.iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.iter().enumerate().map(|(code, (_, d))| (d.to_string(), code as u8)).collect()
        }
        None => {
            let mut sorted = distinct.clone();
            sorted.sort();
            sorted.iter().enumerate().map(|(code, d)| (d.to_string(), code as u8)).collect()
        }
    };
    let target = cells.iter().map(|c| mapping[c.as_str()]).collect();
    Ok((target, mapping))
}

fn infer_column(name: &str, cells: &[String], report: &mut IngestReport) -> ColumnData {
    let known: Vec<&String> = cells.iter().filter(|c| !is_missing(c)).collect();
    let missing = cells.len() - known.len();
    let parsed: Option<Vec<f64>> = known
        .iter()
        .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    match parsed {
        Some(values) => {
            let fill = if values.is_empty() {
                report
                    .warnings
                    .push(format!("column `{name}` has no known values; filled with 0"));
                0.0
            } else {
                median(&values)
            };
            if missing > 0 {
                report.imputations.push(Imputation {
                    column: name.to_string(),
                    count: missing,
                    value: format!("{fill}"),
                });
            }
            ColumnData::Numeric(
                cells
                    .iter()
                    .map(|c| if is_missing(c) { fill } else { c.parse().unwrap() })
                    .collect(),
            )
        }
        None => {
            let fill = mode(&known);
            if missing > 0 {
                report.imputations.push(Imputation {
                    column: name.to_string(),
                    count: missing,
                    value: fill.clone(),
                });
            }
            ColumnData::Categorical(
                cells
                    .iter()
                    .map(|c| if is_missing(c) { fill.clone() } else { c.clone() })
                    .collect(),
            )
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Most frequent label; ties go to the first to appear.
fn mode(values: &[&String]) -> String {
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    for (pos, v) in values.iter().enumerate() {
        counts.entry(v.as_str()).or_insert((0, pos)).0 += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(v, _)| v.to_string())
        .unwrap_or_default()
}

/// Replaces every categorical column by integer codes in order of first appearance.
pub fn encode_categorical(ds: &Dataset) -> Dataset {
    let mut out = ds.clone();
    for column in &mut out.columns {
        if let ColumnData::Categorical(labels) = &column.data {
            let mut categories: Vec<String> = Vec::new();
            let mut codes: HashMap<&str, usize> = HashMap::new();
            let values = labels
                .iter()
                .map(|label| {
                    let next = categories.len();
                    let code = *codes.entry(label.as_str()).or_insert_with(|| {
                        categories.push(label.clone());
                        next
                    });
                    code as f64
                })
                .collect();
            out.report.encodings.push(CategoryEncoding {
                column: column.name.clone(),
                categories,
            });
            column.data = ColumnData::Numeric(values);
        }
    }
    out.report.kinds = out.columns.iter().map(|c| (c.name.clone(), c.data.kind())).collect();
    out
}

/// Rescales every feature column to sample mean 0 and sample standard
/// deviation 1. Constant columns are centred to zero and reported; the target
/// is left untouched.
pub fn normalize(ds: &Dataset) -> Result<Dataset, DataError> {
    let mut out = ds.clone();
    for column in &mut out.columns {
        let ColumnData::Numeric(values) = &mut column.data else {
            return Err(DataError::NotNumeric(column.name.clone()));
        };
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let sd = var.sqrt();
        if sd > 0.0 && sd.is_finite() {
            values.iter_mut().for_each(|v| *v = (*v - mean) / sd);
        } else {
            values.iter_mut().for_each(|v| *v = 0.0);
            let msg = format!("column `{}` is constant; normalized to zeros", column.name);
            log::warn!("{msg}");
            out.report.warnings.push(msg);
        }
    }
    out.report.normalized = true;
    Ok(out)
}

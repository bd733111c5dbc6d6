//! CSV/TSV ingestion.
//!
//! Layout: a header row of variable IDs, one row per individual, the first
//! column holding individual IDs. Label and target columns are named in the
//! header and pulled out of the data matrix.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use scoresphere::linalg::{GroupLabels, TargetVector};
use scoresphere::{DataMatrix, Matrix, ProjectionPair};

use crate::error::exit;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("line {line}, column {column:?}: {value:?} is not a finite number")]
    NonNumeric { line: u64, column: String, value: String },
    #[error("empty file")]
    Empty,
    #[error("need at least 2 individuals, found {0}")]
    TooFewRows(usize),
    #[error("no variable columns left after removing IDs, labels and target")]
    NoVariables,
    #[error("column {0:?} not found in the header")]
    MissingColumn(String),
    #[error("label column {column:?} must hold exactly 2 distinct values, found {values:?}")]
    LabelValues { column: String, values: Vec<String> },
    #[error("{0}")]
    Invalid(scoresphere::Error),
}

impl IngestError {
    pub fn exit_code(&self) -> i32 {
        match self {
            IngestError::Io { .. } => exit::OTHER,
            IngestError::LabelValues { .. } => exit::DESIGN,
            IngestError::Invalid(e) => match e.kind() {
                scoresphere::ErrorKind::Design => exit::DESIGN,
                scoresphere::ErrorKind::Numerical => exit::NUMERICAL,
                scoresphere::ErrorKind::Data => exit::PARSE,
            },
            _ => exit::PARSE,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct IngestOptions {
    pub label_column: Option<String>,
    pub target_column: Option<String>,
    /// Field delimiter; sniffed from the extension and first line if unset.
    pub delimiter: Option<u8>,
}

/// Two-group labels with the raw values they came from (group 1 first).
#[derive(Clone, Debug)]
pub struct Labels {
    pub column: String,
    pub values: [String; 2],
    pub groups: GroupLabels,
}

#[derive(Clone, Debug)]
pub struct Ingested {
    pub data: DataMatrix,
    pub labels: Option<Labels>,
    /// Centered on load.
    pub target: Option<TargetVector>,
}

fn sniff(path: Option<&Path>, text: &str) -> u8 {
    if let Some(ext) = path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        match ext.to_ascii_lowercase().as_str() {
            "tsv" | "tab" => return b'\t',
            "csv" => return b',',
            _ => {}
        }
    }
    let first = text.lines().next().unwrap_or("");
    if first.contains('\t') && !first.contains(',') {
        b'\t'
    } else {
        b','
    }
}

fn read_text(path: &Path) -> Result<String, IngestError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    Ok(text)
}

/// Records with their 1-based line numbers; the first is the header.
fn records(text: &str, delimiter: u8) -> Result<Vec<(u64, Vec<String>)>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| IngestError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn check_rectangular(rows: &[(u64, Vec<String>)], width: usize) -> Result<(), IngestError> {
    for (line, r) in rows {
        if r.len() != width {
            return Err(IngestError::Ragged { line: *line, expected: width, found: r.len() });
        }
    }
    Ok(())
}

fn number(line: u64, column: &str, cell: &str) -> Result<f64, IngestError> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(IngestError::NonNumeric { line, column: column.to_string(), value: cell.to_string() }),
    }
}

pub fn ingest(path: &Path, opts: &IngestOptions) -> Result<Ingested, IngestError> {
    let text = read_text(path)?;
    let delimiter = opts.delimiter.unwrap_or_else(|| sniff(Some(path), &text));
    ingest_str(&text, delimiter, opts)
}

pub fn ingest_str(text: &str, delimiter: u8, opts: &IngestOptions) -> Result<Ingested, IngestError> {
    let mut rows = records(text, delimiter)?;
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    let (_, header) = rows.remove(0);
    check_rectangular(&rows, header.len())?;
    if rows.len() < 2 {
        return Err(IngestError::TooFewRows(rows.len()));
    }
    let find = |name: &str| {
        header
            .iter()
            .skip(1)
            .position(|h| h == name)
            .map(|k| k + 1)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let label_idx = opts.label_column.as_deref().map(find).transpose()?;
    let target_idx = opts.target_column.as_deref().map(find).transpose()?;
    let var_idx: Vec<usize> = (1..header.len()).filter(|&k| Some(k) != label_idx && Some(k) != target_idx).collect();
    if var_idx.is_empty() {
        return Err(IngestError::NoVariables);
    }

    let n = rows.len();
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); var_idx.len()];
    for (line, r) in &rows {
        for (c, &k) in var_idx.iter().enumerate() {
            cols[c].push(number(*line, &header[k], &r[k])?);
        }
    }
    let values = Matrix::from_columns(n, &cols).map_err(IngestError::Invalid)?;
    let row_ids = rows.iter().map(|(_, r)| r[0].clone()).collect();
    let col_ids = var_idx.iter().map(|&k| header[k].clone()).collect();
    let data = DataMatrix::new(values, row_ids, col_ids).map_err(IngestError::Invalid)?;

    let labels = match label_idx {
        None => None,
        Some(k) => {
            let mut distinct: Vec<String> = Vec::new();
            for (_, r) in &rows {
                if !distinct.contains(&r[k]) {
                    distinct.push(r[k].clone());
                }
            }
            let column = header[k].clone();
            if distinct.len() != 2 {
                return Err(IngestError::LabelValues { column, values: distinct });
            }
            let groups = GroupLabels::new(rows.iter().map(|(_, r)| r[k] == distinct[0]).collect())
                .map_err(IngestError::Invalid)?;
            let values = [distinct[0].clone(), distinct[1].clone()];
            Some(Labels { column, values, groups })
        }
    };
    let target = match target_idx {
        None => None,
        Some(k) => {
            let y = rows.iter().map(|(line, r)| number(*line, &header[k], &r[k])).collect::<Result<Vec<_>, _>>()?;
            Some(TargetVector::centered(&y).map_err(IngestError::Invalid)?)
        }
    };
    Ok(Ingested { data, labels, target })
}

/// A headerless numeric matrix, one row per line.
pub fn read_matrix(path: &Path) -> Result<Matrix, IngestError> {
    let text = read_text(path)?;
    let delimiter = sniff(Some(path), &text);
    let rows = records(&text, delimiter)?;
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    check_rectangular(&rows, rows[0].1.len())?;
    let mut values = Vec::with_capacity(rows.len() * rows[0].1.len());
    for (line, r) in &rows {
        for (c, cell) in r.iter().enumerate() {
            values.push(number(*line, &format!("{}", c + 1), cell)?);
        }
    }
    Matrix::from_row_major(rows.len(), rows[0].1.len(), &values).map_err(IngestError::Invalid)
}

/// Reads `Q` and `Q_H` and checks them as a projection pair.
pub fn read_projection_pair(q: &Path, q_h: &Path) -> Result<ProjectionPair, IngestError> {
    let q = read_matrix(q)?;
    let q_h = read_matrix(q_h)?;
    ProjectionPair::new(q, q_h).map_err(IngestError::Invalid)
}

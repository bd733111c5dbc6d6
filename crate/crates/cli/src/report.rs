//! Report types and their JSON / CSV / text renderings.
//!
//! Numbers are printed with 12 significant digits; p-values also get a
//! short scientific form such as `2.5E-5`.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::CliError;

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

/// Shortest text for [`round12`]`(x)`.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
        format!("{}", r)
    } else {
        format!("{:e}", r)
    }
}

/// Two significant digits in scientific notation: `2.5E-5`.
pub fn fmt_p_short(p: f64) -> String {
    format!("{:.1E}", p)
}

pub fn ser12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*x))
}

pub fn ser12_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| round12(x)))
}

/// One tested score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    /// 1-based position in the procedure's order.
    pub score: usize,
    pub label: String,
    /// Number of variables with nonzero weight.
    pub size: usize,
    #[serde(rename = "B", serialize_with = "ser12")]
    pub statistic: f64,
    #[serde(serialize_with = "ser12")]
    pub p_value: f64,
    pub p_short: String,
    pub significant: bool,
}

pub const CSV_HEADER: [&str; 7] = ["score", "label", "size", "B", "p_value", "p_short", "significant"];

impl ResultRow {
    pub fn csv_fields(&self) -> [String; 7] {
        [
            self.score.to_string(),
            self.label.clone(),
            self.size.to_string(),
            fmt12(self.statistic),
            fmt12(self.p_value),
            self.p_short.clone(),
            self.significant.to_string(),
        ]
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for r in rows {
        w.write_record(r.csv_fields()).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Output { path: p.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|source| CliError::Output { path: "<stdout>".into(), source })
        }
    }
}

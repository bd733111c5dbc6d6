use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Matrix;
use crate::{Error, Result};

/// Observations: `n` individuals (rows) by `p` variables (columns).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DataMatrix {
    values: Matrix,
    row_ids: Vec<String>,
    col_ids: Vec<String>,
}

impl DataMatrix {
    /// Validates `n >= 2`, `p >= 1`, finite entries and unique labels.
    pub fn new(values: Matrix, row_ids: Vec<String>, col_ids: Vec<String>) -> Result<Self> {
        let (n, p) = values.shape();
        if n < 2 {
            return Err(Error::InvalidData(format!("need at least 2 individuals, got {}", n)));
        }
        if p < 1 {
            return Err(Error::InvalidData("need at least 1 variable".to_string()));
        }
        if row_ids.len() != n || col_ids.len() != p {
            return Err(Error::Shape(format!(
                "{} row ids and {} column ids for a {}x{} matrix",
                row_ids.len(),
                col_ids.len(),
                n,
                p
            )));
        }
        if let Some(k) = values.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value at row {}, column {}",
                k % n,
                k / n
            )));
        }
        check_unique(&row_ids, "row")?;
        check_unique(&col_ids, "column")?;
        Ok(DataMatrix { values, row_ids, col_ids })
    }

    /// Wraps a matrix with generated labels `r1..rn`, `v1..vp`.
    pub fn from_matrix(values: Matrix) -> Result<Self> {
        let (n, p) = values.shape();
        let rows = (1..=n).map(|i| format!("r{}", i)).collect();
        let cols = (1..=p).map(|j| format!("v{}", j)).collect();
        DataMatrix::new(values, rows, cols)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidData(format!("duplicate {} id {:?}", what, id)));
        }
    }
    Ok(())
}

/// Column-centered data `X − 1 x̄'` together with the means `x̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredMatrix {
    pub values: Matrix,
    pub column_means: Vec<f64>,
}

/// Subtracts the column means.
pub fn center(x: &Matrix) -> Result<CenteredMatrix> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InvalidData(format!("need at least 2 individuals, got {}", n)));
    }
    if !x.all_finite() {
        return Err(Error::InvalidData("non-finite value in data".to_string()));
    }
    let mut values = x.clone();
    let mut column_means = Vec::with_capacity(x.ncols());
    for j in 0..x.ncols() {
        let col = values.col_mut(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        col.iter_mut().for_each(|v| *v -= mean);
        column_means.push(mean);
    }
    Ok(CenteredMatrix { values, column_means })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SopKind {
    /// `X'X`
    Total,
    /// `(X − X̄)'(X − X̄)`
    Residual,
    /// `X'QX`
    Projected,
}

/// A symmetric p×p sums-of-products matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SumsOfProducts {
    pub values: Matrix,
    pub kind: SopKind,
}

impl SumsOfProducts {
    pub fn diagonal(&self) -> Vec<f64> {
        self.values.diagonal()
    }
}

/// `M'M`, or `M'QM` when a projection is supplied.
///
/// Symmetry is enforced by averaging with the transpose.
pub fn sums_of_products(m: &Matrix, q: Option<&Matrix>) -> Result<SumsOfProducts> {
    match q {
        None => Ok(SumsOfProducts { values: m.gram(), kind: SopKind::Total }),
        Some(q) => {
            if q.nrows() != m.nrows() || !q.is_square() {
                return Err(Error::Shape(format!(
                    "projection is {}x{} but data has {} rows",
                    q.nrows(),
                    q.ncols(),
                    m.nrows()
                )));
            }
            let qm = q.matmul(m)?;
            let mut values = m.t_matmul(&qm)?;
            values.symmetrize();
            Ok(SumsOfProducts { values, kind: SopKind::Projected })
        }
    }
}

/// `(X − X̄)'(X − X̄)` tagged as residual sums of products.
pub fn residual_sums_of_products(c: &CenteredMatrix) -> SumsOfProducts {
    SumsOfProducts { values: c.values.gram(), kind: SopKind::Residual }
}

use alloc::format;
use alloc::vec::Vec;
use core::hash::Hasher;

use crate::linalg::{Design, Matrix};
use crate::score_tests::{ScoreOrigin, ScoreVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum WeightSource {
    Pca,
    KropfDiagonal,
    ColumnSum,
    GeneSet,
    Regression,
}

/// Non-fatal conditions met while building weights.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Warning {
    /// Fewer components than requested were numerically nonzero.
    RankReduced { requested: usize, used: usize },
    /// Columns with zero sum of squares were left out.
    ZeroVarianceSkipped(Vec<usize>),
}

/// FNV-1a over the shape and the bit patterns of the entries.
pub fn fingerprint(m: &Matrix) -> u64 {
    let mut h = fnv::FnvHasher::default();
    h.write_u64(m.nrows() as u64);
    h.write_u64(m.ncols() as u64);
    for v in m.as_slice() {
        h.write_u64(v.to_bits());
    }
    h.finish()
}

/// Weight vectors `d_1, …, d_q` (each of length p) with their provenance.
///
/// `derived_from` is the [`fingerprint`] of the matrix the builder read.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightMatrix {
    columns: Vec<Vec<f64>>,
    origins: Vec<ScoreOrigin>,
    source: WeightSource,
    derived_from: u64,
}

impl WeightMatrix {
    pub fn new(
        columns: Vec<Vec<f64>>,
        origins: Vec<ScoreOrigin>,
        source: WeightSource,
        derived_from: u64,
    ) -> Result<Self> {
        if columns.len() != origins.len() {
            return Err(Error::Shape(format!("{} weight vectors, {} origins", columns.len(), origins.len())));
        }
        if let Some(first) = columns.first() {
            if columns.iter().any(|c| c.len() != first.len()) {
                return Err(Error::Shape("weight vectors differ in length".into()));
            }
        }
        Ok(WeightMatrix { columns, origins, source, derived_from })
    }

    /// Indicator weights selecting the given variables in order.
    pub fn indicators(order: &[usize], p: usize, source: WeightSource, derived_from: u64) -> Result<Self> {
        let mut columns = Vec::with_capacity(order.len());
        for &i in order {
            if i >= p {
                return Err(Error::Shape(format!("variable {} out of range for p = {}", i, p)));
            }
            let mut d = vec![0.0; p];
            d[i] = 1.0;
            columns.push(d);
        }
        let origins = order.iter().map(|&i| ScoreOrigin::Variable(i)).collect();
        WeightMatrix::new(columns, origins, source, derived_from)
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn origins(&self) -> &[ScoreOrigin] {
        &self.origins
    }

    pub fn source(&self) -> WeightSource {
        self.source
    }

    pub fn derived_from(&self) -> u64 {
        self.derived_from
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Raw scores `z_h = M d_h`.
    pub fn raw_scores(&self, m: &Matrix) -> Result<Vec<Vec<f64>>> {
        self.columns.iter().map(|d| m.matvec(d)).collect()
    }

    /// Scores `z_h = M d_h` wrapped for testing under `design`.
    pub fn scores(&self, m: &Matrix, design: &Design) -> Result<Vec<ScoreVector>> {
        self.columns
            .iter()
            .zip(&self.origins)
            .map(|(d, &o)| ScoreVector::new(m.matvec(d)?, design, o))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_sees_every_bit() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let mut b = a.clone();
        assert_eq!(fingerprint(&a), fingerprint(&b));
        b.as_mut_slice()[3] = f64::from_bits(4.0f64.to_bits() + 1);
        assert_ne!(fingerprint(&a), fingerprint(&b));
        let c = Matrix::from_col_major(4, 1, a.as_slice().to_vec()).unwrap();
        assert_ne!(fingerprint(&a), fingerprint(&c));
    }

    #[test]
    fn indicator_scores_are_columns() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let w = WeightMatrix::indicators(&[1, 0], 2, WeightSource::ColumnSum, 0).unwrap();
        let z = w.raw_scores(&m).unwrap();
        assert_eq!(z, vec![vec![2.0, 4.0], vec![1.0, 3.0]]);
        assert!(WeightMatrix::indicators(&[2], 2, WeightSource::ColumnSum, 0).is_err());
    }
}

use alloc::vec::Vec;

use super::weights::{fingerprint, WeightMatrix, WeightSource};
use crate::linalg::{dot, Matrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum OrderingRule {
    /// Diagonal of the sums-of-products matrix.
    Diagonal,
    /// `s_i = Σ_g |w_gi|`.
    ColumnAbsSum,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderingKey {
    pub keys: Vec<f64>,
    pub rule: OrderingRule,
}

/// Variables sorted by a key, descending, ties to the lower index.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VariableOrdering {
    pub key: OrderingKey,
    pub permutation: Vec<usize>,
    pub derived_from: u64,
}

impl VariableOrdering {
    fn from_keys(keys: Vec<f64>, rule: OrderingRule, derived_from: u64) -> Self {
        let mut permutation: Vec<usize> = (0..keys.len()).collect();
        // stable sort keeps lower indices first among ties
        permutation.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
        VariableOrdering { key: OrderingKey { keys, rule }, permutation, derived_from }
    }

    /// Indicator weights for the first `count` variables in order, so the
    /// h-th score is column `i_h` of the data.
    pub fn weights(&self, count: usize) -> Result<WeightMatrix> {
        let source = match self.key.rule {
            OrderingRule::Diagonal => WeightSource::KropfDiagonal,
            OrderingRule::ColumnAbsSum => WeightSource::ColumnSum,
        };
        let take = count.min(self.permutation.len());
        WeightMatrix::indicators(&self.permutation[..take], self.permutation.len(), source, self.derived_from)
    }
}

fn check_square(s: &Matrix) -> Result<()> {
    if !s.is_square() {
        return Err(Error::Shape(alloc::format!("sums of products is {}x{}", s.nrows(), s.ncols())));
    }
    Ok(())
}

/// Orders variables by the diagonal of `S`, largest first.
pub fn kropf_diagonal_order(s: &Matrix) -> Result<VariableOrdering> {
    check_square(s)?;
    Ok(VariableOrdering::from_keys(s.diagonal(), OrderingRule::Diagonal, fingerprint(s)))
}

/// Orders variables by absolute column sums of `W`, largest first.
pub fn column_sum_order(w: &Matrix) -> Result<VariableOrdering> {
    check_square(w)?;
    let keys = w.columns().map(|c| c.iter().map(|v| v.abs()).sum()).collect();
    Ok(VariableOrdering::from_keys(keys, OrderingRule::ColumnAbsSum, fingerprint(w)))
}

/// [`kropf_diagonal_order`] of `M'M`, read off the data: the keys are the
/// column sums of squares.
pub fn kropf_diagonal_order_data(m: &Matrix) -> VariableOrdering {
    let keys = m.columns().map(|c| dot(c, c)).collect();
    VariableOrdering::from_keys(keys, OrderingRule::Diagonal, fingerprint(m))
}

/// [`column_sum_order`] of `W = M'M` without storing `W`; each key
/// `Σ_g |m_g'm_i|` costs one pass over the data.
pub fn column_sum_order_data(m: &Matrix) -> VariableOrdering {
    let keys = (0..m.ncols()).map(|i| column_abs_sum(m, i)).collect();
    VariableOrdering::from_keys(keys, OrderingRule::ColumnAbsSum, fingerprint(m))
}

/// `Σ_g |m_g'm_i|`.
pub fn column_abs_sum(m: &Matrix, i: usize) -> f64 {
    let xi = m.col(i);
    m.columns().map(|c| dot(c, xi).abs()).sum()
}

/// Assembles an ordering from keys computed elsewhere.
pub fn ordering_from_keys(keys: Vec<f64>, rule: OrderingRule, derived_from: u64) -> VariableOrdering {
    VariableOrdering::from_keys(keys, rule, derived_from)
}

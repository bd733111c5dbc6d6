use alloc::vec::Vec;

use super::weights::{fingerprint, Warning, WeightMatrix, WeightSource};
use crate::linalg::{dual_eigen_scores, numerical_rank, primal_from_dual, full_symmetric_eigen, Matrix, RANK_TOLERANCE};
use crate::score_tests::ScoreOrigin;
use crate::{Error, Result};

/// Principal-component weights with their eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaWeights {
    pub weights: WeightMatrix,
    pub eigenvalues: Vec<f64>,
    /// Computed through the n×n Gram matrix.
    pub dual: bool,
    pub warnings: Vec<Warning>,
}

fn finish(columns: Vec<Vec<f64>>, eigenvalues: Vec<f64>, q: usize, dual: bool, fp: u64) -> Result<PcaWeights> {
    let mut warnings = Vec::new();
    if columns.len() < q {
        warnings.push(Warning::RankReduced { requested: q, used: columns.len() });
    }
    if columns.is_empty() {
        return Err(Error::Singular("sums-of-products matrix is numerically zero".into()));
    }
    let origins = (0..columns.len()).map(ScoreOrigin::PrincipalComponent).collect();
    let weights = WeightMatrix::new(columns, origins, WeightSource::Pca, fp)?;
    Ok(PcaWeights { weights, eigenvalues, dual, warnings })
}

/// Leading `q` eigenvectors of `M'M` for design-projected data `M`.
///
/// When `n < p` the n×n problem `M M' z = z λ` is solved instead and
/// `d = M'z / λ`; both routes share the sign and ordering conventions.
/// Components past the numerical rank are dropped with a warning.
pub fn pca_weights(m: &Matrix, q: usize) -> Result<PcaWeights> {
    let (n, p) = m.shape();
    if q == 0 {
        return Err(Error::Dimension("requested 0 components".into()));
    }
    let fp = fingerprint(m);
    if n < p {
        let count = q.min(n);
        let dual = dual_eigen_scores(m, count)?;
        let mut columns = Vec::with_capacity(dual.pairs.len());
        let mut values = Vec::with_capacity(dual.pairs.len());
        for pair in &dual.pairs {
            columns.push(primal_from_dual(m, pair)?);
            values.push(pair.value);
        }
        finish(columns, values, q, true, fp)
    } else {
        pca_from_matrix(&m.gram(), q, fp)
    }
}

/// Leading `q` eigenvectors of a sums-of-products matrix.
pub fn pca_weights_from_sop(s: &Matrix, q: usize) -> Result<PcaWeights> {
    if q == 0 {
        return Err(Error::Dimension("requested 0 components".into()));
    }
    pca_from_matrix(s, q, fingerprint(s))
}

fn pca_from_matrix(s: &Matrix, q: usize, fp: u64) -> Result<PcaWeights> {
    let count = q.min(s.nrows());
    if !s.is_square() {
        return Err(Error::Shape(alloc::format!("sums of products is {}x{}", s.nrows(), s.ncols())));
    }
    let pairs = full_symmetric_eigen(s)?;
    let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let rank = numerical_rank(&values);
    let lead = values.first().copied().unwrap_or(0.0);
    let keep = count.min(rank);
    let mut columns = Vec::with_capacity(keep);
    let mut kept = Vec::with_capacity(keep);
    for pair in pairs.into_iter().take(keep) {
        debug_assert!(pair.value > RANK_TOLERANCE * lead);
        kept.push(pair.value);
        columns.push(pair.vector);
    }
    finish(columns, kept, q, false, fp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance_up_to_sign, norm2};

    #[test]
    fn identical_columns() {
        let m = Matrix::from_rows(&[[1.0, 1.0], [-1.0, -1.0], [0.5, 0.5]]).unwrap();
        let w = pca_weights(&m, 2).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let d = &w.weights.columns()[0];
        assert!((d[0] - h).abs() < 1e-12 && (d[1] - h).abs() < 1e-12);
        assert_eq!(w.weights.len(), 1);
        assert_eq!(w.warnings, vec![Warning::RankReduced { requested: 2, used: 1 }]);
    }

    #[test]
    fn diagonal_sop_gives_coordinate_vectors() {
        let mut s = Matrix::zeros(3, 3);
        s.as_mut_slice()[0] = 2.0;
        s.as_mut_slice()[4] = 7.0;
        s.as_mut_slice()[8] = 4.0;
        let w = pca_weights_from_sop(&s, 3).unwrap();
        assert_eq!(w.eigenvalues, vec![7.0, 4.0, 2.0]);
        assert_eq!(w.weights.columns()[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(w.weights.columns()[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(w.weights.columns()[2], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn dual_scores_match_primal() {
        let mut state = 7u64;
        let mut rows = Vec::new();
        for _ in 0..8 {
            let mut r = Vec::new();
            for _ in 0..30 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                r.push((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
            }
            rows.push(r);
        }
        let m = Matrix::from_rows(&rows).unwrap();
        let dual = pca_weights(&m, 5).unwrap();
        assert!(dual.dual);
        let primal = pca_weights_from_sop(&m.gram(), 5).unwrap();
        for (a, b) in dual.weights.columns().iter().zip(primal.weights.columns()) {
            let za = m.matvec(a).unwrap();
            let zb = m.matvec(b).unwrap();
            assert!(distance_up_to_sign(&za, &zb) < 1e-8);
            assert!((norm2(a) - 1.0).abs() < 1e-10);
        }
    }
}

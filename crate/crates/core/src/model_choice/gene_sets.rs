use alloc::vec::Vec;

use super::weights::{fingerprint, Warning, WeightMatrix, WeightSource};
use crate::linalg::{dot, Matrix};
use crate::score_tests::ScoreOrigin;
use crate::{Error, Result};

/// Minimum correlation with the center: `√0.5`.
pub const INCLUSION_THRESHOLD: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Number of dominant members used for the measure and for overlap checks.
pub const TOP_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneSetOptions {
    /// Count the center's own `r = 1` in the measure.
    pub include_center_in_measure: bool,
    pub threshold: f64,
    pub cap: usize,
}

impl Default for GeneSetOptions {
    fn default() -> Self {
        GeneSetOptions { include_center_in_measure: true, threshold: INCLUSION_THRESHOLD, cap: TOP_CAP }
    }
}

/// A center variable and the variables it recruits.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneSet {
    pub center: usize,
    /// Center first, then by decreasing correlation, ties to lower index.
    pub members: Vec<usize>,
    /// `r` with the center, aligned with `members`.
    pub correlations: Vec<f64>,
    /// `O_m`.
    pub measure: f64,
    /// The first `cap` members.
    pub top: Vec<usize>,
}

impl GeneSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneSetBuild {
    /// Retained sets in decreasing `O_m`.
    pub sets: Vec<GeneSet>,
    pub candidates: usize,
    pub warnings: Vec<Warning>,
}

/// Column sums of squares, i.e. the diagonal of `M'M`.
pub fn column_sums_of_squares(m: &Matrix) -> Vec<f64> {
    m.columns().map(|c| dot(c, c)).collect()
}

/// The candidate set spawned by `center`, or `None` when the center has
/// zero sum of squares.
///
/// Correlations are `w_ij / √(w_ii w_jj)` for `W = M'M`; on centered data
/// this is the ordinary correlation coefficient.
pub fn candidate_set(m: &Matrix, ss: &[f64], center: usize, opts: &GeneSetOptions) -> Option<GeneSet> {
    let ss_c = ss[center];
    if !(ss_c > 0.0) {
        return None;
    }
    let xc = m.col(center);
    let mut partners: Vec<(usize, f64)> = Vec::new();
    for (j, &ss_j) in ss.iter().enumerate() {
        if j == center || !(ss_j > 0.0) || ss_j > ss_c {
            continue;
        }
        let r = dot(xc, m.col(j)) / libm::sqrt(ss_c * ss_j);
        if r >= opts.threshold {
            partners.push((j, r));
        }
    }
    // stable: equal r keeps the lower index first
    partners.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut members = Vec::with_capacity(partners.len() + 1);
    let mut correlations = Vec::with_capacity(partners.len() + 1);
    members.push(center);
    correlations.push(1.0);
    for (j, r) in partners {
        members.push(j);
        correlations.push(r);
    }
    let r_sum: f64 = if opts.include_center_in_measure {
        correlations.iter().take(opts.cap).sum()
    } else {
        correlations.iter().skip(1).take(opts.cap).sum()
    };
    let top = members.iter().copied().take(opts.cap).collect();
    Some(GeneSet { center, members, correlations, measure: ss_c * r_sum, top })
}

/// Sorts candidates by decreasing measure (ties to the lower center) and
/// keeps a set only if its top list shares no variable with the top list
/// of any set kept before it.
pub fn select_gene_sets(mut candidates: Vec<GeneSet>, p: usize) -> Vec<GeneSet> {
    candidates.sort_by(|a, b| b.measure.total_cmp(&a.measure).then(a.center.cmp(&b.center)));
    let mut used = vec![false; p];
    let mut kept = Vec::new();
    for set in candidates {
        if set.top.iter().any(|&i| used[i]) {
            continue;
        }
        for &i in &set.top {
            used[i] = true;
        }
        kept.push(set);
    }
    kept
}

/// Builds, orders and thins the gene sets of `M` (centered data in the
/// two-group and correlation designs).
pub fn build_gene_sets(m: &Matrix, opts: &GeneSetOptions) -> Result<GeneSetBuild> {
    let p = m.ncols();
    if p == 0 {
        return Err(Error::EmptyInput);
    }
    if opts.cap == 0 {
        return Err(Error::Config("gene-set cap must be at least 1".into()));
    }
    let ss = column_sums_of_squares(m);
    let candidates: Vec<GeneSet> = (0..p).filter_map(|c| candidate_set(m, &ss, c, opts)).collect();
    Ok(finish_build(candidates, &ss))
}

/// Assembles a build from candidates computed elsewhere (for example in
/// parallel); the result does not depend on the candidates' order.
pub fn finish_build(candidates: Vec<GeneSet>, ss: &[f64]) -> GeneSetBuild {
    let mut warnings = Vec::new();
    let zero: Vec<usize> = ss.iter().enumerate().filter(|(_, &v)| !(v > 0.0)).map(|(i, _)| i).collect();
    if !zero.is_empty() {
        warnings.push(Warning::ZeroVarianceSkipped(zero));
    }
    let count = candidates.len();
    let sets = select_gene_sets(candidates, ss.len());
    GeneSetBuild { sets, candidates: count, warnings }
}

/// Standardized weights `d_ih = 1/√SS_i` on the members of each set.
pub fn gene_set_weights(sets: &[GeneSet], m: &Matrix) -> Result<WeightMatrix> {
    let p = m.ncols();
    let ss = column_sums_of_squares(m);
    let mut columns = Vec::with_capacity(sets.len());
    for set in sets {
        let mut d = vec![0.0; p];
        for &i in &set.members {
            if i >= p {
                return Err(Error::Shape(alloc::format!("member {} out of range for p = {}", i, p)));
            }
            if !(ss[i] > 0.0) {
                return Err(Error::InvalidData(alloc::format!("member {} has zero sum of squares", i)));
            }
            d[i] = 1.0 / libm::sqrt(ss[i]);
        }
        columns.push(d);
    }
    let origins = sets.iter().map(|s| ScoreOrigin::GeneSet { center: s.center }).collect();
    WeightMatrix::new(columns, origins, WeightSource::GeneSet, fingerprint(m))
}

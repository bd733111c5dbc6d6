use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::data::center;
use super::eigen::full_symmetric_eigen;
use super::matrix::{dot, max_abs, norm2};
use super::Matrix;
use crate::{Error, Result};

/// Tolerance for idempotence, symmetry and the PSD ordering `Q ≥ Q_H`.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

/// Decision space `Q` (rank `f`) and hypothesis space `Q_H` (rank `f_H`) of
/// a linear design.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectionPair {
    q: Matrix,
    q_h: Matrix,
    f: usize,
    f_h: usize,
}

impl ProjectionPair {
    /// Validates both matrices and derives the ranks from their traces.
    pub fn new(q: Matrix, q_h: Matrix) -> Result<Self> {
        let n = q.nrows();
        if !q.is_square() || q_h.shape() != (n, n) {
            return Err(Error::Design(format!(
                "projection shapes {}x{} and {}x{} differ or are not square",
                q.nrows(),
                q.ncols(),
                q_h.nrows(),
                q_h.ncols()
            )));
        }
        let f = check_projection(&q, "Q")?;
        let f_h = check_projection(&q_h, "Q_H")?;
        if !(1 <= f_h && f_h < f && f <= n) {
            return Err(Error::Design(format!(
                "ranks must satisfy 1 <= f_H < f <= n, got f_H = {}, f = {}, n = {}",
                f_h, f, n
            )));
        }
        let diff = q.sub(&q_h)?;
        let lowest = full_symmetric_eigen(&diff)?.last().map_or(0.0, |p| p.value);
        if lowest < -PROJECTION_TOLERANCE {
            return Err(Error::Design(format!(
                "Q - Q_H is not positive semidefinite (smallest eigenvalue {:e})",
                lowest
            )));
        }
        Ok(ProjectionPair { q, q_h, f, f_h })
    }

    /// General linear model: `Q = I − P(nuisance)` and `Q_H` the projection
    /// onto `Q · hypothesis`. Either basis may have zero columns for
    /// `nuisance`, in which case `Q = I`.
    pub fn from_bases(n: usize, nuisance: &Matrix, hypothesis: &Matrix) -> Result<Self> {
        if nuisance.nrows() != n && nuisance.ncols() > 0 || hypothesis.nrows() != n {
            return Err(Error::Shape(format!("design bases must have {} rows", n)));
        }
        let p_nuis = if nuisance.ncols() == 0 {
            Matrix::zeros(n, n)
        } else {
            projection_onto(nuisance)?
        };
        let q = Matrix::identity(n).sub(&p_nuis)?;
        let qh_basis = q.matmul(hypothesis)?;
        let q_h = projection_onto(&qh_basis)?;
        ProjectionPair::new(q, q_h)
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn q_h(&self) -> &Matrix {
        &self.q_h
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn f_h(&self) -> usize {
        self.f_h
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    /// `‖Q² − Q‖_max` and `‖Q_H² − Q_H‖_max`.
    pub fn idempotence_error(&self) -> f64 {
        let e1 = self.q.matmul(&self.q).and_then(|m| m.sub(&self.q)).map_or(f64::INFINITY, |m| m.max_abs());
        let e2 = self
            .q_h
            .matmul(&self.q_h)
            .and_then(|m| m.sub(&self.q_h))
            .map_or(f64::INFINITY, |m| m.max_abs());
        e1.max(e2)
    }

    /// Smallest eigenvalue of `Q − Q_H`.
    pub fn ordering_margin(&self) -> Result<f64> {
        let diff = self.q.sub(&self.q_h)?;
        Ok(full_symmetric_eigen(&diff)?.last().map_or(0.0, |p| p.value))
    }
}

fn check_projection(m: &Matrix, name: &str) -> Result<usize> {
    if !m.all_finite() {
        return Err(Error::Design(format!("{} has non-finite entries", name)));
    }
    let asym = m.asymmetry();
    if asym > PROJECTION_TOLERANCE {
        return Err(Error::Design(format!("{} is not symmetric (max deviation {:e})", name, asym)));
    }
    let idem = m.matmul(m)?.sub(m)?.max_abs();
    if idem > PROJECTION_TOLERANCE {
        return Err(Error::Design(format!("{} is not idempotent (max deviation {:e})", name, idem)));
    }
    let tr = m.trace();
    let rank = libm::round(tr);
    if (tr - rank).abs() > 1e-8 || rank < 0.0 {
        return Err(Error::Design(format!("{} has non-integral trace {}", name, tr)));
    }
    Ok(rank as usize)
}

/// Orthogonal projection onto the column space of `basis`, via modified
/// Gram-Schmidt. Columns that are numerically dependent are dropped.
pub fn projection_onto(basis: &Matrix) -> Result<Matrix> {
    let n = basis.nrows();
    let scale = basis.max_abs().max(f64::MIN_POSITIVE);
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for c in basis.columns() {
        let mut v = c.to_vec();
        for _ in 0..2 {
            for u in &ortho {
                let proj = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= proj * ui);
            }
        }
        let norm = norm2(&v);
        if norm > 1e-10 * scale * libm::sqrt(n as f64) {
            v.iter_mut().for_each(|x| *x /= norm);
            ortho.push(v);
        }
    }
    let mut p = Matrix::zeros(n, n);
    for u in &ortho {
        for j in 0..n {
            for i in 0..n {
                p[(i, j)] += u[i] * u[j];
            }
        }
    }
    p.symmetrize();
    Ok(p)
}

/// Group membership for the two-group design; `true` marks group 1.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupLabels {
    in_first: Vec<bool>,
}

impl GroupLabels {
    pub fn new(in_first: Vec<bool>) -> Result<Self> {
        let n1 = in_first.iter().filter(|&&g| g).count();
        if n1 == 0 || n1 == in_first.len() {
            return Err(Error::Design(format!(
                "both groups need at least one individual (sizes {}, {})",
                n1,
                in_first.len() - n1
            )));
        }
        Ok(GroupLabels { in_first })
    }

    /// The first `n1` individuals form group 1, the next `n2` group 2.
    pub fn from_sizes(n1: usize, n2: usize) -> Result<Self> {
        let mut v = vec![true; n1];
        v.extend(core::iter::repeat_n(false, n2));
        GroupLabels::new(v)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.in_first
    }

    pub fn n(&self) -> usize {
        self.in_first.len()
    }

    pub fn sizes(&self) -> (usize, usize) {
        let n1 = self.in_first.iter().filter(|&&g| g).count();
        (n1, self.in_first.len() - n1)
    }

    /// Centered group-1 indicator: the contrast direction spanning `Q_H`.
    pub fn contrast(&self) -> Vec<f64> {
        let n = self.n() as f64;
        let (n1, _) = self.sizes();
        let share = n1 as f64 / n;
        self.in_first.iter().map(|&g| if g { 1.0 - share } else { -share }).collect()
    }
}

/// Target vector of the correlation design.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetVector {
    values: Vec<f64>,
    centered: bool,
}

impl TargetVector {
    /// Centers `y` and records it as centered.
    pub fn centered(y: &[f64]) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::Design("target needs at least 2 values".to_string()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite target value".to_string()));
        }
        let col = Matrix::column_vector(y);
        let c = center(&col)?;
        let values = c.values.into_vec();
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateTarget);
        }
        Ok(TargetVector { values, centered: true })
    }

    /// Accepts `y` as given, checking that it already sums to zero within
    /// `1e-10 · n · max|y|`.
    pub fn from_centered(y: Vec<f64>) -> Result<Self> {
        let n = y.len() as f64;
        let sum: f64 = y.iter().sum();
        if sum.abs() > 1e-10 * n * max_abs(&y).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidData(format!("target is not centered (sum {:e})", sum)));
        }
        if y.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateTarget);
        }
        Ok(TargetVector { values: y, centered: true })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }
}

/// Testing design.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Design {
    OneGroup,
    TwoGroup(GroupLabels),
    Correlation(TargetVector),
    General(ProjectionPair),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DesignKind {
    OneGroup,
    TwoGroup,
    Correlation,
    General,
}

impl Design {
    pub fn kind(&self) -> DesignKind {
        match self {
            Design::OneGroup => DesignKind::OneGroup,
            Design::TwoGroup(_) => DesignKind::TwoGroup,
            Design::Correlation(_) => DesignKind::Correlation,
            Design::General(_) => DesignKind::General,
        }
    }

    /// Number of individuals the design is tied to, if any.
    pub fn n(&self) -> Option<usize> {
        match self {
            Design::OneGroup => None,
            Design::TwoGroup(g) => Some(g.n()),
            Design::Correlation(y) => Some(y.values().len()),
            Design::General(p) => Some(p.n()),
        }
    }

    /// `(f, f_H)` for `n` individuals.
    pub fn ranks(&self, n: usize) -> (usize, usize) {
        match self {
            Design::OneGroup => (n, 1),
            Design::TwoGroup(_) | Design::Correlation(_) => (n - 1, 1),
            Design::General(p) => (p.f(), p.f_h()),
        }
    }

    pub fn check_n(&self, n: usize) -> Result<()> {
        match self.n() {
            Some(m) if m != n => Err(Error::Design(format!(
                "design covers {} individuals but data has {}",
                m, n
            ))),
            _ => Ok(()),
        }
    }

    /// The design-projected data `M` whose cross-product `M'M` is the total
    /// sums-of-products matrix: `X` (one-group), `X − X̄` (two-group,
    /// correlation) or `Q X` (general).
    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        self.check_n(x.nrows())?;
        match self {
            Design::OneGroup => Ok(x.clone()),
            Design::TwoGroup(_) | Design::Correlation(_) => Ok(center(x)?.values),
            Design::General(p) => p.q().matmul(x),
        }
    }
}

/// Explicit `(Q, Q_H)` for a design on `n` individuals.
pub fn make_design_projections(design: &Design, n: usize) -> Result<ProjectionPair> {
    design.check_n(n)?;
    if n < 2 {
        return Err(Error::Design(format!("need n >= 2, got {}", n)));
    }
    let inv = 1.0 / n as f64;
    let centering = || {
        let mut q = Matrix::identity(n);
        q.as_mut_slice().iter_mut().for_each(|v| *v -= inv);
        q
    };
    match design {
        Design::OneGroup => {
            let mut j = Matrix::zeros(n, n);
            j.as_mut_slice().iter_mut().for_each(|v| *v = inv);
            ProjectionPair::new(Matrix::identity(n), j)
        }
        Design::TwoGroup(labels) => {
            let c = labels.contrast();
            ProjectionPair::new(centering(), rank_one_projection(&c))
        }
        Design::Correlation(y) => ProjectionPair::new(centering(), rank_one_projection(y.values())),
        Design::General(pair) => Ok(pair.clone()),
    }
}

fn rank_one_projection(v: &[f64]) -> Matrix {
    let n = v.len();
    let vv = dot(v, v);
    let mut p = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            p[(i, j)] = v[i] * v[j] / vv;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_group_traces() {
        let pair = make_design_projections(&Design::OneGroup, 4).unwrap();
        assert!((pair.q().trace() - 4.0).abs() < 1e-14);
        assert!((pair.q_h().trace() - 1.0).abs() < 1e-14);
        assert_eq!((pair.f(), pair.f_h()), (4, 1));
    }

    #[test]
    fn two_group_projection_recovers_separated_groups() {
        let labels = GroupLabels::from_sizes(2, 2).unwrap();
        let pair = make_design_projections(&Design::TwoGroup(labels), 4).unwrap();
        assert_eq!((pair.f(), pair.f_h()), (3, 1));
        let z = [1.0, 1.0, -1.0, -1.0];
        let qhz = pair.q_h().matvec(&z).unwrap();
        let b = dot(&z, &qhz) / dot(&z, &z);
        assert!((b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn correlation_projection_formula() {
        let y = TargetVector::from_centered(vec![1.0, -1.0, 0.0]).unwrap();
        let pair = make_design_projections(&Design::Correlation(y), 3).unwrap();
        let expected =
            Matrix::from_rows(&[[0.5, -0.5, 0.0], [-0.5, 0.5, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert!(pair.q_h().sub(&expected).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        let i3 = Matrix::identity(3);
        // Q_H == Q violates f_H < f
        assert!(matches!(ProjectionPair::new(i3.clone(), i3.clone()), Err(Error::Design(_))));
        let not_idem = Matrix::from_rows(&[[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(ProjectionPair::new(i3.clone(), not_idem), Err(Error::Design(_))));
        // Q_H outside the range of Q
        let q = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let qh = Matrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(ProjectionPair::new(q, qh), Err(Error::Design(_))));
    }

    #[test]
    fn group_and_target_errors() {
        assert!(matches!(GroupLabels::from_sizes(0, 3), Err(Error::Design(_))));
        assert!(matches!(TargetVector::centered(&[2.0, 2.0, 2.0]), Err(Error::DegenerateTarget)));
        assert!(TargetVector::from_centered(vec![1.0, 1.0]).is_err());
        let t = TargetVector::centered(&[1.0, 2.0, 6.0]).unwrap();
        assert!(t.is_centered());
        assert!(t.values().iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn design_size_mismatch() {
        let labels = GroupLabels::from_sizes(2, 2).unwrap();
        assert!(matches!(
            make_design_projections(&Design::TwoGroup(labels), 5),
            Err(Error::Design(_))
        ));
    }

    #[test]
    fn general_from_bases() {
        let n = 8;
        let ones = vec![1.0; n];
        let trend: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let nuisance = Matrix::from_columns(n, &[ones]).unwrap();
        let hyp = Matrix::from_columns(n, &[trend]).unwrap();
        let pair = ProjectionPair::from_bases(n, &nuisance, &hyp).unwrap();
        assert_eq!((pair.f(), pair.f_h()), (7, 1));
        assert!(pair.idempotence_error() < 1e-12);
        assert!(pair.ordering_margin().unwrap() > -1e-12);
    }
}

//! Symmetric eigendecomposition and the dual (n×n Gram) route for `p ≫ n`.
//!
//! The dense solver is Householder tridiagonalization followed by the
//! implicit QL algorithm (the EISPACK `tred2`/`tql2` pair).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::matrix::norm2;
use super::Matrix;
use crate::{Error, Result};

/// Eigenvalues below `RANK_TOLERANCE · λ₁` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Relative gap under which two eigenvalues are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

const MAX_QL_SWEEPS: usize = 60;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenPair {
    pub value: f64,
    /// Unit-norm primal vector `d`, or a dual score `z` with `z'z = λ`.
    pub vector: Vec<f64>,
}

/// Output of [`dual_eigen_scores`].
#[derive(Clone, Debug, PartialEq)]
pub struct DualEigen {
    pub pairs: Vec<EigenPair>,
    /// Set when fewer than the requested pairs were numerically nonzero.
    pub truncated: bool,
}

/// Top `count` eigenpairs of a symmetric matrix, in decreasing order.
///
/// Vectors are unit norm with their first nonzero entry positive.
pub fn symmetric_eigen(s: &Matrix, count: usize) -> Result<Vec<EigenPair>> {
    let m = s.nrows();
    if !s.is_square() {
        return Err(Error::Shape(format!("eigendecomposition of {}x{}", s.nrows(), s.ncols())));
    }
    if count < 1 || count > m {
        return Err(Error::Dimension(format!("requested {} eigenpairs of a {}x{} matrix", count, m, m)));
    }
    let mut pairs = full_symmetric_eigen(s)?;
    pairs.truncate(count);
    Ok(pairs)
}

/// All eigenpairs, sorted and sign-normalized.
pub fn full_symmetric_eigen(s: &Matrix) -> Result<Vec<EigenPair>> {
    let n = s.nrows();
    if !s.is_square() {
        return Err(Error::Shape(format!("eigendecomposition of {}x{}", s.nrows(), s.ncols())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if !s.all_finite() {
        return Err(Error::InvalidData(format!("non-finite entry in {}x{} matrix", n, n)));
    }
    let mut v = s.clone();
    v.symmetrize();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    implicit_ql(&mut v, &mut d, &mut e)?;

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut vector = v.col(k).to_vec();
            fix_sign(&mut vector);
            EigenPair { value: d[k], vector }
        })
        .collect();
    sort_pairs(&mut pairs);
    Ok(pairs)
}

/// Flips `v` so its first entry, or the first entry above `1e-12` in
/// magnitude when the first is numerically zero, is positive.
pub fn fix_sign(v: &mut [f64]) -> bool {
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(0.0);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
        true
    } else {
        false
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Decreasing by value; clusters tied within `TIE_TOLERANCE` are ordered by
/// the position of each vector's largest-magnitude entry.
fn sort_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    let scale = pairs.iter().fold(0.0f64, |m, p| m.max(p.value.abs())).max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len()
            && (pairs[end - 1].value - pairs[end].value).abs() <= TIE_TOLERANCE * scale
        {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by_key(|p| argmax_abs(&p.vector));
        }
        start = end;
    }
}

/// Solves `(M M') z = z λ` with `z'z = λ` for the leading `count` nonzero
/// eigenvalues, where `M` is n×p. The eigenvalues equal those of `M'M` and
/// `z_h = M d_h` for the matching primal vectors `d_h`.
///
/// Each `z_h` is oriented so that the implied `d_h = M'z_h / λ_h` follows the
/// primal sign convention.
pub fn dual_eigen_scores(m: &Matrix, count: usize) -> Result<DualEigen> {
    let (n, p) = m.shape();
    if count < 1 || count > n.min(p) {
        return Err(Error::Dimension(format!(
            "requested {} components from a {}x{} matrix",
            count, n, p
        )));
    }
    let gram = m.outer_gram();
    let all = full_symmetric_eigen(&gram)?;
    let lead = all.first().map_or(0.0, |p| p.value);
    let mut pairs = Vec::with_capacity(count);
    for pair in all.into_iter().take(count) {
        if !(pair.value > RANK_TOLERANCE * lead) {
            break;
        }
        let root = libm::sqrt(pair.value);
        let mut z: Vec<f64> = pair.vector.iter().map(|u| u * root).collect();
        let mut d = m.t_matvec(&pair.vector)?;
        if fix_sign(&mut d) {
            z.iter_mut().for_each(|x| *x = -*x);
        }
        pairs.push(EigenPair { value: pair.value, vector: z });
    }
    let truncated = pairs.len() < count;
    Ok(DualEigen { pairs, truncated })
}

/// Recovers the unit primal vector `d = M'z / λ` from a dual pair.
pub fn primal_from_dual(m: &Matrix, pair: &EigenPair) -> Result<Vec<f64>> {
    let mut d = m.t_matvec(&pair.vector)?;
    let inv = 1.0 / pair.value;
    d.iter_mut().for_each(|x| *x *= inv);
    Ok(d)
}

/// `‖S d − λ d‖₂`.
pub fn residual_norm(s: &Matrix, pair: &EigenPair) -> f64 {
    let sd = s.matvec(&pair.vector).expect("dimension checked by caller");
    let r: Vec<f64> = sd.iter().zip(&pair.vector).map(|(a, b)| a - pair.value * b).collect();
    norm2(&r)
}

/// Number of eigenvalues above the rank cut.
pub fn numerical_rank(values: &[f64]) -> usize {
    let lead = values.iter().fold(0.0f64, |m, v| m.max(*v));
    values.iter().filter(|&&v| v > RANK_TOLERANCE * lead).count()
}

// Householder reduction to tridiagonal form; on return `v` holds the
// accumulated transformation, `d` the diagonal and `e` the subdiagonal
// (in e[1..]).
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal form.
fn implicit_ql(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero, so the scan always stops inside the matrix
        let m = m.min(n - 1);
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::EigenNoConvergence(MAX_QL_SWEEPS));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (left, right) = column_pair(v, i);
                    for (a, b) in left.iter_mut().zip(right.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn column_pair(v: &mut Matrix, i: usize) -> (&mut [f64], &mut [f64]) {
    let n = v.nrows();
    let (a, b) = v.as_mut_slice().split_at_mut((i + 1) * n);
    (&mut a[i * n..], &mut b[..n])
}

/// Largest relative eigenvalue disagreement between `M'M` and `M M'` over
/// the leading `min(n, p)` values. Used by property checks.
pub fn dual_primal_gap(m: &Matrix) -> Result<f64> {
    let k = m.nrows().min(m.ncols());
    let primal = symmetric_eigen(&m.gram(), k)?;
    let dual = symmetric_eigen(&m.outer_gram(), k)?;
    let lead = primal[0].value.abs().max(f64::MIN_POSITIVE);
    Ok(primal
        .iter()
        .zip(&dual)
        .map(|(a, b)| (a.value - b.value).abs() / lead)
        .fold(0.0, f64::max))
}

/// Sign-insensitive distance `min(‖a − b‖∞, ‖a + b‖∞)`.
pub fn distance_up_to_sign(a: &[f64], b: &[f64]) -> f64 {
    let plus = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let minus = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
    plus.min(minus)
}

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Dense real matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from column-major storage.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} matrix",
                data.len(),
                nrows,
                ncols
            )));
        }
        Ok(Matrix { nrows, ncols, data })
    }

    /// Builds from row-major storage.
    pub fn from_row_major(nrows: usize, ncols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} matrix",
                data.len(),
                nrows,
                ncols
            )));
        }
        let mut m = Matrix::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = data[i * ncols + j];
            }
        }
        Ok(m)
    }

    /// Builds from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Matrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    ncols
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn from_columns<C: AsRef<[f64]>>(nrows: usize, columns: &[C]) -> Result<Self> {
        let mut data = Vec::with_capacity(nrows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != nrows {
                return Err(Error::Shape(format!(
                    "column {} has {} entries, expected {}",
                    j,
                    c.len(),
                    nrows
                )));
            }
            data.extend_from_slice(c);
        }
        Ok(Matrix { nrows, ncols: columns.len(), data })
    }

    pub fn column_vector(v: &[f64]) -> Self {
        Matrix { nrows: v.len(), ncols: 1, data: v.to_vec() }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Column-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        let n = self.nrows.max(1);
        self.data.chunks_exact(n).take(if self.nrows == 0 { 0 } else { self.ncols })
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.ncols).map(|j| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.ncols, self.nrows);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.ncols != rhs.nrows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let mut out = Matrix::zeros(self.nrows, rhs.ncols);
        for j in 0..rhs.ncols {
            let dst = j * self.nrows;
            for k in 0..self.ncols {
                let b = rhs[(k, j)];
                if b == 0.0 {
                    continue;
                }
                let src = self.col(k);
                for (o, &a) in out.data[dst..dst + self.nrows].iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self' * rhs`, without forming the transpose.
    pub fn t_matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.nrows != rhs.nrows {
            return Err(Error::Shape(format!(
                "cannot form A'B for {}x{} and {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let mut out = Matrix::zeros(self.ncols, rhs.ncols);
        for j in 0..rhs.ncols {
            let b = rhs.col(j);
            for i in 0..self.ncols {
                out[(i, j)] = dot(self.col(i), b);
            }
        }
        Ok(out)
    }

    /// `self' * self`, the p×p cross-product. Exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let p = self.ncols;
        let mut out = Matrix::zeros(p, p);
        for j in 0..p {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    /// `self * self'`, the n×n Gram matrix of the rows. Exactly symmetric.
    pub fn outer_gram(&self) -> Matrix {
        let n = self.nrows;
        let mut out = Matrix::zeros(n, n);
        for c in self.columns() {
            for k in 0..n {
                let ck = c[k];
                if ck == 0.0 {
                    continue;
                }
                let dst = &mut out.data[k * n..k * n + k + 1];
                for (o, &ci) in dst.iter_mut().zip(&c[..=k]) {
                    *o += ci * ck;
                }
            }
        }
        for k in 0..n {
            for i in 0..k {
                out.data[i * n + k] = out.data[k * n + i];
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.ncols {
            return Err(Error::Shape(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.ncols
            )));
        }
        let mut out = vec![0.0; self.nrows];
        for (c, &vj) in self.columns().zip(v) {
            if vj == 0.0 {
                continue;
            }
            axpy(vj, c, &mut out);
        }
        Ok(out)
    }

    /// `self' * v`.
    pub fn t_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.nrows {
            return Err(Error::Shape(format!(
                "vector of length {} for {} rows",
                v.len(),
                self.nrows
            )));
        }
        Ok(self.columns().map(|c| dot(c, v)).collect())
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape(format!(
                "cannot subtract {}x{} and {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { nrows: self.nrows, ncols: self.ncols, data })
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.ncols.min(self.nrows) {
            for i in 0..j {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Replaces the matrix by `(A + A') / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.nrows;
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.nrows * cols.len());
        for &j in cols {
            data.extend_from_slice(self.col(j));
        }
        Matrix { nrows: self.nrows, ncols: cols.len(), data }
    }

    /// Lower Cholesky factor of a symmetric positive definite matrix.
    pub fn cholesky(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!("cholesky of {}x{}", self.nrows, self.ncols)));
        }
        let n = self.nrows;
        let scale = self.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 1e-14 * scale) {
                return Err(Error::Singular(format!("pivot {} is {:e}", j, d)));
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Solves `A x = b` for symmetric positive definite `A`.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>> {
        let l = self.cholesky()?;
        Ok(cholesky_solve(&l, b))
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Shape(format!("determinant of {}x{}", self.nrows, self.ncols)));
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut det = 1.0;
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                return Ok(0.0);
            }
            if piv != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                det = -det;
            }
            let akk = a[(k, k)];
            det *= akk;
            for i in k + 1..n {
                let f = a[(i, k)] / akk;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[i + j * self.nrows]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i + j * self.nrows]
    }
}

fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_direct_formula() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(m.gram(), Matrix::from_rows(&[[10.0, 14.0], [14.0, 20.0]]).unwrap());
        assert_eq!(m.outer_gram(), Matrix::from_rows(&[[5.0, 11.0], [11.0, 25.0]]).unwrap());
    }

    #[test]
    fn products_agree_with_transpose_route() {
        let a = Matrix::from_rows(&[[1.0, -2.0, 0.5], [0.0, 3.0, 1.0]]).unwrap();
        let b = Matrix::from_rows(&[[2.0], [1.0]]).unwrap();
        assert_eq!(a.t_matmul(&b).unwrap(), a.transpose().matmul(&b).unwrap());
        assert_eq!(a.gram(), a.transpose().matmul(&a).unwrap());
        assert_eq!(a.outer_gram(), a.matmul(&a.transpose()).unwrap());
        assert_eq!(a.t_matvec(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0, 1.5]);
    }

    #[test]
    fn spd_solve_and_determinant() {
        let a = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let x = a.solve_spd(&[2.0, 1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
        assert!((a.determinant().unwrap() - 8.0).abs() < 1e-12);
        let p = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(p.determinant().unwrap(), -1.0);
    }

    #[test]
    fn singular_cholesky_is_reported() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(a.cholesky(), Err(Error::Singular(_))));
        assert_eq!(a.determinant().unwrap(), 0.0);
    }

    #[test]
    fn shape_errors() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Shape(_))));
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}

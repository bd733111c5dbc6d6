use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dot, full_symmetric_eigen, Matrix};
use crate::{Error, Result};

/// Generator behind every simulation: ChaCha8 seeded with
/// `seed_from_u64(seed)`, with run `i` drawing from stream `i`.
pub type SimRng = ChaCha8Rng;

/// Identifier stored in reports so reruns can name the generator.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64/stream=run-index";

/// Tolerance for symmetry and positive semidefiniteness of `Σ`.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// The generator for run `run` of a seeded simulation.
pub fn run_rng(seed: u64, run: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// `Σ^{1/2} = V Λ^{1/2} V'`; tiny negative eigenvalues are clamped to zero.
pub fn symmetric_sqrt(sigma: &Matrix) -> Result<Matrix> {
    if !sigma.is_square() {
        return Err(Error::Config(format!("covariance is {}x{}", sigma.nrows(), sigma.ncols())));
    }
    let scale = sigma.max_abs().max(1.0);
    if sigma.asymmetry() > PSD_TOLERANCE * scale {
        return Err(Error::Config("covariance is not symmetric".into()));
    }
    let p = sigma.nrows();
    let pairs = full_symmetric_eigen(sigma)?;
    let mut root = Matrix::zeros(p, p);
    for pair in &pairs {
        if pair.value < -PSD_TOLERANCE * scale {
            return Err(Error::Config(format!("covariance has eigenvalue {:e}", pair.value)));
        }
        let s = libm::sqrt(pair.value.max(0.0));
        for j in 0..p {
            let vj = pair.vector[j] * s;
            for i in 0..p {
                root.as_mut_slice()[j * p + i] += pair.vector[i] * vj;
            }
        }
    }
    root.symmetrize();
    Ok(root)
}

pub fn standard_normal(rng: &mut SimRng) -> f64 {
    StandardNormal.sample(rng)
}

/// n×p matrix with i.i.d. `N(μ, Σ)` rows, `root = Σ^{1/2}`; `None` means
/// `Σ = I`.
pub fn normal_rows(rng: &mut SimRng, n: usize, mean: &[f64], root: Option<&Matrix>) -> Matrix {
    let p = mean.len();
    let mut e = Matrix::zeros(n, p);
    for v in e.as_mut_slice() {
        *v = standard_normal(rng);
    }
    let mut x = match root {
        None => e,
        Some(r) => e.matmul(r).expect("root is p×p"),
    };
    for (j, &mu) in mean.iter().enumerate() {
        if mu != 0.0 {
            x.col_mut(j).iter_mut().for_each(|v| *v += mu);
        }
    }
    x
}

/// An orthogonal n×n matrix `C'`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    c: Matrix,
}

impl RotationMatrix {
    /// Haar-distributed: Gram-Schmidt on a standard normal matrix, which
    /// leaves the triangular factor with a positive diagonal.
    pub fn random(n: usize, rng: &mut SimRng) -> Result<Self> {
        let mut a = Matrix::zeros(n, n);
        for v in a.as_mut_slice() {
            *v = standard_normal(rng);
        }
        for j in 0..n {
            for k in 0..j {
                let (prev, cur) = a.as_mut_slice().split_at_mut(j * n);
                let qk = &prev[k * n..(k + 1) * n];
                let cj = &mut cur[..n];
                let r = dot(qk, cj);
                cj.iter_mut().zip(qk).for_each(|(x, q)| *x -= r * q);
            }
            let col = a.col_mut(j);
            let norm = libm::sqrt(dot(col, col));
            if !(norm > 1e-12) {
                return Err(Error::Singular("normal draw was rank deficient".into()));
            }
            col.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(RotationMatrix { c: a })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.c
    }

    /// `max |C'C − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.c.gram();
        g.sub(&Matrix::identity(self.c.nrows())).expect("square").max_abs()
    }

    pub fn rotate(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.c.matvec(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let s = Matrix::from_rows(&[[4.0, 1.0], [1.0, 3.0]]).unwrap();
        let r = symmetric_sqrt(&s).unwrap();
        assert!(r.matmul(&r).unwrap().sub(&s).unwrap().max_abs() < 1e-12);
        let singular = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let r = symmetric_sqrt(&singular).unwrap();
        assert!(r.matmul(&r).unwrap().sub(&singular).unwrap().max_abs() < 1e-12);
        let bad = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_sqrt(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = run_rng(3, 0);
        for n in [1, 2, 7, 30] {
            let c = RotationMatrix::random(n, &mut rng).unwrap();
            assert!(c.orthogonality_error() < 1e-10);
            assert!((c.matrix().determinant().unwrap().abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| standard_normal(&mut run_rng(9, 5))).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut r5 = run_rng(9, 5);
        let mut r6 = run_rng(9, 6);
        assert_ne!(standard_normal(&mut r5), standard_normal(&mut r6));
    }
}

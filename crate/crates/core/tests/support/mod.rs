//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the crate's special functions.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `P(|T| ≤ t)` for Student t with `nu` degrees of freedom, written in terms
/// of `x = t²/(t² + ν)` through the finite trigonometric series.
pub fn t_central_from_x(x: f64, nu: u32) -> f64 {
    let sin = x.sqrt();
    let cos2 = 1.0 - x;
    let theta = sin.asin();
    if nu % 2 == 1 {
        if nu == 1 {
            return 2.0 / PI * theta;
        }
        // cosθ (1 + (2/3)cos²θ + (2·4)/(3·5)cos⁴θ + …), ν−2 power at most
        let cos = cos2.sqrt();
        let mut term = cos;
        let mut sum = cos;
        let mut k = 1;
        while 2 * k < nu as usize - 1 {
            term *= cos2 * (2 * k) as f64 / (2 * k + 1) as f64;
            sum += term;
            k += 1;
        }
        2.0 / PI * (theta + sin * sum)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1;
        while 2 * k < nu as usize {
            term *= cos2 * (2 * k - 1) as f64 / (2 * k) as f64;
            sum += term;
            k += 1;
        }
        sin * sum
    }
}

/// `x` with `P(|T_ν| ≤ √(νx/(1−x))) = prob`, by bisection.
pub fn t_oracle_beta_quantile(prob: f64, nu: u32) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if t_central_from_x(mid, nu) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫₀^L y^{p−1}(1−y)^{q−1} dy` for `L ≤ 1/2` by tanh-sinh quadrature,
/// which tolerates the algebraic singularity at 0.
pub fn incomplete_from_zero(l: f64, p: f64, q: f64) -> f64 {
    let h = 1.0 / 256.0;
    let t_max = 4.5;
    let steps = (t_max / h) as i64;
    let mut sum = 0.0;
    for k in -steps..=steps {
        let t = k as f64 * h;
        let u = PI / 2.0 * t.sinh();
        let y = l / (1.0 + (-2.0 * u).exp());
        if y <= 0.0 || !y.is_finite() {
            continue;
        }
        let w = l * PI / 2.0 * t.cosh() / (2.0 * u.cosh().powi(2));
        let f = y.powf(p - 1.0) * (1.0 - y).powf(q - 1.0);
        if f.is_finite() {
            sum += w * f;
        }
    }
    sum * h
}

/// Beta(a, b) distribution by quadrature, normalizer included.
pub struct QuadBeta {
    a: f64,
    b: f64,
    total: f64,
}

impl QuadBeta {
    pub fn new(a: f64, b: f64) -> Self {
        let total = incomplete_from_zero(0.5, a, b) + incomplete_from_zero(0.5, b, a);
        QuadBeta { a, b, total }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.5 {
            incomplete_from_zero(x, self.a, self.b) / self.total
        } else {
            1.0 - incomplete_from_zero(1.0 - x, self.b, self.a) / self.total
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x >= 0.5 {
            incomplete_from_zero(1.0 - x, self.b, self.a) / self.total
        } else {
            1.0 - incomplete_from_zero(x, self.a, self.b) / self.total
        }
    }

    /// Upper-`alpha` point, by bisection on the survival function.
    pub fn upper_quantile(&self, alpha: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.sf(mid) > alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Upper-α quantile of F(d1, d2) from the quadrature beta.
pub fn f_oracle_upper(alpha: f64, d1: f64, d2: f64) -> f64 {
    let b = QuadBeta::new(d1 / 2.0, d2 / 2.0).upper_quantile(alpha);
    (d2 / d1) * b / (1.0 - b)
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Wilks Λ for two score columns in the two-group design, by sequential
/// conditioning: `Λ = (E₁₁/T₁₁)(E₂₂.₁/T₂₂.₁)`. Error residuals remove group
/// means; totals remove the grand mean.
pub fn wilks_two_columns_two_group(z1: &[f64], z2: &[f64], group: &[bool]) -> f64 {
    let total_resid = |z: &[f64]| -> Vec<f64> {
        let m = z.iter().sum::<f64>() / z.len() as f64;
        z.iter().map(|v| v - m).collect()
    };
    let error_resid = |z: &[f64]| -> Vec<f64> {
        let mut s = [0.0; 2];
        let mut c = [0.0; 2];
        for (v, &g) in z.iter().zip(group) {
            s[g as usize] += v;
            c[g as usize] += 1.0;
        }
        z.iter().zip(group).map(|(v, &g)| v - s[g as usize] / c[g as usize]).collect()
    };
    let (t1, t2) = (total_resid(z1), total_resid(z2));
    let (e1, e2) = (error_resid(z1), error_resid(z2));
    let t11 = dotv(&t1, &t1);
    let e11 = dotv(&e1, &e1);
    let t22_1 = dotv(&t2, &t2) - dotv(&t1, &t2).powi(2) / t11;
    let e22_1 = dotv(&e2, &e2) - dotv(&e1, &e2).powi(2) / e11;
    (e11 / t11) * (e22_1 / t22_1)
}

/// Small deterministic generator for building fixtures without the crate.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn uniform(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u = self.uniform();
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
    }
}
pub mod replay;

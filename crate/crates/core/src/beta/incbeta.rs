use alloc::format;

use crate::{Error, Result};

/// p-values below this are clamped and flagged.
pub const P_VALUE_FLOOR: f64 = 1e-300;

const CF_MAX_ITER: usize = 1000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Shape parameters `(a, b)` of a beta distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("beta shapes must be positive, got ({}, {})", a, b)));
        }
        Ok(BetaParams { a, b })
    }

    /// `(f_H / 2, (f − f_H) / 2)`.
    pub fn for_ranks(f: usize, f_h: usize) -> Result<Self> {
        if f_h == 0 || f_h >= f {
            return Err(Error::Dimension(format!("need 1 <= f_H < f, got f_H = {}, f = {}", f_h, f)));
        }
        BetaParams::new(f_h as f64 / 2.0, (f - f_h) as f64 / 2.0)
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Beta density at `x`.
pub fn beta_density(x: f64, params: BetaParams) -> f64 {
    let BetaParams { a, b } = params;
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    libm::exp((a - 1.0) * libm::log(x) + (b - 1.0) * libm::log1p(-x) - ln_beta(a, b))
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {} outside [0, 1]", x)));
    }
    Ok(())
}

/// `x^a (1−x)^b / (a B(a,b))` times the continued fraction of `I_x(a, b)`;
/// accurate when `x < (a+1)/(a+b+2)`.
fn lower_by_fraction(x: f64, a: f64, b: f64) -> f64 {
    let ln_front = a * libm::log(x) + b * libm::log1p(-x) - ln_beta(a, b);
    let front = libm::exp(ln_front) / a;

    // modified Lentz
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    front * h
}

fn use_direct(x: f64, a: f64, b: f64) -> bool {
    x < (a + 1.0) / (a + b + 2.0)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_cdf(x: f64, params: BetaParams) -> Result<f64> {
    check_unit(x)?;
    let BetaParams { a, b } = params;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok(if use_direct(x, a, b) {
        lower_by_fraction(x, a, b)
    } else {
        1.0 - lower_by_fraction(1.0 - x, b, a)
    })
}

/// Upper tail `1 − I_x(a, b)`, computed without cancellation.
pub fn beta_sf(x: f64, params: BetaParams) -> Result<f64> {
    check_unit(x)?;
    let BetaParams { a, b } = params;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    Ok(if use_direct(x, a, b) {
        1.0 - lower_by_fraction(x, a, b)
    } else {
        lower_by_fraction(1.0 - x, b, a)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PValue {
    pub value: f64,
    /// The raw tail fell below [`P_VALUE_FLOOR`].
    pub clamped: bool,
}

/// `P(B' ≥ B)` for `B' ~ Beta(a, b)`.
pub fn beta_pvalue(stat: f64, params: BetaParams) -> Result<PValue> {
    let raw = beta_sf(stat, params)?;
    Ok(if raw < P_VALUE_FLOOR {
        PValue { value: P_VALUE_FLOOR, clamped: true }
    } else {
        PValue { value: raw.min(1.0), clamped: false }
    })
}

/// `x` with `I_x(a, b) = prob`.
pub fn beta_quantile(prob: f64, params: BetaParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!("probability {} outside (0, 1)", prob)));
    }
    if prob <= 0.5 {
        Ok(invert(prob, params, Tail::Lower))
    } else {
        Ok(invert(1.0 - prob, params, Tail::Upper))
    }
}

/// Critical value `B_{1−α}(a, b)`: the `x` whose upper tail is exactly `α`.
pub fn beta_critical_value(alpha: f64, params: BetaParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {} outside (0, 1)", alpha)));
    }
    if alpha <= 0.5 {
        Ok(invert(alpha, params, Tail::Upper))
    } else {
        Ok(invert(1.0 - alpha, params, Tail::Lower))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Tail {
    Lower,
    Upper,
}

fn tail_prob(x: f64, params: BetaParams, tail: Tail) -> f64 {
    match tail {
        Tail::Lower => beta_cdf(x, params).expect("x in [0,1]"),
        Tail::Upper => beta_sf(x, params).expect("x in [0,1]"),
    }
}

/// Starting point for the lower-tail quantile at `p`.
fn initial_guess(p: f64, a: f64, b: f64) -> f64 {
    if a >= 1.0 && b >= 1.0 {
        let pp = if p < 0.5 { p } else { 1.0 - p };
        let t = libm::sqrt(-2.0 * libm::log(pp));
        let mut x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if p < 0.5 {
            x = -x;
        }
        let al = (x * x - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = x * libm::sqrt(al + h) / h
            - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        a / (a + b * libm::exp(2.0 * w))
    } else {
        let lna = libm::log(a / (a + b));
        let lnb = libm::log(b / (a + b));
        let t = libm::exp(a * lna) / a;
        let u = libm::exp(b * lnb) / b;
        let w = t + u;
        if p < t / w {
            libm::pow(a * w * p, 1.0 / a)
        } else {
            1.0 - libm::pow(b * w * (1.0 - p), 1.0 / b)
        }
    }
}

/// Newton iteration safeguarded by a shrinking bracket. `target` is the
/// probability of the requested tail.
fn invert(target: f64, params: BetaParams, tail: Tail) -> f64 {
    let BetaParams { a, b } = params;
    let lower_p = match tail {
        Tail::Lower => target,
        Tail::Upper => 1.0 - target,
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut x = initial_guess(lower_p, a, b);
    if !(x > 0.0 && x < 1.0) || !x.is_finite() {
        x = 0.5;
    }
    // residual is increasing in x for the lower tail, decreasing for the upper
    let sign = if tail == Tail::Lower { 1.0 } else { -1.0 };
    for _ in 0..400 {
        let r = sign * (tail_prob(x, params, tail) - target);
        if r == 0.0 {
            return x;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dens = beta_density(x, params);
        let mut next = if dens > 0.0 && dens.is_finite() { x - r / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = if lo > 0.0 && hi / lo > 1e3 { libm::sqrt(lo * hi) } else { 0.5 * (lo + hi) };
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE) || hi - lo <= f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}

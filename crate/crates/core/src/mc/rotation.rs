use alloc::vec::Vec;

use super::sampling::{run_rng, RotationMatrix, SimRng};
use crate::beta::{ks_two_sample, ks_two_sample_pvalue};
use crate::score_tests::one_group_statistic;
use crate::{Error, Result};

/// Level of the two-sample KS comparison.
pub const KS_LEVEL: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotationReport {
    pub trials: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
    /// The rotated and unrotated statistics are indistinguishable at
    /// [`KS_LEVEL`]; `false` flags a non-spherical generator.
    pub passes: bool,
    pub orthogonality_error: f64,
}

/// Compares the one-group statistic of generated scores `z` with that of
/// `C'z` for one random orthogonal `C'`, distributionally.
///
/// The unrotated and rotated samples come from disjoint runs, so the
/// comparison is never pointwise.
pub fn rotation_invariance_check<G>(mut generator: G, n: usize, trials: usize, seed: u64) -> Result<RotationReport>
where
    G: FnMut(&mut SimRng) -> Vec<f64>,
{
    if trials < 2 {
        return Err(Error::Config("need at least 2 trials".into()));
    }
    let mut crng = run_rng(seed, u64::MAX);
    let c = RotationMatrix::random(n, &mut crng)?;
    let mut plain = Vec::with_capacity(trials);
    let mut rotated = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let z = generator(&mut run_rng(seed, 2 * t));
        if z.len() != n {
            return Err(Error::Shape(alloc::format!("generator gave {} values, expected {}", z.len(), n)));
        }
        plain.push(one_group_statistic(&z)?);
        let w = generator(&mut run_rng(seed, 2 * t + 1));
        rotated.push(one_group_statistic(&c.rotate(&w)?)?);
    }
    plain.sort_by(f64::total_cmp);
    rotated.sort_by(f64::total_cmp);
    let d = ks_two_sample(&plain, &rotated);
    let p_value = ks_two_sample_pvalue(d, trials, trials);
    Ok(RotationReport {
        trials,
        ks_statistic: d,
        p_value,
        passes: p_value > KS_LEVEL,
        orthogonality_error: c.orthogonality_error(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::standard_normal;
    use super::*;

    #[test]
    fn spherical_generator_passes() {
        let r = rotation_invariance_check(|rng| (0..8).map(|_| standard_normal(rng)).collect(), 8, 2000, 5).unwrap();
        assert!(r.passes, "{:?}", r);
        assert!(r.orthogonality_error < 1e-10);
    }

    #[test]
    fn constant_generator_is_flagged() {
        let r = rotation_invariance_check(|_| vec![1.0; 6], 6, 200, 5).unwrap();
        assert!(!r.passes);
    }

    #[test]
    fn shifted_generator_is_flagged() {
        let r = rotation_invariance_check(
            |rng| (0..10).map(|_| 2.0 + standard_normal(rng)).collect(),
            10,
            2000,
            8,
        )
        .unwrap();
        assert!(!r.passes);
    }
}

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::Design;
use crate::score_tests::{check_alpha, test_values, BetaTestResult, ScoreVector};
use crate::{Error, Result};

/// Stopping rule for ordered score tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Procedure {
    /// Test at `α` until the first non-significance.
    Simple,
    /// Test at `α/k` until the k-th non-significance.
    HommelKropf(usize),
}

impl Procedure {
    pub fn validate(self) -> Result<Self> {
        match self {
            Procedure::HommelKropf(0) => Err(Error::Config("hommel-kropf needs k >= 1".into())),
            p => Ok(p),
        }
    }

    fn allowed_failures(self) -> usize {
        match self {
            Procedure::Simple => 1,
            Procedure::HommelKropf(k) => k,
        }
    }

    /// Per-test level.
    pub fn level(self, alpha: f64) -> f64 {
        alpha / self.allowed_failures() as f64
    }
}

/// Which positions were tested and which were significant (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SequentialDecision {
    /// Number of positions tested; the first untested index.
    pub stop_index: usize,
    pub significant_indices: Vec<usize>,
}

impl SequentialDecision {
    pub fn any_significant(&self) -> bool {
        !self.significant_indices.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SequentialOutcome {
    /// One result per tested position.
    pub results: Vec<BetaTestResult>,
    pub stop_index: usize,
    pub significant_indices: Vec<usize>,
    pub procedure: Procedure,
    pub level_used: f64,
}

/// Runs the procedure over `count` ordered positions, calling `test` with a
/// position and the per-test level only for positions that get tested.
pub fn run_sequential_with<F>(
    count: usize,
    alpha: f64,
    procedure: Procedure,
    mut test: F,
) -> Result<(SequentialDecision, Vec<BetaTestResult>)>
where
    F: FnMut(usize, f64) -> Result<BetaTestResult>,
{
    check_alpha(alpha)?;
    let procedure = procedure.validate()?;
    if count == 0 {
        return Err(Error::EmptyInput);
    }
    let level = procedure.level(alpha);
    let limit = procedure.allowed_failures();
    let mut results = Vec::new();
    let mut significant_indices = Vec::new();
    let mut failures = 0;
    for h in 0..count {
        let r = test(h, level)?;
        if r.significant {
            significant_indices.push(h);
        } else {
            failures += 1;
        }
        results.push(r);
        if failures == limit {
            break;
        }
    }
    let stop_index = results.len();
    Ok((SequentialDecision { stop_index, significant_indices }, results))
}

/// Applies the procedure to precomputed p-values.
pub fn sequential_on_pvalues(p_values: &[f64], alpha: f64, procedure: Procedure) -> Result<SequentialDecision> {
    check_alpha(alpha)?;
    let procedure = procedure.validate()?;
    if p_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let level = procedure.level(alpha);
    let limit = procedure.allowed_failures();
    let mut significant_indices = Vec::new();
    let mut failures = 0;
    let mut stop_index = p_values.len();
    for (h, &p) in p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p-value {} at position {}", p, h)));
        }
        if p <= level {
            significant_indices.push(h);
        } else {
            failures += 1;
            if failures == limit {
                stop_index = h + 1;
                break;
            }
        }
    }
    Ok(SequentialDecision { stop_index, significant_indices })
}

/// Tests ordered scores under `design` with the chosen stopping rule.
pub fn run_sequential(
    scores: &[ScoreVector],
    design: &Design,
    alpha: f64,
    procedure: Procedure,
) -> Result<SequentialOutcome> {
    for z in scores {
        if z.design() != design.kind() {
            return Err(Error::Design(format!(
                "score built for {:?}, tested under {:?}",
                z.design(),
                design.kind()
            )));
        }
    }
    let (decision, results) =
        run_sequential_with(scores.len(), alpha, procedure, |h, level| test_values(scores[h].values(), design, level))?;
    Ok(SequentialOutcome {
        results,
        stop_index: decision.stop_index,
        significant_indices: decision.significant_indices,
        procedure,
        level_used: procedure.level(alpha),
    })
}

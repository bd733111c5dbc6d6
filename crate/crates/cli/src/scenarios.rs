//! Built-in designs and weight rules for the simulation subcommands.

use scoresphere::linalg::{Design, GroupLabels, TargetVector};
use scoresphere::mc::{SimConfig, WeightRule};
use scoresphere::model_choice::Procedure;
use scoresphere::{Matrix, ProjectionPair, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKindArg {
    OneGroup,
    TwoGroup,
    Correlation,
    General,
}

/// Target `y_j = j − (n + 1)/2`.
pub fn trend_target(n: usize) -> Result<TargetVector> {
    let mid = (n as f64 + 1.0) / 2.0;
    TargetVector::from_centered((1..=n).map(|j| j as f64 - mid).collect())
}

/// Intercept and linear trend as nuisance, indicators of the first two of
/// three equal blocks as hypothesis: `f = n − 2`, `f_H = 2`.
pub fn block_design(n: usize) -> Result<ProjectionPair> {
    if n < 6 {
        return Err(scoresphere::Error::Design(format!("block design needs n >= 6, got {}", n)));
    }
    let nuisance = Matrix::from_columns(n, &[vec![1.0; n], (0..n).map(|j| j as f64).collect()])?;
    let size = n / 3;
    let block = |k: usize| (0..n).map(|j| if j / size == k { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let hyp = Matrix::from_columns(n, &[block(0), block(1)])?;
    ProjectionPair::from_bases(n, &nuisance, &hyp)
}

/// The design and its number of individuals.
pub fn design(kind: DesignKindArg, n: usize, n1: usize, n2: usize) -> Result<(Design, usize)> {
    Ok(match kind {
        DesignKindArg::OneGroup => (Design::OneGroup, n),
        DesignKindArg::TwoGroup => (Design::TwoGroup(GroupLabels::from_sizes(n1, n2)?), n1 + n2),
        DesignKindArg::Correlation => (Design::Correlation(trend_target(n)?), n),
        DesignKindArg::General => (Design::General(block_design(n)?), n),
    })
}

/// The four null scenarios used for level and shape checks.
pub fn standard_null(kind: DesignKindArg, alpha: f64, runs: u64, seed: u64) -> Result<SimConfig> {
    let (d, n, p) = match kind {
        DesignKindArg::OneGroup => (design(kind, 10, 0, 0)?.0, 10, 5),
        DesignKindArg::TwoGroup => (design(kind, 0, 6, 8)?.0, 14, 12),
        DesignKindArg::Correlation => (design(kind, 15, 0, 0)?.0, 15, 20),
        DesignKindArg::General => (design(kind, 12, 0, 0)?.0, 12, 6),
    };
    let mut cfg = SimConfig::null(n, p, d, runs, alpha, seed);
    cfg.rule = WeightRule::Pca { components: 1 };
    cfg.procedure = Procedure::Simple;
    Ok(cfg)
}

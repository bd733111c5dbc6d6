//! Seeded Monte Carlo checks of the exactness claims.
//!
//! Runs are independent: run `i` draws from its own ChaCha8 stream, so a
//! tally over runs `0..N` is the same however the range is split.
//! [`simulate_runs`] covers a range; [`SimTally::merge`] joins ranges in
//! order and [`SimTally::report`] summarizes.

mod rotation;
mod sampling;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

pub use rotation::{rotation_invariance_check, RotationReport, KS_LEVEL};
pub use sampling::{
    normal_rows, run_rng, standard_normal, symmetric_sqrt, RotationMatrix, SimRng, PSD_TOLERANCE,
    RNG_ALGORITHM,
};

use crate::beta::{beta_cdf, beta_quantile, ks_one_sample, ks_one_sample_pvalue, BetaParams};
use crate::linalg::{Design, Matrix};
use crate::model_choice::{
    build_gene_sets, column_sum_order_data, gene_set_weights, kropf_diagonal_order_data, pca_weights,
    run_sequential_with, GeneSetOptions, Procedure,
};
use crate::score_tests::{check_alpha, design_params, design_statistic, test_values};
use crate::{Error, Result};

/// How each simulated data set is turned into ordered scores.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum WeightRule {
    /// Leading principal components of `M'M`.
    Pca { components: usize },
    /// Variables by decreasing diagonal of `M'M`.
    KropfDiagonal,
    /// Variables by decreasing absolute column sums of `M'M`.
    ColumnSum,
    GeneSets(GeneSetOptions),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub mean: Vec<f64>,
    /// `None` means `Σ = I`.
    pub covariance: Option<Matrix>,
    pub runs: u64,
    pub alpha: f64,
    pub seed: u64,
    pub design: Design,
    pub rule: WeightRule,
    pub procedure: Procedure,
    /// Leading positions whose individual rejection rates are tallied.
    pub tracked: usize,
    /// Keep the first score's statistic from every run.
    pub record_statistics: bool,
}

impl SimConfig {
    /// Null configuration: `μ = 0`, `Σ = I`, PCA weights, simple procedure.
    pub fn null(n: usize, p: usize, design: Design, runs: u64, alpha: f64, seed: u64) -> Self {
        SimConfig {
            n,
            mean: vec![0.0; p],
            covariance: None,
            runs,
            alpha,
            seed,
            design,
            rule: WeightRule::Pca { components: 1 },
            procedure: Procedure::Simple,
            tracked: 1,
            record_statistics: true,
        }
    }

    pub fn p(&self) -> usize {
        self.mean.len()
    }
}

/// Validated configuration with `Σ^{1/2}` and the test's beta shape.
#[derive(Clone, Debug)]
pub struct PreparedSim {
    pub config: SimConfig,
    root: Option<Matrix>,
    pub params: BetaParams,
}

pub fn prepare(cfg: &SimConfig) -> Result<PreparedSim> {
    check_alpha(cfg.alpha)?;
    cfg.procedure.validate()?;
    if cfg.runs < 1 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    let p = cfg.p();
    if p == 0 {
        return Err(Error::Config("need at least one variable".into()));
    }
    if cfg.mean.iter().any(|m| !m.is_finite()) {
        return Err(Error::Config("non-finite mean".into()));
    }
    cfg.design.check_n(cfg.n).map_err(|e| Error::Config(e.to_string()))?;
    let root = match &cfg.covariance {
        None => None,
        Some(s) => {
            if s.nrows() != p {
                return Err(Error::Config(format!("covariance is {}x{}, mean has {} entries", s.nrows(), s.ncols(), p)));
            }
            Some(symmetric_sqrt(s)?)
        }
    };
    if let WeightRule::Pca { components: 0 } = cfg.rule {
        return Err(Error::Config("need at least one component".into()));
    }
    let params = design_params(&cfg.design, cfg.n)?;
    Ok(PreparedSim { config: cfg.clone(), root, params })
}

/// Counts over a contiguous range of runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SimTally {
    pub runs: Range<u64>,
    /// Position `h` significant when tested alone at `α`.
    pub marginal: Vec<u64>,
    /// Position `h` reported significant by the sequential procedure.
    pub sequential: Vec<u64>,
    /// Runs where the procedure reported at least one significance.
    pub any_significant: u64,
    /// First-score statistics in run order.
    pub statistics: Vec<f64>,
}

impl SimTally {
    fn empty(runs: Range<u64>, tracked: usize) -> Self {
        SimTally {
            runs,
            marginal: vec![0; tracked],
            sequential: vec![0; tracked],
            any_significant: 0,
            statistics: Vec::new(),
        }
    }

    /// Joins the tally of the immediately following range.
    pub fn merge(mut self, next: SimTally) -> Result<SimTally> {
        if self.runs.end != next.runs.start || self.marginal.len() != next.marginal.len() {
            return Err(Error::Config(format!(
                "cannot merge runs {:?} with {:?}",
                self.runs, next.runs
            )));
        }
        self.runs.end = next.runs.end;
        self.marginal.iter_mut().zip(&next.marginal).for_each(|(a, b)| *a += b);
        self.sequential.iter_mut().zip(&next.sequential).for_each(|(a, b)| *a += b);
        self.any_significant += next.any_significant;
        self.statistics.extend_from_slice(&next.statistics);
        Ok(self)
    }

    pub fn count(&self) -> u64 {
        self.runs.end - self.runs.start
    }

    pub fn report(&self, sim: &PreparedSim) -> Result<SimReport> {
        let runs = self.count();
        if runs == 0 {
            return Err(Error::EmptyInput);
        }
        let cfg = &sim.config;
        let freq = |c: u64| c as f64 / runs as f64;
        let frequencies: Vec<f64> = self.marginal.iter().map(|&c| freq(c)).collect();
        let half_widths = frequencies.iter().map(|&f| half_width(f, runs)).collect();
        let sequential_frequencies = self.sequential.iter().map(|&c| freq(c)).collect();
        let any = freq(self.any_significant);

        let (ks, quantiles) = if self.statistics.is_empty() {
            (None, Vec::new())
        } else {
            let mut sorted = self.statistics.clone();
            sorted.sort_by(f64::total_cmp);
            let params = sim.params;
            let d = ks_one_sample(&sorted, |x| beta_cdf(x, params).unwrap_or(f64::NAN));
            let ks = KsSummary { statistic: d, p_value: ks_one_sample_pvalue(d, sorted.len()), samples: sorted.len() };
            let mut rows = Vec::new();
            for prob in [0.5, 0.9, 0.95, 0.99] {
                let k = ((prob * sorted.len() as f64) as usize).min(sorted.len() - 1);
                rows.push(QuantileRow { prob, empirical: sorted[k], theoretical: beta_quantile(prob, params)? });
            }
            (Some(ks), rows)
        };
        Ok(SimReport {
            rng: RNG_ALGORITHM.to_string(),
            seed: cfg.seed,
            runs,
            alpha: cfg.alpha,
            params: sim.params,
            procedure: cfg.procedure,
            frequencies,
            half_widths,
            sequential_frequencies,
            any_significant: any,
            any_half_width: half_width(any, runs),
            ks,
            quantiles,
        })
    }
}

/// Binomial 3σ half-width `3√(f(1−f)/runs)`.
pub fn half_width(f: f64, runs: u64) -> f64 {
    3.0 * libm::sqrt(f * (1.0 - f) / runs as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsSummary {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantileRow {
    pub prob: f64,
    pub empirical: f64,
    pub theoretical: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimReport {
    pub rng: String,
    pub seed: u64,
    pub runs: u64,
    pub alpha: f64,
    pub params: BetaParams,
    pub procedure: Procedure,
    /// Marginal rejection frequency of each tracked position.
    pub frequencies: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub sequential_frequencies: Vec<f64>,
    /// Frequency of at least one sequential significance.
    pub any_significant: f64,
    pub any_half_width: f64,
    /// First-score statistic against its beta law.
    pub ks: Option<KsSummary>,
    pub quantiles: Vec<QuantileRow>,
}

fn weights_for(m: &Matrix, rule: &WeightRule, limit: usize) -> Result<Vec<Vec<f64>>> {
    let w = match rule {
        WeightRule::Pca { components } => pca_weights(m, *components)?.weights,
        WeightRule::KropfDiagonal => kropf_diagonal_order_data(m).weights(limit)?,
        WeightRule::ColumnSum => column_sum_order_data(m).weights(limit)?,
        WeightRule::GeneSets(opts) => {
            let build = build_gene_sets(m, opts)?;
            gene_set_weights(&build.sets, m)?
        }
    };
    Ok(w.columns().to_vec())
}

/// Simulates the runs in `range`.
pub fn simulate_runs(sim: &PreparedSim, range: Range<u64>) -> Result<SimTally> {
    let cfg = &sim.config;
    let mut tally = SimTally::empty(range.clone(), cfg.tracked);
    if cfg.record_statistics {
        tally.statistics.reserve((range.end - range.start) as usize);
    }
    let limit = cfg.p();
    for run in range {
        let mut rng = run_rng(cfg.seed, run);
        let x = normal_rows(&mut rng, cfg.n, &cfg.mean, sim.root.as_ref());
        let m = cfg.design.project(&x)?;
        let weights = weights_for(&m, &cfg.rule, limit)?;
        if weights.is_empty() {
            continue;
        }
        let mut scores: Vec<Option<Vec<f64>>> = vec![None; weights.len()];
        let mut score = |h: usize| -> Result<Vec<f64>> {
            if scores[h].is_none() {
                scores[h] = Some(m.matvec(&weights[h])?);
            }
            Ok(scores[h].clone().expect("just filled"))
        };
        for h in 0..cfg.tracked.min(weights.len()) {
            if test_values(&score(h)?, &cfg.design, cfg.alpha)?.significant {
                tally.marginal[h] += 1;
            }
        }
        if cfg.record_statistics {
            tally.statistics.push(design_statistic(&score(0)?, &cfg.design)?);
        }
        let (decision, _) = run_sequential_with(weights.len(), cfg.alpha, cfg.procedure, |h, level| {
            test_values(&score(h)?, &cfg.design, level)
        })?;
        if decision.any_significant() {
            tally.any_significant += 1;
        }
        for &h in &decision.significant_indices {
            if h < cfg.tracked {
                tally.sequential[h] += 1;
            }
        }
    }
    Ok(tally)
}

/// Single-threaded run of `cfg`.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    let sim = prepare(cfg)?;
    simulate_runs(&sim, 0..cfg.runs)?.report(&sim)
}

/// Rejection rate of the scenario under its null configuration.
pub fn simulate_null_level(cfg: &SimConfig) -> Result<SimReport> {
    simulate(cfg)
}

/// `n = 10` rows `N₃((0, 0, 3), I₃)`, scores the raw columns in order of
/// decreasing absolute column sums of `X'X`, one-group tests at `α = 0.05`.
pub fn example2_config(runs: u64, seed: u64) -> SimConfig {
    SimConfig {
        n: 10,
        mean: vec![0.0, 0.0, 3.0],
        covariance: None,
        runs,
        alpha: 0.05,
        seed,
        design: Design::OneGroup,
        rule: WeightRule::ColumnSum,
        procedure: Procedure::Simple,
        tracked: 2,
        record_statistics: false,
    }
}

/// Minimum run count accepted by [`simulate_example2`].
pub const EXAMPLE2_MIN_RUNS: u64 = 100_000;

pub fn simulate_example2(runs: u64, seed: u64) -> Result<SimReport> {
    if runs < EXAMPLE2_MIN_RUNS {
        return Err(Error::Config(format!("the column-sum ordering scenario needs at least {} runs", EXAMPLE2_MIN_RUNS)));
    }
    simulate(&example2_config(runs, seed))
}

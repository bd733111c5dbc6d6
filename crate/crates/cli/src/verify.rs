//! Quick invariant suite behind the `verify` subcommand.

use std::f64::consts::PI;

use scoresphere::beta::{beta_cdf, beta_quantile, BetaParams};
use scoresphere::linalg::{dual_primal_gap, make_design_projections};
use scoresphere::mc::{example2_config, run_rng, standard_normal, SimRng};
use scoresphere::model_choice::{GeneSetOptions, INCLUSION_THRESHOLD, TOP_CAP};
use scoresphere::score_tests::{score_test_general, wilks_test};
use scoresphere::{Matrix, Result};

use crate::parallel;
use crate::scenarios::{design, standard_null, DesignKindArg};

#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn normal_matrix(rng: &mut SimRng, n: usize, p: usize) -> Matrix {
    let data: Vec<f64> = (0..n * p).map(|_| standard_normal(rng)).collect();
    Matrix::from_col_major(n, p, data).expect("sized")
}

fn quantiles() -> Result<Check> {
    let mut worst = 0.0f64;
    for &alpha in &[0.1, 0.05, 0.01, 0.00125] {
        // one and two degrees of freedom have closed forms
        let cauchy = (PI * (1.0 - alpha) / 2.0).sin().powi(2);
        worst = worst.max((beta_quantile(1.0 - alpha, BetaParams::new(0.5, 0.5)?)? - cauchy).abs());
        let two = (1.0 - alpha) * (1.0 - alpha);
        worst = worst.max((beta_quantile(1.0 - alpha, BetaParams::new(0.5, 1.0)?)? - two).abs());
    }
    let mut round = 0.0f64;
    for a in [0.3, 0.5, 1.0, 2.5, 10.0] {
        for b in [0.5, 1.0, 4.5, 54.0, 200.0] {
            let p = BetaParams::new(a, b)?;
            for prob in [0.01, 0.3, 0.5, 0.95, 0.999] {
                round = round.max((beta_cdf(beta_quantile(prob, p)?, p)? - prob).abs());
            }
        }
    }
    Ok(Check {
        name: "beta quantiles".into(),
        passed: worst < 1e-12 && round < 1e-10,
        detail: format!("closed-form error {:.2e}, round-trip error {:.2e}", worst, round),
    })
}

fn dual_primal(seed: u64) -> Result<Check> {
    let mut worst = 0.0f64;
    for i in 0..50 {
        let mut rng = run_rng(seed, i);
        let n = 4 + (i as usize % 10);
        let m = normal_matrix(&mut rng, n, n + 5 + i as usize);
        worst = worst.max(dual_primal_gap(&m)?);
    }
    Ok(Check {
        name: "dual/primal eigenvalues".into(),
        passed: worst < 1e-8,
        detail: format!("max relative gap {:.2e} over 50 matrices", worst),
    })
}

fn wilks_link(seed: u64) -> Result<Check> {
    let mut worst = 0.0f64;
    for (k, kind) in [DesignKindArg::OneGroup, DesignKindArg::TwoGroup, DesignKindArg::Correlation, DesignKindArg::General]
        .into_iter()
        .enumerate()
    {
        let (d, n) = design(kind, 12, 5, 7)?;
        let pair = make_design_projections(&d, n)?;
        for i in 0..25 {
            let mut rng = run_rng(seed, (k * 100 + i) as u64);
            let w: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
            let z = pair.q().matvec(&w)?;
            let b = score_test_general(&z, &pair, 0.05)?.statistic;
            let l = wilks_test(&Matrix::column_vector(&z), &pair, 0.05)?.lambda;
            worst = worst.max((l - (1.0 - b)).abs());
        }
    }
    Ok(Check {
        name: "wilks lambda = 1 - B".into(),
        passed: worst < 1e-12,
        detail: format!("max deviation {:.2e}", worst),
    })
}

fn gene_set_rules(seed: u64) -> Result<Check> {
    let mut problems = Vec::new();
    for i in 0..5 {
        let mut rng = run_rng(seed, 1000 + i);
        let factor: Vec<f64> = (0..20).map(|_| standard_normal(&mut rng)).collect();
        let mut x = normal_matrix(&mut rng, 20, 60);
        for j in (0..60).step_by(3) {
            x.col_mut(j).iter_mut().zip(&factor).for_each(|(v, f)| *v += 2.0 * f);
        }
        let m = scoresphere::linalg::center(&x)?.values;
        let build = parallel::build_gene_sets(&m, &GeneSetOptions::default())?;
        let ss = scoresphere::model_choice::column_sums_of_squares(&m);
        let mut used = [false; 60];
        for s in &build.sets {
            for (&j, &r) in s.members.iter().zip(&s.correlations).skip(1) {
                if ss[j] > ss[s.center] || r < INCLUSION_THRESHOLD {
                    problems.push(format!("member {} of set {}", j, s.center));
                }
            }
            let capped: f64 = s.correlations.iter().take(TOP_CAP).sum();
            if (s.measure - ss[s.center] * capped).abs() > 1e-9 * s.measure {
                problems.push(format!("measure of set {}", s.center));
            }
            for &j in &s.top {
                if std::mem::replace(&mut used[j], true) {
                    problems.push(format!("variable {} in two top lists", j));
                }
            }
        }
    }
    Ok(Check {
        name: "gene-set rules".into(),
        passed: problems.is_empty(),
        detail: if problems.is_empty() { "5 data sets re-verified".into() } else { problems.join("; ") },
    })
}

fn null_level(runs: u64, seed: u64) -> Result<Check> {
    let r = parallel::simulate(&standard_null(DesignKindArg::OneGroup, 0.05, runs, seed)?)?;
    let band = 3.0 * (0.05f64 * 0.95 / runs as f64).sqrt();
    let ks = r.ks.expect("statistics recorded");
    Ok(Check {
        name: "null level (one-group, PCA)".into(),
        passed: (r.frequencies[0] - 0.05).abs() <= band && ks.p_value > 0.001,
        detail: format!(
            "rate {:.5} vs 0.05 ± {:.5}; KS D = {:.5}, p = {:.3}",
            r.frequencies[0], band, ks.statistic, ks.p_value
        ),
    })
}

fn example2(runs: u64, seed: u64) -> Result<Check> {
    let r = parallel::simulate(&example2_config(runs, seed))?;
    let tol = (7.0 * r.half_widths[1]).max(0.002);
    Ok(Check {
        name: "column-sum ordering scenario".into(),
        passed: r.frequencies[0] >= 0.999 && (r.frequencies[1] - 0.0834).abs() <= tol,
        detail: format!("score 1 {:.5}, score 2 {:.5} (target 0.0834 ± {:.4}), {} runs", r.frequencies[0], r.frequencies[1], tol, runs),
    })
}

/// Runs every check; simulations use `runs` replications.
pub fn run_all(runs: u64, seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        quantiles()?,
        dual_primal(seed)?,
        wilks_link(seed)?,
        gene_set_rules(seed)?,
        null_level(runs, seed)?,
        example2(runs, seed)?,
    ])
}

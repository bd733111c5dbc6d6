//! The analysis pipeline: design-projected data → weights → scores →
//! sequential beta tests → result table.

use std::path::PathBuf;

use serde::Serialize;

use scoresphere::linalg::Design;
use scoresphere::model_choice::{
    gene_set_weights, pca_weights, run_sequential, GeneSetOptions, Procedure, Warning,
    WeightMatrix, WeightSource,
};
use scoresphere::score_tests::{regression_score, ScoreOrigin, ScoreVector};
use scoresphere::{DataMatrix, Matrix};

use crate::error::{CliError, Context};
use crate::ingest::{ingest, read_projection_pair, IngestOptions, Ingested};
use crate::parallel;
use crate::report::{fmt_p_short, ser12, ser12_vec, ResultRow};

#[derive(Clone, Debug, PartialEq)]
pub enum DesignSpec {
    OneGroup,
    TwoGroup { labels: String },
    Correlation { target: String },
    General { q: PathBuf, q_h: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    /// Leading principal components; `None` takes all nonzero ones.
    Pca { components: Option<usize> },
    GeneSets(GeneSetOptions),
    ColumnOrder,
    DiagonalOrder,
    /// Residual of one variable on all the others.
    Regression { response: String },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Pca { .. } => "pca",
            Method::GeneSets(_) => "gene-sets",
            Method::ColumnOrder => "column-order",
            Method::DiagonalOrder => "diagonal-order",
            Method::Regression { .. } => "regression",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub design: DesignSpec,
    pub method: Method,
    pub alpha: f64,
    pub procedure: Procedure,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if let Procedure::HommelKropf(0) = self.procedure {
            return Err(CliError::Usage("--k must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneSetInfo {
    pub score: usize,
    pub center: String,
    #[serde(serialize_with = "ser12")]
    pub measure: f64,
    pub size: usize,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub design: String,
    pub method: String,
    pub alpha: f64,
    pub procedure: String,
    pub k: Option<usize>,
    pub level_used: f64,
    pub n: usize,
    pub p: usize,
    /// Beta shapes of the score tests.
    pub beta_a: f64,
    pub beta_b: f64,
    /// Fingerprint of the matrix the weights were derived from.
    pub weights_fingerprint: String,
    pub scores_available: usize,
    /// Positions tested before the procedure stopped.
    pub stop_index: usize,
    /// 1-based score numbers.
    pub significant: Vec<usize>,
    pub rows: Vec<ResultRow>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_vec12")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gene_sets: Option<Vec<GeneSetInfo>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<[String; 2]>,
    pub warnings: Vec<String>,
}

fn opt_vec12<S: serde::Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(xs) => ser12_vec(xs, s),
        None => s.serialize_none(),
    }
}

fn design_name(d: &Design) -> &'static str {
    match d {
        Design::OneGroup => "one-group",
        Design::TwoGroup(_) => "two-group",
        Design::Correlation(_) => "correlation",
        Design::General(_) => "general",
    }
}

fn warning_text(w: &Warning, ids: &[String]) -> String {
    match w {
        Warning::RankReduced { requested, used } => {
            format!("requested {} components, only {} are numerically nonzero", requested, used)
        }
        Warning::ZeroVarianceSkipped(cols) => {
            let names: Vec<&str> = cols.iter().map(|&i| ids[i].as_str()).collect();
            format!("skipped zero-variance variables: {}", names.join(", "))
        }
    }
}

/// Reads the input and runs the configured analysis.
pub fn run_analysis(cfg: &AnalysisConfig) -> Result<AnalysisReport, CliError> {
    cfg.validate()?;
    let opts = IngestOptions {
        label_column: match &cfg.design {
            DesignSpec::TwoGroup { labels } => Some(labels.clone()),
            _ => None,
        },
        target_column: match &cfg.design {
            DesignSpec::Correlation { target } => Some(target.clone()),
            _ => None,
        },
        delimiter: None,
    };
    let ingested = ingest(&cfg.input, &opts)?;
    let design = match &cfg.design {
        DesignSpec::OneGroup => Design::OneGroup,
        DesignSpec::TwoGroup { .. } => Design::TwoGroup(ingested.labels.clone().expect("requested").groups),
        DesignSpec::Correlation { .. } => Design::Correlation(ingested.target.clone().expect("requested")),
        DesignSpec::General { q, q_h } => Design::General(read_projection_pair(q, q_h)?),
    };
    analyze(&ingested, &design, &cfg.method, cfg.alpha, cfg.procedure)
}

struct Weighted {
    weights: WeightMatrix,
    labels: Vec<String>,
    eigenvalues: Option<Vec<f64>>,
    gene_sets: Option<Vec<GeneSetInfo>>,
    warnings: Vec<Warning>,
}

fn build_weights(data: &DataMatrix, m: &Matrix, method: &Method) -> Result<Weighted, CliError> {
    let ids = data.col_ids();
    let (n, p) = m.shape();
    match method {
        Method::Pca { components } => {
            let q = components.unwrap_or(n.min(p));
            let pca = pca_weights(m, q).context("principal components")?;
            let labels = (1..=pca.weights.len()).map(|h| format!("PC{}", h)).collect();
            Ok(Weighted {
                weights: pca.weights,
                labels,
                eigenvalues: Some(pca.eigenvalues),
                gene_sets: None,
                warnings: pca.warnings,
            })
        }
        Method::ColumnOrder | Method::DiagonalOrder => {
            let order = if *method == Method::ColumnOrder {
                parallel::column_sum_order(m)
            } else {
                scoresphere::model_choice::kropf_diagonal_order_data(m)
            };
            let weights = order.weights(p).context("ordering")?;
            let labels = order.permutation.iter().map(|&i| ids[i].clone()).collect();
            Ok(Weighted { weights, labels, eigenvalues: None, gene_sets: None, warnings: Vec::new() })
        }
        Method::GeneSets(opts) => {
            let build = parallel::build_gene_sets(m, opts).context("gene sets")?;
            let weights = gene_set_weights(&build.sets, m).context("gene-set weights")?;
            let labels = build.sets.iter().map(|s| ids[s.center].clone()).collect();
            let info = build
                .sets
                .iter()
                .enumerate()
                .map(|(h, s)| GeneSetInfo {
                    score: h + 1,
                    center: ids[s.center].clone(),
                    measure: s.measure,
                    size: s.members.len(),
                    members: s.members.iter().map(|&i| ids[i].clone()).collect(),
                })
                .collect();
            Ok(Weighted { weights, labels, eigenvalues: None, gene_sets: Some(info), warnings: build.warnings })
        }
        Method::Regression { response } => {
            let r = ids
                .iter()
                .position(|id| id == response)
                .ok_or_else(|| CliError::Usage(format!("response variable {:?} not found", response)))?;
            if p < 2 {
                return Err(CliError::Usage("regression needs at least one predictor".into()));
            }
            let others: Vec<usize> = (0..p).filter(|&j| j != r).collect();
            let x1 = m.select_columns(&others);
            // the residual as a weight vector: d = e_r − Σ β_j e_j
            let coef = x1.gram().solve_spd(&x1.t_matvec(m.col(r)).context("regression")?).context("regression")?;
            let mut d = vec![0.0; p];
            d[r] = 1.0;
            for (k, &j) in others.iter().enumerate() {
                d[j] = -coef[k];
            }
            let weights = WeightMatrix::new(
                vec![d],
                vec![ScoreOrigin::Regression { response: r }],
                WeightSource::Regression,
                scoresphere::model_choice::fingerprint(m),
            )
            .context("regression weights")?;
            Ok(Weighted {
                weights,
                labels: vec![format!("{} | others", response)],
                eigenvalues: None,
                gene_sets: None,
                warnings: Vec::new(),
            })
        }
    }
}

/// Runs the pipeline on already ingested data.
pub fn analyze(
    ingested: &Ingested,
    design: &Design,
    method: &Method,
    alpha: f64,
    procedure: Procedure,
) -> Result<AnalysisReport, CliError> {
    let data = &ingested.data;
    let x = data.values();
    let m = design.project(x).context("design")?;
    let (n, p) = m.shape();
    let params = scoresphere::score_tests::design_params(design, n).context("design")?;
    let w = build_weights(data, &m, method)?;
    if w.weights.is_empty() {
        return Err(CliError::lib("weights", scoresphere::Error::EmptyInput));
    }
    let scores: Vec<ScoreVector> = match method {
        Method::Regression { response } => {
            let r = data.col_ids().iter().position(|id| id == response).expect("checked");
            let others: Vec<usize> = (0..p).filter(|&j| j != r).collect();
            let z = regression_score(m.col(r), &m.select_columns(&others)).context("regression score")?;
            vec![ScoreVector::new(z, design, ScoreOrigin::Regression { response: r }).context("score")?]
        }
        _ => w.weights.scores(&m, design).context("scores")?,
    };
    let outcome = run_sequential(&scores, design, alpha, procedure).context("sequential tests")?;
    let rows = outcome
        .results
        .iter()
        .enumerate()
        .map(|(h, r)| ResultRow {
            score: h + 1,
            label: w.labels[h].clone(),
            size: w.weights.columns()[h].iter().filter(|&&v| v != 0.0).count(),
            statistic: r.statistic,
            p_value: r.p_value,
            p_short: fmt_p_short(r.p_value),
            significant: r.significant,
        })
        .collect();
    let (proc_name, k) = match procedure {
        Procedure::Simple => ("simple".to_string(), None),
        Procedure::HommelKropf(k) => ("hommel-kropf".to_string(), Some(k)),
    };
    let ids = data.col_ids();
    Ok(AnalysisReport {
        tool: "scoresphere".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        design: design_name(design).into(),
        method: method.name().into(),
        alpha,
        procedure: proc_name,
        k,
        level_used: outcome.level_used,
        n,
        p,
        beta_a: params.a,
        beta_b: params.b,
        weights_fingerprint: format!("{:016x}", w.weights.derived_from()),
        scores_available: w.weights.len(),
        stop_index: outcome.stop_index,
        significant: outcome.significant_indices.iter().map(|h| h + 1).collect(),
        rows,
        eigenvalues: w.eigenvalues,
        gene_sets: w.gene_sets,
        groups: ingested.labels.as_ref().map(|l| l.values.clone()),
        warnings: w.warnings.iter().map(|x| warning_text(x, ids)).collect(),
    })
}

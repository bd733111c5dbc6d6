use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scoresphere::mc::{example2_config, SimConfig, SimReport, WeightRule};
use scoresphere::model_choice::{GeneSetOptions, Procedure};
use scoresphere_cli::analysis::{run_analysis, AnalysisConfig, DesignSpec, Method};
use scoresphere_cli::error::{exit, CliError, Context};
use scoresphere_cli::parallel;
use scoresphere_cli::report::{emit, fmt12, rows_to_csv, to_json};
use scoresphere_cli::scenarios::{design, DesignKindArg};
use scoresphere_cli::verify;

#[derive(Parser, Debug)]
#[command(name = "scoresphere", version, about = "Exact beta tests for data-driven linear scores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test ordered scores of a data file.
    Analyze(AnalyzeArgs),
    /// Rejection rates and null statistic shape under a spherical null.
    SimulateNull(SimulateNullArgs),
    /// The three-variable column-sum ordering simulation.
    SimulateExample2(Example2Args),
    /// Run the invariant checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Pca,
    GeneSets,
    ColumnOrder,
    DiagonalOrder,
    Regression,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProcedureArg {
    Simple,
    HommelKropf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimFormat {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct TestingArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ProcedureArg::Simple)]
    procedure: ProcedureArg,
    /// Non-significances allowed by hommel-kropf (tests run at alpha/k).
    #[arg(long, default_value_t = 1)]
    k: usize,
}

impl TestingArgs {
    fn procedure(&self) -> Result<Procedure, CliError> {
        match self.procedure {
            ProcedureArg::Simple => Ok(Procedure::Simple),
            ProcedureArg::HommelKropf if self.k == 0 => Err(CliError::Usage("--k must be at least 1".into())),
            ProcedureArg::HommelKropf => Ok(Procedure::HommelKropf(self.k)),
        }
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// CSV or TSV: header of variable IDs, first column individual IDs.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = DesignKindArg::OneGroup)]
    design: DesignKindArg,
    /// Two-group label column.
    #[arg(long)]
    labels: Option<String>,
    /// Correlation target column.
    #[arg(long)]
    target: Option<String>,
    /// General design: file holding Q.
    #[arg(long = "q", value_name = "FILE")]
    q_file: Option<PathBuf>,
    /// General design: file holding Q_H.
    #[arg(long = "qh", value_name = "FILE")]
    qh_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Pca)]
    method: MethodArg,
    /// Number of principal components (default: all nonzero).
    #[arg(long)]
    components: Option<usize>,
    /// Regression: the variable to residualize on all others.
    #[arg(long)]
    response: Option<String>,
    /// Gene sets: leave the center's own r = 1 out of the set measure.
    #[arg(long)]
    exclude_center: bool,
    #[command(flatten)]
    testing: TestingArgs,
    /// Accepted for symmetry with the simulation commands; unused here.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateNullArgs {
    #[arg(long, value_enum, default_value_t = DesignKindArg::OneGroup)]
    design: DesignKindArg,
    /// Individuals (one-group, correlation, general).
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    n1: usize,
    #[arg(long, default_value_t = 8)]
    n2: usize,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Pca)]
    method: MethodArg,
    #[arg(long, default_value_t = 1)]
    components: usize,
    /// Leading positions whose individual rejection rates are reported.
    #[arg(long, default_value_t = 1)]
    tracked: usize,
    #[arg(long, default_value_t = 100_000)]
    runs: u64,
    #[command(flatten)]
    testing: TestingArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SimFormat::Json)]
    format: SimFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OrderingArg {
    ColumnSum,
    Diagonal,
}

#[derive(Args, Debug)]
struct Example2Args {
    #[arg(long, default_value_t = 1_000_000)]
    runs: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OrderingArg::ColumnSum)]
    ordering: OrderingArg,
    /// Use mean zero instead of (0, 0, 3).
    #[arg(long)]
    null: bool,
    #[arg(long, value_enum, default_value_t = SimFormat::Json)]
    format: SimFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 20_000)]
    runs: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(serde::Serialize)]
struct SimOutput<'a> {
    scenario: &'a str,
    threads: usize,
    wall_seconds: f64,
    #[serde(flatten)]
    report: &'a SimReport,
}

fn sim_text(scenario: &str, r: &SimReport, wall: f64) -> String {
    let mut s = format!(
        "scenario  {}\nrng       {} (seed {})\nruns      {}\nalpha     {}\nbeta      ({}, {})\n",
        scenario, r.rng, r.seed, r.runs, r.alpha, r.params.a, r.params.b
    );
    s.push_str("position  marginal          ±3σ               sequential\n");
    for (h, f) in r.frequencies.iter().enumerate() {
        s.push_str(&format!(
            "{:<9} {:<17} {:<17} {}\n",
            h + 1,
            fmt12(*f),
            fmt12(r.half_widths[h]),
            fmt12(r.sequential_frequencies[h])
        ));
    }
    s.push_str(&format!("any significant  {} ± {}\n", fmt12(r.any_significant), fmt12(r.any_half_width)));
    if let Some(ks) = &r.ks {
        s.push_str(&format!("KS        D = {}, p = {}\n", fmt12(ks.statistic), fmt12(ks.p_value)));
    }
    for q in &r.quantiles {
        s.push_str(&format!("q{:<8} empirical {} theoretical {}\n", q.prob, fmt12(q.empirical), fmt12(q.theoretical)));
    }
    s.push_str(&format!("wall time {:.2}s\n", wall));
    s
}

fn run_sim(scenario: &str, cfg: &SimConfig, format: SimFormat, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let start = Instant::now();
    let report = parallel::simulate(cfg).context("simulation")?;
    let wall = start.elapsed().as_secs_f64();
    let text = match format {
        SimFormat::Json => to_json(&SimOutput { scenario, threads: parallel::threads(), wall_seconds: wall, report: &report })?,
        SimFormat::Text => sim_text(scenario, &report, wall),
    };
    emit(&text, out)
}

fn weight_rule(method: MethodArg, components: usize) -> Result<WeightRule, CliError> {
    Ok(match method {
        MethodArg::Pca => WeightRule::Pca { components },
        MethodArg::GeneSets => WeightRule::GeneSets(GeneSetOptions::default()),
        MethodArg::ColumnOrder => WeightRule::ColumnSum,
        MethodArg::DiagonalOrder => WeightRule::KropfDiagonal,
        MethodArg::Regression => return Err(CliError::Usage("regression is not a simulation weight rule".into())),
    })
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let need = |v: Option<String>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("this design needs {}", flag)));
    let design = match a.design {
        DesignKindArg::OneGroup => DesignSpec::OneGroup,
        DesignKindArg::TwoGroup => DesignSpec::TwoGroup { labels: need(a.labels, "--labels <column>")? },
        DesignKindArg::Correlation => DesignSpec::Correlation { target: need(a.target, "--target <column>")? },
        DesignKindArg::General => match (a.q_file, a.qh_file) {
            (Some(q), Some(q_h)) => DesignSpec::General { q, q_h },
            _ => return Err(CliError::Usage("the general design needs --q and --qh".into())),
        },
    };
    let method = match a.method {
        MethodArg::Pca => Method::Pca { components: a.components },
        MethodArg::GeneSets => Method::GeneSets(GeneSetOptions {
            include_center_in_measure: !a.exclude_center,
            ..GeneSetOptions::default()
        }),
        MethodArg::ColumnOrder => Method::ColumnOrder,
        MethodArg::DiagonalOrder => Method::DiagonalOrder,
        MethodArg::Regression => Method::Regression { response: need(a.response, "--response <column>")? },
    };
    let cfg = AnalysisConfig {
        input: a.input,
        design,
        method,
        alpha: a.testing.alpha,
        procedure: a.testing.procedure()?,
    };
    let report = run_analysis(&cfg)?;
    let text = match a.format {
        Format::Json => to_json(&report)?,
        Format::Csv => rows_to_csv(&report.rows)?,
    };
    emit(&text, a.out.as_deref())
}

fn simulate_null(a: SimulateNullArgs) -> Result<(), CliError> {
    let (d, n) = design(a.design, a.n, a.n1, a.n2).context("design")?;
    let mut cfg = SimConfig::null(n, a.p, d, a.runs, a.testing.alpha, a.seed);
    cfg.rule = weight_rule(a.method, a.components)?;
    cfg.procedure = a.testing.procedure()?;
    cfg.tracked = a.tracked.max(1);
    let scenario = format!("null/{:?}", a.design).to_lowercase();
    run_sim(&scenario, &cfg, a.format, a.out.as_deref())
}

fn simulate_example2(a: Example2Args) -> Result<(), CliError> {
    if a.runs < scoresphere::mc::EXAMPLE2_MIN_RUNS {
        return Err(CliError::Usage(format!("--runs must be at least {}", scoresphere::mc::EXAMPLE2_MIN_RUNS)));
    }
    let mut cfg = example2_config(a.runs, a.seed);
    if a.ordering == OrderingArg::Diagonal {
        cfg.rule = WeightRule::KropfDiagonal;
    }
    if a.null {
        cfg.mean = vec![0.0; 3];
    }
    run_sim("example2", &cfg, a.format, a.out.as_deref())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    parallel::configure_threads();
    match cli.command {
        Command::Analyze(a) => analyze(a).map(|_| exit::OK),
        Command::SimulateNull(a) => simulate_null(a).map(|_| exit::OK),
        Command::SimulateExample2(a) => simulate_example2(a).map(|_| exit::OK),
        Command::Verify(a) => {
            let checks = verify::run_all(a.runs, a.seed).context("verify")?;
            for c in &checks {
                println!("{}", c.line());
            }
            Ok(if checks.iter().all(|c| c.passed) { exit::OK } else { exit::OTHER })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Rayon-backed versions of the embarrassingly parallel pieces.
//!
//! Work is split into fixed chunks and merged in order, so results do not
//! depend on the number of threads. `SCORESPHERE_THREADS` sets the thread
//! count.

use rayon::prelude::*;

use scoresphere::mc::{prepare, simulate_runs, PreparedSim, SimConfig, SimReport, SimTally};
use scoresphere::model_choice::{
    candidate_set, column_abs_sum, column_sums_of_squares, finish_build, ordering_from_keys, GeneSetBuild,
    GeneSetOptions, OrderingRule, VariableOrdering,
};
use scoresphere::{Error, Matrix, Result};

pub const THREADS_ENV: &str = "SCORESPHERE_THREADS";

/// Runs per work item in simulations.
pub const CHUNK: u64 = 2_000;

/// Applies `SCORESPHERE_THREADS` to rayon's global pool. Call once, early.
pub fn configure_threads() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok()?;
    Some(n)
}

pub fn threads() -> usize {
    rayon::current_num_threads()
}

/// All runs of a prepared simulation, chunked and merged in run order.
pub fn simulate_tally(sim: &PreparedSim) -> Result<SimTally> {
    let runs = sim.config.runs;
    let chunks: Vec<u64> = (0..runs.div_ceil(CHUNK)).collect();
    let tallies: Vec<SimTally> = chunks
        .par_iter()
        .map(|&c| simulate_runs(sim, c * CHUNK..((c + 1) * CHUNK).min(runs)))
        .collect::<Result<_>>()?;
    let mut it = tallies.into_iter();
    let first = it.next().ok_or(Error::EmptyInput)?;
    it.try_fold(first, SimTally::merge)
}

pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    let sim = prepare(cfg)?;
    simulate_tally(&sim)?.report(&sim)
}

/// Gene sets with candidates computed in parallel over centers.
pub fn build_gene_sets(m: &Matrix, opts: &GeneSetOptions) -> Result<GeneSetBuild> {
    if m.ncols() == 0 {
        return Err(Error::EmptyInput);
    }
    if opts.cap == 0 {
        return Err(Error::Config("gene-set cap must be at least 1".into()));
    }
    let ss = column_sums_of_squares(m);
    let candidates = (0..m.ncols()).into_par_iter().filter_map(|c| candidate_set(m, &ss, c, opts)).collect();
    Ok(finish_build(candidates, &ss))
}

/// Column-sum ordering of `M'M` with the keys computed in parallel.
pub fn column_sum_order(m: &Matrix) -> VariableOrdering {
    let keys = (0..m.ncols()).into_par_iter().map(|i| column_abs_sum(m, i)).collect();
    ordering_from_keys(keys, OrderingRule::ColumnAbsSum, scoresphere::model_choice::fingerprint(m))
}

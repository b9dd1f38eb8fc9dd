//! Scoped-thread runners. Results are identical to the serial core
//! functions for any thread count.

use std::num::NonZeroUsize;
use std::thread;

use povm_forge_core::povm::Povm;
use povm_forge_core::simulate::{self, BlockTally, SimulationConfig, SimulationResult};
use povm_forge_core::solver::{self, RestartOutcome, ScanRow, SolverConfig, SolverResult};
use povm_forge_core::verification::{Formulation, ResidualReport, VerificationReport};
use povm_forge_core::{Error, Result};

pub const THREADS_VAR: &str = "POVM_FORGE_THREADS";

/// Worker count: `POVM_FORGE_THREADS` if set to a positive integer,
/// otherwise the available parallelism.
pub fn thread_count() -> usize {
    let available = thread::available_parallelism().map_or(1, NonZeroUsize::get);
    match std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n,
        _ => available,
    }
}

/// Applies `f` to every item on up to `threads` workers, keeping input order.
fn map_scoped<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Evaluates the formulations concurrently.
pub fn verify(povm: &Povm, tol: f64, threads: usize) -> VerificationReport {
    let reports: Vec<ResidualReport> = map_scoped(&Formulation::ALL, threads, |f| f.evaluate(povm));
    VerificationReport::assemble(povm, tol, reports)
}

/// Runs restarts in batches of `threads`, stopping after the first batch
/// that converges. Restarts past the first converged one are discarded so
/// the result matches [`solver::solve`].
pub fn solve(config: &SolverConfig, threads: usize) -> Result<SolverResult> {
    config.validate()?;
    let threads = threads.max(1);
    let mut outcomes: Vec<RestartOutcome> = Vec::new();
    let mut start = 0;
    while start < config.restarts {
        let end = (start + threads).min(config.restarts);
        let indices: Vec<usize> = (start..end).collect();
        let batch = map_scoped(&indices, threads, |&i| solver::solve_restart(config, i));
        for outcome in batch {
            outcomes.push(outcome?);
        }
        if let Some(first) = outcomes.iter().position(|o| o.converged) {
            outcomes.truncate(first + 1);
            break;
        }
        start = end;
    }
    solver::reduce(config, outcomes)
}

pub fn feasibility_scan(
    copies: usize,
    from: usize,
    to: usize,
    template: &SolverConfig,
    threads: usize,
) -> Result<Vec<ScanRow>> {
    if from > to {
        return Err(Error::InvalidConfig("empty outcome range"));
    }
    (from..=to)
        .filter(|n| !template.antipodal || n % 2 == 0)
        .map(|n| {
            let config = SolverConfig {
                copies,
                outcomes: n,
                ..template.clone()
            };
            solve(&config, threads).map(|r| ScanRow::from_result(copies, n, &r))
        })
        .collect()
}

pub fn simulate(config: &SimulationConfig, threads: usize) -> Result<SimulationResult> {
    config.validate()?;
    let blocks: Vec<u64> = (0..config.block_count()).collect();
    let tallies = map_scoped(&blocks, threads, |&b| simulate::run_block(config, b))
        .into_iter()
        .collect::<Result<Vec<BlockTally>>>()?;
    simulate::merge(config, tallies)
}

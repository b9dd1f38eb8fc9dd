//! Multistart Levenberg–Marquardt search for weighted spherical designs
//! with a prescribed number of outcomes.
//!
//! Restart `i` draws its initial point from `ChaCha8Rng` seeded with the
//! configured seed on stream `i`, so every restart is reproducible on its
//! own and restarts can run in any order or concurrently. The reported
//! result is the lowest-index converged restart, or failing that the restart
//! with the smallest residual (ties broken by index). A residual floor is
//! declared when that restart stalled above [`RESIDUAL_FLOOR`]; if it ran
//! out of iterations instead the status is `IterationLimit`.

mod encoding;

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::certified_min_outcomes;
use crate::geometry::Direction;
use crate::math::norm;
use crate::povm::{Outcome, Povm};
use crate::verification::{tensor_residuals, verify};
use crate::{Error, Result};

pub use encoding::Encoding;

/// Best residuals above this after the whole restart budget are reported
/// as a residual floor.
pub const RESIDUAL_FLOOR: f64 = 1e-4;
/// Weights below this are treated as absent outcomes and repaired.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-14;
const POLISH_ITERATIONS: usize = 8;
const STAGNATION_WINDOW: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub copies: usize,
    pub outcomes: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    /// Convergence threshold on the Euclidean norm of the moment residuals.
    pub tolerance: f64,
    pub antipodal: bool,
}

impl SolverConfig {
    pub fn new(copies: usize, outcomes: usize) -> Self {
        SolverConfig {
            copies,
            outcomes,
            seed: 0,
            restarts: 64,
            max_iterations: 500,
            tolerance: 1e-10,
            antipodal: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.copies == 0 {
            return Err(Error::InvalidConfig("copies must be at least 1"));
        }
        if self.outcomes < 2 {
            return Err(Error::InvalidConfig("outcomes must be at least 2"));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        if self.antipodal && self.outcomes % 2 == 1 {
            return Err(Error::InvalidConfig("antipodal mode needs an even number of outcomes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    ResidualFloor,
    IterationLimit,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Converged => "converged",
            SolverStatus::ResidualFloor => "residual_floor",
            SolverStatus::IterationLimit => "iteration_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    Stagnation,
    DampingLimit,
    IterationLimit,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::Stagnation => "stagnation",
            StopReason::DampingLimit => "damping_limit",
            StopReason::IterationLimit => "iteration_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub restart_index: usize,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub stop: StopReason,
    /// Negligible-weight outcomes replaced by splitting the heaviest one.
    pub repaired_outcomes: usize,
    pub povm: Povm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub status: SolverStatus,
    pub povm: Povm,
    pub final_residual: f64,
    pub restart_index: usize,
    pub iterations: usize,
    pub seed: u64,
    pub restarts_run: usize,
    pub diagnostics: Vec<RestartOutcome>,
}

fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn initial_point(enc: &Encoding, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = enc.independent();
    let mut params = alloc::vec![0.0; enc.parameter_len()];
    let weight = libm::sqrt((enc.copies() + 1) as f64 / enc.outcomes() as f64);
    for p in params.iter_mut().take(m) {
        *p = weight;
    }
    for k in 1..m {
        let d = Direction::random(rng).cartesian;
        let v = if k == 1 {
            [libm::sqrt(d[0] * d[0] + d[1] * d[1]), 0.0, d[2]]
        } else {
            d
        };
        enc.set_raw_vector(&mut params, k, v);
    }
    params
}

/// Rescales direction vectors to unit length (the decoded POVM is
/// unchanged) and re-draws any that have collapsed.
fn renormalize(enc: &Encoding, params: &mut [f64], rng: &mut ChaCha8Rng) {
    for k in 1..enc.independent() {
        let v = enc.raw_vector(params, k);
        let len = norm(&v);
        let v = if len < 1e-8 || !len.is_finite() {
            let d = Direction::random(rng).cartesian;
            if k == 1 {
                [libm::sqrt(d[0] * d[0] + d[1] * d[1]), 0.0, d[2]]
            } else {
                d
            }
        } else {
            [v[0] / len, v[1] / len, v[2] / len]
        };
        enc.set_raw_vector(params, k, v);
    }
}

/// Damped Gauss–Newton with Marquardt diagonal scaling. Returns the final
/// parameters, the number of Jacobian evaluations and the stop reason.
pub(crate) fn levenberg_marquardt(
    enc: &Encoding,
    mut params: Vec<f64>,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, usize, StopReason) {
    let mut lambda = 1e-3;
    let mut r = enc.residuals(&params);
    let mut cost = r.norm_squared();
    let mut checkpoint = cost;
    let mut polish = 0;
    let deep = config.tolerance * 1e-4;
    for iteration in 0..config.max_iterations {
        let res = libm::sqrt(cost);
        if res < deep || (res < config.tolerance && polish >= POLISH_ITERATIONS) {
            return (params, iteration, StopReason::Tolerance);
        }
        if res < config.tolerance {
            polish += 1;
        }
        if iteration > 0 && iteration % STAGNATION_WINDOW == 0 {
            if res >= config.tolerance && cost > checkpoint * (1.0 - 1e-4) {
                return (params, iteration, StopReason::Stagnation);
            }
            checkpoint = cost;
        }
        let jac = enc.jacobian(&params);
        let normal = jac.transpose() * &jac;
        let gradient = jac.transpose() * &r;
        let floor = normal.diagonal().max() * 1e-12 + 1e-300;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped: DMatrix<f64> = normal.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * (normal[(i, i)] + floor);
            }
            if let Some(chol) = damped.cholesky() {
                let step = chol.solve(&gradient);
                let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p - s).collect();
                let trial_r = enc.residuals(&trial);
                let trial_cost = trial_r.norm_squared();
                if trial_cost.is_finite() && trial_cost < cost {
                    params = trial;
                    renormalize(enc, &mut params, rng);
                    r = enc.residuals(&params);
                    cost = r.norm_squared();
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !accepted {
            let stop = if libm::sqrt(cost) < config.tolerance {
                StopReason::Tolerance
            } else {
                StopReason::DampingLimit
            };
            return (params, iteration + 1, stop);
        }
    }
    (params, config.max_iterations, StopReason::IterationLimit)
}

/// Replaces outcomes of negligible weight by halves of the heaviest
/// outcome, keeping the outcome count and all moments.
fn repair(povm: &Povm, antipodal: bool) -> (Povm, usize) {
    let step = if antipodal { 2 } else { 1 };
    let mut outcomes: Vec<Outcome> = povm.outcomes.clone();
    let mut repaired = 0;
    while let Some(small) = (0..outcomes.len())
        .step_by(step)
        .find(|&i| !(outcomes[i].weight >= NEGLIGIBLE_WEIGHT))
    {
        let heavy = (0..outcomes.len())
            .step_by(step)
            .max_by(|&a, &b| outcomes[a].weight.total_cmp(&outcomes[b].weight))
            .unwrap_or(0);
        if outcomes[heavy].weight < 2.0 * NEGLIGIBLE_WEIGHT {
            break;
        }
        for j in 0..step {
            let half = outcomes[heavy + j].weight / 2.0;
            outcomes[heavy + j].weight = half;
            outcomes[small + j] = Outcome::new(half, outcomes[heavy + j].direction);
        }
        repaired += 1;
    }
    (Povm::new(povm.copies, outcomes), repaired)
}

/// Runs restart `index` of `config` in isolation.
pub fn solve_restart(config: &SolverConfig, index: usize) -> Result<RestartOutcome> {
    config.validate()?;
    let enc = Encoding::new(config.copies, config.outcomes, config.antipodal);
    let mut rng = restart_rng(config.seed, index);
    let start = initial_point(&enc, &mut rng);
    let (params, iterations, stop) = levenberg_marquardt(&enc, start, config, &mut rng);
    let decoded = enc.decode(&params).ok_or(Error::ZeroVector)?;
    let (povm, repaired_outcomes) = repair(&decoded, config.antipodal);
    let final_residual = residual_norm(&povm);
    let converged = final_residual < config.tolerance && verify(&povm, 10.0 * config.tolerance).pass;
    Ok(RestartOutcome {
        restart_index: index,
        iterations,
        final_residual,
        converged,
        stop,
        repaired_outcomes,
        povm,
    })
}

/// Euclidean norm of the full moment residual vector (all orders `q ≤ N`).
pub fn residual_norm(povm: &Povm) -> f64 {
    libm::sqrt(tensor_residuals(povm).residuals.iter().map(|r| r * r).sum::<f64>())
}

fn better(a: &RestartOutcome, b: &RestartOutcome) -> bool {
    match (a.converged, b.converged) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.restart_index < b.restart_index,
        (false, false) => a
            .final_residual
            .total_cmp(&b.final_residual)
            .then(a.restart_index.cmp(&b.restart_index))
            .is_lt(),
    }
}

/// Reduces restart outcomes to a result. The choice does not depend on the
/// order of `outcomes`.
pub fn reduce(config: &SolverConfig, mut outcomes: Vec<RestartOutcome>) -> Result<SolverResult> {
    outcomes.sort_by_key(|o| o.restart_index);
    let best = outcomes
        .iter()
        .fold(None::<&RestartOutcome>, |acc, o| match acc {
            Some(b) if !better(o, b) => Some(b),
            _ => Some(o),
        })
        .ok_or(Error::InvalidConfig("no restarts were run"))?
        .clone();
    let status = if best.converged {
        SolverStatus::Converged
    } else if !(best.final_residual <= RESIDUAL_FLOOR) && best.stop != StopReason::IterationLimit {
        SolverStatus::ResidualFloor
    } else {
        SolverStatus::IterationLimit
    };
    Ok(SolverResult {
        status,
        povm: best.povm,
        final_residual: best.final_residual,
        restart_index: best.restart_index,
        iterations: best.iterations,
        seed: config.seed,
        restarts_run: outcomes.len(),
        diagnostics: outcomes,
    })
}

/// Runs restarts in index order and stops at the first converged one.
pub fn solve(config: &SolverConfig) -> Result<SolverResult> {
    config.validate()?;
    let mut outcomes = Vec::new();
    for index in 0..config.restarts {
        let outcome = solve_restart(config, index)?;
        let done = outcome.converged;
        outcomes.push(outcome);
        if done {
            break;
        }
    }
    reduce(config, outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub outcomes: usize,
    pub status: SolverStatus,
    pub best_residual: f64,
    pub converged: bool,
    pub restart_index: usize,
    /// `n` lies below the certified lower bound, so no POVM exists.
    pub certified_infeasible: bool,
    /// Not converged and not covered by a certificate: numerical evidence
    /// of infeasibility only.
    pub evidence_only: bool,
}

impl ScanRow {
    pub fn from_result(copies: usize, outcomes: usize, result: &SolverResult) -> Self {
        let converged = result.status == SolverStatus::Converged;
        let certified_infeasible = outcomes < certified_min_outcomes(copies);
        ScanRow {
            outcomes,
            status: result.status,
            best_residual: result.final_residual,
            converged,
            restart_index: result.restart_index,
            certified_infeasible,
            evidence_only: !converged && !certified_infeasible,
        }
    }
}

/// Solves for every `n` in `from..=to` with the template's remaining
/// settings.
pub fn feasibility_scan(copies: usize, from: usize, to: usize, template: &SolverConfig) -> Result<Vec<ScanRow>> {
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
            solve(&config).map(|r| ScanRow::from_result(copies, n, &r))
        })
        .collect()
}

/// Smallest converged `n` of a scan.
pub fn empirical_minimum(rows: &[ScanRow]) -> Option<usize> {
    rows.iter().filter(|r| r.converged).map(|r| r.outcomes).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{catalog_get, equivalent_up_to_rotation};

    fn config(copies: usize, outcomes: usize, restarts: usize) -> SolverConfig {
        SolverConfig {
            restarts,
            seed: 1,
            ..SolverConfig::new(copies, outcomes)
        }
    }

    #[test]
    fn recovers_tetrahedron() {
        let r = solve(&config(2, 4, 32)).unwrap();
        assert_eq!(r.status, SolverStatus::Converged);
        assert!(r.final_residual < 1e-10);
        assert!(verify(&r.povm, 1e-10).pass);
        let eq = equivalent_up_to_rotation(&r.povm, &catalog_get(2).unwrap().povm, 1e-6);
        assert!(eq.equivalent, "{eq:?}");
    }

    #[test]
    fn recovers_octahedron() {
        let r = solve(&config(3, 6, 32)).unwrap();
        assert_eq!(r.status, SolverStatus::Converged);
        assert!(equivalent_up_to_rotation(&r.povm, &catalog_get(3).unwrap().povm, 1e-6).equivalent);
    }

    #[test]
    fn antipodal_mode_pairs_outcomes() {
        let c = SolverConfig {
            antipodal: true,
            ..config(3, 6, 32)
        };
        let r = solve(&c).unwrap();
        assert_eq!(r.status, SolverStatus::Converged);
        for k in 0..3 {
            let a = &r.povm.outcomes[2 * k];
            let b = &r.povm.outcomes[2 * k + 1];
            assert_eq!(a.weight, b.weight);
            for i in 0..3 {
                assert_eq!(a.direction.cartesian[i], -b.direction.cartesian[i]);
            }
        }
        assert!(solve(&SolverConfig { outcomes: 7, ..c }).is_err());
    }

    #[test]
    fn too_few_outcomes_hit_the_floor() {
        let r = solve(&config(2, 3, 64)).unwrap();
        assert_eq!(r.status, SolverStatus::ResidualFloor);
        assert!(r.final_residual > 1e-3);
        assert_eq!(r.restarts_run, 64);
    }

    #[test]
    fn deterministic_and_order_independent() {
        let c = config(2, 3, 8);
        let a = solve(&c).unwrap();
        let b = solve(&c).unwrap();
        assert_eq!(a, b);
        let mut parts: Vec<RestartOutcome> = (0..8).rev().map(|i| solve_restart(&c, i).unwrap()).collect();
        parts.swap(1, 5);
        assert_eq!(reduce(&c, parts).unwrap(), a);
    }

    #[test]
    fn over_parametrized_n2() {
        let rows = feasibility_scan(2, 3, 6, &config(2, 0, 32)).unwrap();
        assert!(!rows[0].converged && rows[0].certified_infeasible && !rows[0].evidence_only);
        assert!(rows[1..].iter().all(|r| r.converged));
        assert_eq!(empirical_minimum(&rows), Some(4));
    }

    #[test]
    fn repair_splits_heaviest() {
        let mut p = catalog_get(2).unwrap().povm;
        p.outcomes.push(Outcome::new(0.0, Direction::NORTH));
        let (fixed, count) = repair(&p, false);
        assert_eq!(count, 1);
        assert_eq!(fixed.len(), 5);
        assert!(verify(&fixed, 1e-10).pass);
    }

    #[test]
    fn exhausted_budget_is_not_a_floor() {
        let c = SolverConfig {
            max_iterations: 2,
            ..config(4, 10, 1)
        };
        let r = solve(&c).unwrap();
        assert_eq!(r.status, SolverStatus::IterationLimit);
        assert!(r.final_residual > RESIDUAL_FLOOR);
    }

    #[test]
    fn invalid_configs() {
        assert!(solve(&config(2, 1, 1)).is_err());
        assert!(solve(&config(0, 4, 1)).is_err());
        assert!(solve(&config(2, 4, 0)).is_err());
        assert!(feasibility_scan(2, 5, 4, &config(2, 0, 1)).is_err());
    }
}

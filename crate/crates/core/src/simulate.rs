//! Monte Carlo estimate of the mean fidelity.
//!
//! Each trial draws an isotropic pure state `n̂`, samples an outcome `r`
//! with probability `c²_r ((1 + n̂·n̂_r)/2)^N` and scores the guess `n̂_r`
//! with fidelity `(1 + n̂·n̂_r)/2`.
//!
//! Trials are grouped in fixed blocks of [`BLOCK_TRIALS`]; block `b` draws
//! from `ChaCha8Rng` seeded with the configured seed on stream `b`. Blocks
//! are independent, and [`merge`] combines them in block order, so the
//! result does not depend on how blocks are distributed over workers.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Direction;
use crate::math::{powi, sqrt, CompensatedSum};
use crate::povm::{validate, Povm};
use crate::{Error, Result};

pub const BLOCK_TRIALS: u64 = 1 << 16;
/// Allowed deviation of `Σ p_r` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub povm: Povm,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub mean: f64,
    pub standard_error: f64,
    pub counts: Vec<u64>,
    /// `counts / trials`.
    pub frequencies: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Partial tally of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTally {
    pub block: u64,
    pub trials: u64,
    pub sum: f64,
    pub sum_squares: f64,
    pub counts: Vec<u64>,
}

/// Born-rule outcome probabilities for the coherent state along `probe`.
/// Fails with [`Error::NotNormalized`] unless the POVM resolves the
/// identity at `probe`.
pub fn outcome_distribution(povm: &Povm, probe: &Direction) -> Result<Vec<f64>> {
    if povm.is_empty() {
        return Err(Error::EmptyPovm);
    }
    let n = povm.copies as u32;
    let p: Vec<f64> = povm
        .outcomes
        .iter()
        .map(|o| o.weight * powi(0.5 * (1.0 + probe.dot(&o.direction)), n))
        .collect();
    let mut total = CompensatedSum::default();
    p.iter().for_each(|&x| total.add(x));
    let sum = total.value();
    if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(p)
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1"));
        }
        if self.povm.is_empty() {
            return Err(Error::EmptyPovm);
        }
        if !validate(&self.povm).is_empty() {
            return Err(Error::InvalidConfig("POVM fails data-model validation"));
        }
        Ok(())
    }

    pub fn block_count(&self) -> u64 {
        self.trials.div_ceil(BLOCK_TRIALS)
    }

    fn block_len(&self, block: u64) -> u64 {
        (self.trials - block * BLOCK_TRIALS).min(BLOCK_TRIALS)
    }
}

/// Runs block `block` of the configuration.
pub fn run_block(config: &SimulationConfig, block: u64) -> Result<BlockTally> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(block);
    let povm = &config.povm;
    let trials = config.block_len(block);
    let mut sum = CompensatedSum::default();
    let mut sum_squares = CompensatedSum::default();
    let mut counts = alloc::vec![0u64; povm.len()];
    for _ in 0..trials {
        let probe = Direction::random(&mut rng);
        let p = outcome_distribution(povm, &probe)?;
        let total: f64 = p.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut pick = p.len() - 1;
        for (r, &x) in p.iter().enumerate() {
            if u < x {
                pick = r;
                break;
            }
            u -= x;
        }
        counts[pick] += 1;
        let f = 0.5 * (1.0 + probe.dot(&povm.outcomes[pick].direction));
        sum.add(f);
        sum_squares.add(f * f);
    }
    Ok(BlockTally {
        block,
        trials,
        sum: sum.value(),
        sum_squares: sum_squares.value(),
        counts,
    })
}

/// Combines block tallies (in block order, whatever order they arrive in).
pub fn merge(config: &SimulationConfig, mut blocks: Vec<BlockTally>) -> Result<SimulationResult> {
    blocks.sort_by_key(|b| b.block);
    let trials: u64 = blocks.iter().map(|b| b.trials).sum();
    if trials != config.trials {
        return Err(Error::InvalidConfig("block tallies do not cover the configured trials"));
    }
    let mut sum = CompensatedSum::default();
    let mut sum_squares = CompensatedSum::default();
    let mut counts = alloc::vec![0u64; config.povm.len()];
    for b in &blocks {
        sum.add(b.sum);
        sum_squares.add(b.sum_squares);
        for (c, x) in counts.iter_mut().zip(&b.counts) {
            *c += x;
        }
    }
    let t = trials as f64;
    let mean = sum.value() / t;
    let standard_error = if trials > 1 {
        let variance = ((sum_squares.value() - t * mean * mean) / (t - 1.0)).max(0.0);
        sqrt(variance / t)
    } else {
        0.0
    };
    let frequencies = counts.iter().map(|&c| c as f64 / t).collect();
    Ok(SimulationResult {
        mean,
        standard_error,
        counts,
        frequencies,
        trials,
        seed: config.seed,
    })
}

/// Runs every block sequentially.
pub fn run(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let blocks = (0..config.block_count())
        .map(|b| run_block(config, b))
        .collect::<Result<Vec<_>>>()?;
    merge(config, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{catalog_get, Outcome};

    fn config(copies: usize, trials: u64, seed: u64) -> SimulationConfig {
        SimulationConfig {
            povm: catalog_get(copies).unwrap().povm,
            trials,
            seed,
        }
    }

    #[test]
    fn tetrahedron_distribution() {
        let p = catalog_get(2).unwrap().povm;
        let d = outcome_distribution(&p, &p.outcomes[0].direction).unwrap();
        assert!((d[0] - 0.75).abs() < 1e-15);
        for x in &d[1..] {
            assert!((x - 1.0 / 12.0).abs() < 1e-15);
        }
    }

    #[test]
    fn octahedron_distribution() {
        let p = catalog_get(3).unwrap().povm;
        let d = outcome_distribution(&p, &Direction::NORTH).unwrap();
        assert!((d[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(d[1].abs() < 1e-15);
        for x in &d[2..] {
            assert!((x - 1.0 / 12.0).abs() < 1e-15);
        }
    }

    #[test]
    fn catalog_distributions_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=7 {
            let p = catalog_get(n).unwrap().povm;
            for _ in 0..100 {
                let d = outcome_distribution(&p, &Direction::random(&mut rng)).unwrap();
                assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_optimal_povm_is_rejected() {
        let p = Povm::new(2, alloc::vec![Outcome::new(1.0, Direction::NORTH); 3]);
        assert!(matches!(
            outcome_distribution(&p, &Direction::NORTH.antipode()),
            Err(Error::NotNormalized { .. })
        ));
        let c = SimulationConfig { povm: p, trials: 10, seed: 0 };
        assert!(run(&c).is_err());
    }

    #[test]
    fn single_trial() {
        let r = run(&config(2, 1, 9)).unwrap();
        assert_eq!(r.standard_error, 0.0);
        assert_eq!(r.counts.iter().sum::<u64>(), 1);
        let pick = r.counts.iter().position(|&c| c == 1).unwrap();
        // replay the block by hand
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        rng.set_stream(0);
        let probe = Direction::random(&mut rng);
        let p = catalog_get(2).unwrap().povm;
        assert_eq!(r.mean, 0.5 * (1.0 + probe.dot(&p.outcomes[pick].direction)));
        assert!(run(&config(2, 0, 9)).is_err());
    }

    #[test]
    fn tetrahedron_mean_fidelity() {
        let r = run(&config(2, 1_000_000, 42)).unwrap();
        assert!((r.mean - 0.75).abs() < 5.0 * r.standard_error);
        assert!((r.mean - 0.75).abs() < 0.002);
        assert!((r.frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // each outcome is hit with probability c²/(N+1)
        for (f, o) in r.frequencies.iter().zip(&r.povm_weights()) {
            let expect = o / 3.0;
            let se = sqrt(expect * (1.0 - expect) / r.trials as f64);
            assert!((f - expect).abs() < 5.0 * se);
        }
    }

    impl SimulationResult {
        fn povm_weights(&self) -> Vec<f64> {
            catalog_get(2).unwrap().povm.outcomes.iter().map(|o| o.weight).collect()
        }
    }

    #[test]
    fn icosahedron_mean_fidelity() {
        let r = run(&config(5, 1_000_000, 7)).unwrap();
        assert!((r.mean - 6.0 / 7.0).abs() < 0.002);
        assert!((r.mean - 6.0 / 7.0).abs() < 5.0 * r.standard_error);
    }

    #[test]
    fn blocks_merge_in_any_order() {
        let c = config(3, 3 * BLOCK_TRIALS + 17, 5);
        let whole = run(&c).unwrap();
        let mut blocks: Vec<BlockTally> = (0..c.block_count()).rev().map(|b| run_block(&c, b).unwrap()).collect();
        blocks.swap(0, 2);
        assert_eq!(merge(&c, blocks).unwrap(), whole);
        assert!(merge(&c, alloc::vec![run_block(&c, 0).unwrap()]).is_err());
    }

    #[test]
    fn error_shrinks_like_inverse_root() {
        let rms = |trials: u64| {
            let s: f64 = (0..20)
                .map(|seed| {
                    let e = run(&config(2, trials, 100 + seed)).unwrap().mean - 0.75;
                    e * e
                })
                .sum();
            sqrt(s / 20.0)
        };
        let (a, b, c) = (rms(2_000), rms(8_000), rms(32_000));
        assert!(a > b && b > c, "{a} {b} {c}");
        assert!(a / c > 2.5, "{a} {c}");
    }
}

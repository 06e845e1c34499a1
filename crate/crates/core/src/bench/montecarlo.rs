//! Repeated online scheduling against independent stochastic oracles.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::icm::{CostModel, IcmCircuit};
use crate::reliability::ReliabilityParams;
use crate::schedulers::{run, Algorithm, HeraldOracle, ScheduleError, SchedulerLimits, TraceSummary};

/// Seed of run `index`; a pure function of the pair.
pub fn run_seed(base_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub mean: f64,
    pub variance: f64,
    pub min: u64,
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

impl Distribution {
    fn of(mut values: Vec<u64>) -> Self {
        values.sort_unstable();
        let n = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
        let variance = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        // Nearest rank.
        let rank = |q: f64| values[((q * n).ceil() as usize).clamp(1, values.len()) - 1];
        Distribution {
            mean,
            variance,
            min: values[0],
            p50: rank(0.5),
            p90: rank(0.9),
            p99: rank(0.99),
            max: values[values.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub algorithm: Algorithm,
    pub runs: u64,
    pub base_seed: u64,
    pub p_f: f64,
    pub t: Distribution,
    pub s: Distribution,
    pub bb: Distribution,
    /// Batches or sequences started, over all runs.
    pub batches: u64,
    /// Batches or sequences in which every trial failed.
    pub exhausted: u64,
    pub exhaustion_frequency: f64,
    pub trials: u64,
    pub initialisations: u64,
    pub mean_trials_per_init: f64,
    pub pool_hits: u64,
}

pub fn monte_carlo(
    c: &IcmCircuit,
    cm: &CostModel,
    rel: &ReliabilityParams,
    algorithm: Algorithm,
    runs: u64,
    base_seed: u64,
) -> Result<MonteCarloStats, ScheduleError> {
    let runs = runs.max(1);
    let per_run: Vec<(u64, u64, u64, TraceSummary)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let oracle = HeraldOracle::stochastic(run_seed(base_seed, i), rel.p_f());
            let out = run(algorithm, c, cm, rel, &oracle, SchedulerLimits::default())?;
            Ok((out.metrics.t, out.metrics.s, out.metrics.bb, out.trace.summary()))
        })
        .collect::<Result<_, ScheduleError>>()?;

    let stats = c.stats();
    let initialisations = u64::from(stats.inject_a + stats.inject_y) * runs;
    let sum = |f: fn(&TraceSummary) -> u64| per_run.iter().map(|r| f(&r.3)).sum::<u64>();
    let batches = sum(|s| s.batches);
    let exhausted = sum(|s| s.exhausted);
    let trials = sum(|s| s.trials);
    Ok(MonteCarloStats {
        algorithm,
        runs,
        base_seed,
        p_f: rel.p_f(),
        t: Distribution::of(per_run.iter().map(|r| r.0).collect()),
        s: Distribution::of(per_run.iter().map(|r| r.1).collect()),
        bb: Distribution::of(per_run.iter().map(|r| r.2).collect()),
        batches,
        exhausted,
        exhaustion_frequency: if batches == 0 { 0.0 } else { exhausted as f64 / batches as f64 },
        trials,
        initialisations,
        mean_trials_per_init: if initialisations == 0 { 0.0 } else { trials as f64 / initialisations as f64 },
        pool_hits: sum(|s| s.pool_hits),
    })
}

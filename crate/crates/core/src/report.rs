//! A single scheduling run described by its full configuration, and the
//! report that comes out of it.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::icm::{CircuitStats, CostModel, IcmCircuit};
use crate::layout::{validate_schedule, Metrics, Violation};
use crate::reliability::ReliabilityParams;
use crate::schedulers::{
    run, schedule_online, Algorithm, HeraldOracle, OnlineOptions, OnlinePolicy, ScheduleError, ScheduleOutcome,
    SchedulerLimits, TraceSummary,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub oracle: HeraldOracle,
    pub reliability: ReliabilityParams,
    pub limits: SchedulerLimits,
    /// Online schedulers only.
    pub pooling: bool,
    pub costs: CostModel,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            oracle: HeraldOracle::WorstCase,
            reliability: ReliabilityParams::default(),
            limits: SchedulerLimits::default(),
            pooling: true,
            costs: CostModel::default(),
        }
    }

    pub fn run(&self, c: &IcmCircuit) -> Result<ScheduleOutcome, ScheduleError> {
        let policy = match self.algorithm {
            Algorithm::Asap { .. } => None,
            Algorithm::Alapt => Some(OnlinePolicy::Parallel),
            Algorithm::Alaps { strategy } => Some(OnlinePolicy::Sequential { strategy }),
        };
        match policy {
            Some(policy) if !self.pooling => schedule_online(
                c,
                &self.costs,
                &self.reliability,
                &self.oracle,
                self.limits,
                policy,
                OnlineOptions { pooling: false },
            ),
            _ => run(self.algorithm, c, &self.costs, &self.reliability, &self.oracle, self.limits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub circuit_name: String,
    pub config: RunConfig,
    pub circuit: CircuitStats,
    pub metrics: Metrics,
    pub trace: TraceSummary,
    pub violations: Vec<Violation>,
    /// Wall-clock time of scheduling and validation; the only field that
    /// varies between identical runs.
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Runs `config` on `c`, validates the result and builds the report.
pub fn run_with_report(config: &RunConfig, c: &IcmCircuit) -> Result<(ScheduleOutcome, RunReport), ScheduleError> {
    let start = Instant::now();
    let outcome = config.run(c)?;
    let violations = validate_schedule(&outcome.schedule, c, &config.costs);
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        circuit_name: c.name().to_string(),
        config: config.clone(),
        circuit: c.stats(),
        metrics: outcome.metrics,
        trace: outcome.trace.summary(),
        violations,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((outcome, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icm::OpKind::*;
    use crate::schedulers::AlapsStrategy;

    fn one_a() -> IcmCircuit {
        IcmCircuit::new(
            "one_a",
            2,
            vec![(BasisInit, vec![0]), (InjectedInitA, vec![1]), (Cnot, vec![1, 0]), (Measure, vec![1]), (Measure, vec![0])],
        )
        .unwrap()
    }

    #[test]
    fn alaps_worst_case_report() {
        let config = RunConfig::new(Algorithm::Alaps { strategy: AlapsStrategy::RepeatUntilSuccess });
        let (_, report) = run_with_report(&config, &one_a()).unwrap();
        assert!(report.is_valid());
        assert_eq!((report.trace.trials, report.trace.failures), (5, 4));
    }

    #[test]
    fn echoed_config_reproduces_metrics() {
        let mut config = RunConfig::new(Algorithm::Alapt);
        config.oracle = HeraldOracle::stochastic(77, 0.5);
        let (_, report) = run_with_report(&config, &one_a()).unwrap();
        let back: RunReport = serde_json::from_str(&report.to_json()).unwrap();
        let (_, again) = run_with_report(&back.config, &one_a()).unwrap();
        assert_eq!(again.metrics, report.metrics);
        assert_eq!(again.trace, report.trace);
    }
}

//! Offline (ASAP) and online (ALAPT, ALAPS) scheduling of ICM circuits
//! whose injected initialisations are realized by heralded distillations.
//!
//! All three schedulers share the same layout convention. Circuit operations
//! are placed first-fit in a circuit region of wires `[0, W)`, where `W` is
//! the circuit width (widened if a single op box is wider). The offline
//! scheduler runs every distillation before the circuit starts, from wire 0.
//! The online schedulers run distillations on ancilla wires `[W, m)` right
//! before an injected state is consumed.

mod asap;
mod online;
pub mod oracle;
pub mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::icm::{CostModel, IcmCircuit, InjectedType};
use crate::layout::{metrics, CapacityError, Metrics, Schedule};
use crate::reliability::ReliabilityParams;

pub use asap::{asap_phase_one_width, schedule_asap};
pub use online::{schedule_alaps, schedule_alapt, schedule_online, OnlineOptions, OnlinePolicy};
pub use oracle::{sample_verdict, HeraldOracle, OracleError, TrialSlot, Verdict};
pub use trace::{ScheduleTrace, TraceEvent, TraceSummary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("capacity: {0}")]
    Capacity(#[from] CapacityError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
}

/// Hardware limits for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerLimits {
    /// Machine qubits: no placement may reach past this wire.
    pub m: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum AsapLayout {
    /// Every trial side by side at time zero.
    Column,
    /// Each type's trials folded into at most `rows` parallel lanes,
    /// sequenced in time within a lane.
    Matrix { rows: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlapsStrategy {
    /// Run one trial after another until one succeeds.
    RepeatUntilSuccess,
    /// Reserve `n_t` sequential trials; the first success is used and any
    /// later successes are pooled.
    FixedSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum Algorithm {
    Asap { layout: AsapLayout },
    Alapt,
    Alaps { strategy: AlapsStrategy },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleOutcome {
    pub schedule: Schedule,
    pub metrics: Metrics,
    pub trace: ScheduleTrace,
}

impl ScheduleOutcome {
    fn new(schedule: Schedule, trace: ScheduleTrace) -> Self {
        ScheduleOutcome { metrics: metrics(&schedule), schedule, trace }
    }
}

/// Runs `algo`. The oracle is ignored by the offline scheduler, whose
/// verdicts are worst case by construction.
pub fn run(
    algo: Algorithm,
    c: &IcmCircuit,
    cm: &CostModel,
    rel: &ReliabilityParams,
    oracle: &HeraldOracle,
    limits: SchedulerLimits,
) -> Result<ScheduleOutcome, ScheduleError> {
    match algo {
        Algorithm::Asap { layout } => schedule_asap(c, cm, rel, layout, limits),
        Algorithm::Alapt => schedule_alapt(c, cm, rel, oracle, limits),
        Algorithm::Alaps { strategy } => schedule_alaps(c, cm, rel, oracle, limits, strategy),
    }
}

/// Width of the circuit region: the logical width, or the widest
/// non-injected op box if that is wider.
pub(crate) fn circuit_region_width(c: &IcmCircuit, cm: &CostModel) -> u32 {
    c.ops()
        .iter()
        .filter(|op| !op.kind.is_injected())
        .map(|op| cm.effective(op.kind).space)
        .max()
        .unwrap_or(0)
        .max(c.width())
}

pub(crate) fn present_types(c: &IcmCircuit) -> Vec<InjectedType> {
    InjectedType::ALL.into_iter().filter(|&t| c.count_injected(t) > 0).collect()
}

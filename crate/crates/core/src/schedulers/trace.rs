use serde::{Deserialize, Serialize};

use crate::icm::{InjectedType, OpId};
use crate::layout::PlacementId;
use crate::schedulers::oracle::HeraldOracle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    BatchStarted { kind: InjectedType, size: u64, t: u64 },
    TrialVerdict { placement: PlacementId, kind: InjectedType, success: bool },
    /// Every trial of a batch or sequence failed; another one follows.
    BatchExhausted { kind: InjectedType, t: u64 },
    PoolStored { placement: PlacementId },
    PoolHit { consumer: OpId, placement: PlacementId },
    OpPlaced { op: OpId, placement: PlacementId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTrace {
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub batches: u64,
    pub trials: u64,
    pub failures: u64,
    pub exhausted: u64,
    pub pool_stored: u64,
    pub pool_hits: u64,
}

impl ScheduleTrace {
    pub fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }

    pub fn summary(&self) -> TraceSummary {
        let mut s = TraceSummary::default();
        for e in &self.events {
            match e {
                TraceEvent::BatchStarted { .. } => s.batches += 1,
                TraceEvent::TrialVerdict { success, .. } => {
                    s.trials += 1;
                    s.failures += u64::from(!success);
                }
                TraceEvent::BatchExhausted { .. } => s.exhausted += 1,
                TraceEvent::PoolStored { .. } => s.pool_stored += 1,
                TraceEvent::PoolHit { .. } => s.pool_hits += 1,
                TraceEvent::OpPlaced { .. } => {}
            }
        }
        s
    }

    /// A scripted oracle that hands out exactly the verdicts recorded here, in
    /// order. Re-running the same scheduler with it reproduces the schedule.
    pub fn replay_oracle(&self) -> HeraldOracle {
        let (mut a, mut y) = (Vec::new(), Vec::new());
        for e in &self.events {
            if let TraceEvent::TrialVerdict { kind, success, .. } = e {
                match kind {
                    InjectedType::A => a.push(*success),
                    InjectedType::Y => y.push(*success),
                }
            }
        }
        HeraldOracle::Scripted { a, y }
    }
}

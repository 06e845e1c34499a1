use serde::{Deserialize, Serialize};

use crate::icm::{CostModel, IcmCircuit, InjectedType, OpId};
use crate::layout::{CapacityError, Occupancy, PlacementId, PlacementTag, Rect, Schedule, WireRange};
use crate::reliability::{min_extra_online, ReliabilityParams};
use crate::schedulers::oracle::{HeraldOracle, TrialSlot};
use crate::schedulers::trace::{ScheduleTrace, TraceEvent};
use crate::schedulers::{
    circuit_region_width, present_types, AlapsStrategy, ScheduleError, ScheduleOutcome, SchedulerLimits,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum OnlinePolicy {
    /// ALAPT: `n_t` trials side by side, as late as the consumer allows.
    Parallel,
    /// ALAPS: trials one after another on a single footprint.
    Sequential { strategy: AlapsStrategy },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnlineOptions {
    /// Keep surplus successful states for later consumers.
    pub pooling: bool,
}

impl Default for OnlineOptions {
    fn default() -> Self {
        OnlineOptions { pooling: true }
    }
}

pub fn schedule_alapt(
    c: &IcmCircuit,
    cm: &CostModel,
    rel: &ReliabilityParams,
    oracle: &HeraldOracle,
    limits: SchedulerLimits,
) -> Result<ScheduleOutcome, ScheduleError> {
    schedule_online(c, cm, rel, oracle, limits, OnlinePolicy::Parallel, OnlineOptions::default())
}

pub fn schedule_alaps(
    c: &IcmCircuit,
    cm: &CostModel,
    rel: &ReliabilityParams,
    oracle: &HeraldOracle,
    limits: SchedulerLimits,
    strategy: AlapsStrategy,
) -> Result<ScheduleOutcome, ScheduleError> {
    schedule_online(
        c,
        cm,
        rel,
        oracle,
        limits,
        OnlinePolicy::Sequential { strategy },
        OnlineOptions::default(),
    )
}

#[derive(Debug, Clone, Copy)]
struct Pooled {
    placement: PlacementId,
    ready: u64,
}

#[derive(Debug, Clone, Copy)]
struct Delivery {
    placement: PlacementId,
    ready: u64,
    pooled: bool,
}

struct Engine<'a> {
    cm: &'a CostModel,
    oracle: &'a HeraldOracle,
    policy: OnlinePolicy,
    options: OnlineOptions,
    n_t: u64,
    occ: Occupancy,
    schedule: Schedule,
    trace: ScheduleTrace,
    distill: WireRange,
    /// Where trials go: all of `distill`, or one footprint for sequential trials.
    lane: WireRange,
    trials: [u64; 2],
    pool: [Vec<Pooled>; 2],
}

/// Online scheduling in wire-precedence (list) order.
///
/// An injected initialisation is resolved when the next op on its wire is
/// reached: at the time `t` that op's other inputs are ready, a pooled state
/// is used if one exists by `t` plus one trial duration, otherwise trials
/// start at the earliest free slot at or after `t` and the consumer waits
/// for the first success.
pub fn schedule_online(
    c: &IcmCircuit,
    cm: &CostModel,
    rel: &ReliabilityParams,
    oracle: &HeraldOracle,
    limits: SchedulerLimits,
    policy: OnlinePolicy,
    options: OnlineOptions,
) -> Result<ScheduleOutcome, ScheduleError> {
    let guarantees = c.ops().iter().filter(|op| op.kind.is_injected()).count() as u32;
    let n_t = min_extra_online(&rel.per_guarantee(guarantees)).n_t;
    let circuit_width = circuit_region_width(c, cm);
    let footprint = present_types(c)
        .into_iter()
        .map(|ty| {
            let space = cm.effective(ty.op_kind()).space;
            match policy {
                OnlinePolicy::Parallel => space * n_t as u32,
                OnlinePolicy::Sequential { .. } => space,
            }
        })
        .max()
        .unwrap_or(0);
    if let Some(m) = limits.m {
        if circuit_width + footprint > m {
            return Err(CapacityError::TooWide { width: circuit_width + footprint, capacity: m }.into());
        }
    }
    let distill = WireRange::from(circuit_width);
    let lane = match policy {
        OnlinePolicy::Parallel => distill,
        // Every sequential trial shares one footprint; needs that arrive
        // while it is busy wait for it.
        OnlinePolicy::Sequential { .. } => WireRange::bounded(circuit_width, circuit_width + footprint),
    };
    let mut engine = Engine {
        cm,
        oracle,
        policy,
        options,
        n_t,
        occ: Occupancy::with_limit(limits.m),
        schedule: Schedule::default(),
        trace: ScheduleTrace::default(),
        distill,
        lane,
        trials: [0; 2],
        pool: Default::default(),
    };
    let region = WireRange::bounded(0, circuit_width);

    let preds = c.predecessors();
    let mut done = vec![0u64; c.ops().len()];
    for op in c.ops() {
        if op.kind.is_injected() {
            continue;
        }
        let mut t = 0;
        let mut pending = Vec::new();
        for &u in preds[op.id as usize].iter().flatten() {
            match c.op(u).kind.injected_type() {
                Some(ty) => pending.push((u, ty)),
                None => t = t.max(done[u as usize]),
            }
        }
        let mut earliest = t;
        let mut deliveries = Vec::with_capacity(pending.len());
        for (u, ty) in pending {
            let d = engine.acquire(ty, t, u)?;
            earliest = earliest.max(d.ready);
            deliveries.push((u, ty, d));
        }

        let cost = cm.effective(op.kind);
        let rect = engine.occ.place_first_fit_in(region, cost.space, cost.time, earliest)?;
        let pid = engine.schedule.push(Some(op.id), op.kind, PlacementTag::CircuitOp, rect);
        engine.trace.push(TraceEvent::OpPlaced { op: op.id, placement: pid });
        done[op.id as usize] = rect.t_end;

        for (u, ty, d) in deliveries {
            engine.schedule.consumer_links.insert(u, d.placement);
            if d.pooled && rect.t_start > d.ready {
                let hold = engine
                    .occ
                    .place_at_time(engine.distill, 1, d.ready, rect.t_start - d.ready)?;
                engine.schedule.push(Some(u), ty.op_kind(), PlacementTag::PooledHold, hold);
            }
        }
    }

    Ok(ScheduleOutcome::new(engine.schedule, engine.trace))
}

impl Engine<'_> {
    fn acquire(&mut self, ty: InjectedType, t: u64, requester: OpId) -> Result<Delivery, ScheduleError> {
        let cost = self.cm.effective(ty.op_kind());
        if self.options.pooling {
            let pool = &mut self.pool[ty.index()];
            let usable = pool
                .iter()
                .enumerate()
                .filter(|(_, p)| p.ready <= t + cost.time)
                .min_by_key(|(_, p)| (p.ready, p.placement))
                .map(|(i, _)| i);
            if let Some(i) = usable {
                let p = pool.remove(i);
                self.trace.push(TraceEvent::PoolHit { consumer: requester, placement: p.placement });
                return Ok(Delivery { placement: p.placement, ready: p.ready, pooled: true });
            }
        }
        match self.policy {
            OnlinePolicy::Parallel => self.parallel(ty, t, requester),
            OnlinePolicy::Sequential { strategy: AlapsStrategy::RepeatUntilSuccess } => {
                self.repeat_until_success(ty, t, requester)
            }
            OnlinePolicy::Sequential { strategy: AlapsStrategy::FixedSequence } => {
                self.fixed_sequence(ty, t, requester)
            }
        }
    }

    /// Records one trial and returns whether it succeeded.
    fn trial(&mut self, ty: InjectedType, rect: Rect, position: u64, requester: OpId) -> Result<(PlacementId, bool), ScheduleError> {
        let index = self.trials[ty.index()];
        self.trials[ty.index()] += 1;
        let verdict = self
            .oracle
            .sample(ty, TrialSlot { index, position, group_size: self.n_t, required: 1 })?;
        let tag = if verdict.is_success() {
            PlacementTag::DistillTrialSuccess
        } else {
            PlacementTag::DistillTrialFail
        };
        let pid = self.schedule.push(Some(requester), ty.op_kind(), tag, rect);
        self.trace.push(TraceEvent::TrialVerdict { placement: pid, kind: ty, success: verdict.is_success() });
        Ok((pid, verdict.is_success()))
    }

    fn store(&mut self, ty: InjectedType, placement: PlacementId, ready: u64) {
        if self.options.pooling {
            self.pool[ty.index()].push(Pooled { placement, ready });
            self.trace.push(TraceEvent::PoolStored { placement });
        }
    }

    fn parallel(&mut self, ty: InjectedType, t: u64, requester: OpId) -> Result<Delivery, ScheduleError> {
        let cost = self.cm.effective(ty.op_kind());
        let mut start = t;
        loop {
            let batch = self
                .occ
                .find_first_fit(self.lane, cost.space * self.n_t as u32, cost.time, start)?;
            self.trace.push(TraceEvent::BatchStarted { kind: ty, size: self.n_t, t: batch.t_start });
            let mut first = None;
            for i in 0..self.n_t {
                let lo = batch.w_lo + i as u32 * cost.space;
                let rect = Rect { w_lo: lo, w_hi: lo + cost.space, ..batch };
                self.occ.occupy(rect);
                let (pid, success) = self.trial(ty, rect, i, requester)?;
                if success {
                    if first.is_none() {
                        first = Some(pid);
                    } else {
                        self.store(ty, pid, batch.t_end);
                    }
                }
            }
            if let Some(placement) = first {
                return Ok(Delivery { placement, ready: batch.t_end, pooled: false });
            }
            self.trace.push(TraceEvent::BatchExhausted { kind: ty, t: batch.t_end });
            start = batch.t_end;
        }
    }

    fn repeat_until_success(&mut self, ty: InjectedType, t: u64, requester: OpId) -> Result<Delivery, ScheduleError> {
        let cost = self.cm.effective(ty.op_kind());
        let mut start = t;
        let mut position = 0;
        loop {
            let rect = self.occ.place_first_fit_in(self.lane, cost.space, cost.time, start)?;
            if position == 0 {
                self.trace.push(TraceEvent::BatchStarted { kind: ty, size: self.n_t, t: rect.t_start });
            }
            let (pid, success) = self.trial(ty, rect, position, requester)?;
            if success {
                return Ok(Delivery { placement: pid, ready: rect.t_end, pooled: false });
            }
            position += 1;
            if position == self.n_t {
                // Past the reliability budget; keep repeating.
                self.trace.push(TraceEvent::BatchExhausted { kind: ty, t: rect.t_end });
                position = 0;
            }
            start = rect.t_end;
        }
    }

    fn fixed_sequence(&mut self, ty: InjectedType, t: u64, requester: OpId) -> Result<Delivery, ScheduleError> {
        let cost = self.cm.effective(ty.op_kind());
        let mut start = t;
        loop {
            let mut first: Option<Delivery> = None;
            for i in 0..self.n_t {
                let rect = self.occ.place_first_fit_in(self.lane, cost.space, cost.time, start)?;
                if i == 0 {
                    self.trace.push(TraceEvent::BatchStarted { kind: ty, size: self.n_t, t: rect.t_start });
                }
                let (pid, success) = self.trial(ty, rect, i, requester)?;
                if success {
                    if first.is_none() {
                        first = Some(Delivery { placement: pid, ready: rect.t_end, pooled: false });
                    } else {
                        self.store(ty, pid, rect.t_end);
                    }
                }
                start = rect.t_end;
            }
            if let Some(d) = first {
                return Ok(d);
            }
            self.trace.push(TraceEvent::BatchExhausted { kind: ty, t: start });
        }
    }
}

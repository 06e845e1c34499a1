use std::collections::VecDeque;

use crate::icm::{CostModel, IcmCircuit, InjectedType};
use crate::layout::{CapacityError, Occupancy, PlacementId, PlacementTag, Rect, Schedule, WireRange};
use crate::reliability::{min_extra_offline, ReliabilityParams};
use crate::schedulers::oracle::{HeraldOracle, TrialSlot};
use crate::schedulers::trace::{ScheduleTrace, TraceEvent};
use crate::schedulers::{
    circuit_region_width, present_types, AsapLayout, ScheduleError, ScheduleOutcome, SchedulerLimits,
};

/// Offline scheduling. Phase one runs `n_i + s` trials per injected type
/// (enough that `n_i` succeed except with probability `p_c`) before anything
/// else. Phase two list-schedules the circuit as soon as possible after it.
pub fn schedule_asap(
    c: &IcmCircuit,
    cm: &CostModel,
    rel: &ReliabilityParams,
    layout: AsapLayout,
    limits: SchedulerLimits,
) -> Result<ScheduleOutcome, ScheduleError> {
    let mut occ = Occupancy::with_limit(limits.m);
    let mut schedule = Schedule::default();
    let mut trace = ScheduleTrace::default();

    let plans = phase_one_plan(c, rel, layout);
    let width = asap_phase_one_width(c, cm, rel, layout);
    if let Some(m) = limits.m {
        if width > u64::from(m) {
            return Err(CapacityError::TooWide { width: width.try_into().unwrap_or(u32::MAX), capacity: m }.into());
        }
    }

    // Phase one: trial k of a type sits in lane k % lanes, slot k / lanes.
    let oracle = HeraldOracle::WorstCase;
    let mut successes: [VecDeque<PlacementId>; 2] = Default::default();
    let mut offset = 0u32;
    let mut phase_end = 0u64;
    for &TypePlan { ty, n_i, n_t, lanes } in &plans {
        let cost = cm.effective(ty.op_kind());
        trace.push(TraceEvent::BatchStarted { kind: ty, size: n_t, t: 0 });
        for k in 0..n_t {
            let lane = (k % lanes) as u32;
            let slot = k / lanes;
            let rect = Rect {
                t_start: slot * cost.time,
                t_end: (slot + 1) * cost.time,
                w_lo: offset + lane * cost.space,
                w_hi: offset + (lane + 1) * cost.space,
            };
            occ.occupy(rect);
            let verdict = oracle.sample(ty, TrialSlot { index: k, position: k, group_size: n_t, required: n_i })?;
            let tag = if verdict.is_success() {
                PlacementTag::DistillTrialSuccess
            } else {
                PlacementTag::DistillTrialFail
            };
            let pid = schedule.push(None, ty.op_kind(), tag, rect);
            trace.push(TraceEvent::TrialVerdict { placement: pid, kind: ty, success: verdict.is_success() });
            if verdict.is_success() {
                successes[ty.index()].push_back(pid);
            }
            phase_end = phase_end.max(rect.t_end);
        }
        offset += lanes as u32 * cost.space;
    }

    // Phase two.
    let region = WireRange::bounded(0, circuit_region_width(c, cm));
    let preds = c.predecessors();
    let mut ready = vec![0u64; c.ops().len()];
    for op in c.ops() {
        if let Some(ty) = op.kind.injected_type() {
            let pid = successes[ty.index()]
                .pop_front()
                .expect("worst-case phase one yields exactly n_i successes");
            schedule.consumer_links.insert(op.id, pid);
            ready[op.id as usize] = schedule.placements[pid as usize].t_end;
            continue;
        }
        let earliest = preds[op.id as usize]
            .iter()
            .flatten()
            .map(|&u| ready[u as usize])
            .fold(phase_end, u64::max);
        let cost = cm.effective(op.kind);
        let rect = occ.place_first_fit_in(region, cost.space, cost.time, earliest)?;
        let pid = schedule.push(Some(op.id), op.kind, PlacementTag::CircuitOp, rect);
        trace.push(TraceEvent::OpPlaced { op: op.id, placement: pid });
        ready[op.id as usize] = rect.t_end;
    }

    Ok(ScheduleOutcome::new(schedule, trace))
}

struct TypePlan {
    ty: InjectedType,
    n_i: u64,
    n_t: u64,
    lanes: u64,
}

fn phase_one_plan(c: &IcmCircuit, rel: &ReliabilityParams, layout: AsapLayout) -> Vec<TypePlan> {
    let types = present_types(c);
    let rel = rel.per_guarantee(types.len() as u32);
    types
        .into_iter()
        .map(|ty| {
            let n_i = u64::from(c.count_injected(ty));
            let n_t = min_extra_offline(n_i, &rel).n_t;
            let lanes = match layout {
                AsapLayout::Column => n_t,
                AsapLayout::Matrix { rows } => n_t.min(u64::from(rows.max(1))),
            };
            TypePlan { ty, n_i, n_t, lanes }
        })
        .collect()
}

/// Phase-one width for the given layout, without scheduling.
pub fn asap_phase_one_width(c: &IcmCircuit, cm: &CostModel, rel: &ReliabilityParams, layout: AsapLayout) -> u64 {
    phase_one_plan(c, rel, layout)
        .iter()
        .map(|p| p.lanes * u64::from(cm.effective(p.ty.op_kind()).space))
        .sum()
}

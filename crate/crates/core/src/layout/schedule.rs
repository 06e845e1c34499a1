use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::icm::{CostModel, IcmCircuit, OpId, OpKind};
use crate::layout::occupancy::Rect;

pub type PlacementId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementTag {
    CircuitOp,
    DistillTrialSuccess,
    DistillTrialFail,
    PooledHold,
}

/// One box in the space-time plane. Time and wire intervals are half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub id: PlacementId,
    /// The circuit op this box realizes. For distillation trials it is the
    /// injected initialisation that requested the batch; for a pooled hold
    /// it is the op that eventually consumed the state. `None` for the
    /// offline phase, where trials are not requested by a particular op.
    pub op_id: Option<OpId>,
    pub kind: OpKind,
    pub tag: PlacementTag,
    pub t_start: u64,
    pub t_end: u64,
    pub w_lo: u32,
    pub w_hi: u32,
}

impl Placement {
    pub fn rect(&self) -> Rect {
        Rect { t_start: self.t_start, t_end: self.t_end, w_lo: self.w_lo, w_hi: self.w_hi }
    }

    pub fn duration(&self) -> u64 {
        self.t_end - self.t_start
    }

    pub fn width(&self) -> u32 {
        self.w_hi - self.w_lo
    }
}

/// Placed boxes plus, for every injected initialisation, the successful
/// distillation trial whose state it received.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub placements: Vec<Placement>,
    /// Injected-init op id -> producing `DistillTrialSuccess` placement id.
    pub consumer_links: BTreeMap<OpId, PlacementId>,
}

impl Schedule {
    pub fn push(
        &mut self,
        op_id: Option<OpId>,
        kind: OpKind,
        tag: PlacementTag,
        rect: Rect,
    ) -> PlacementId {
        let id = self.placements.len() as PlacementId;
        self.placements.push(Placement {
            id,
            op_id,
            kind,
            tag,
            t_start: rect.t_start,
            t_end: rect.t_end,
            w_lo: rect.w_lo,
            w_hi: rect.w_hi,
        });
        id
    }

    pub fn get(&self, id: PlacementId) -> Option<&Placement> {
        self.placements.get(id as usize)
    }

    pub fn count(&self, tag: PlacementTag) -> usize {
        self.placements.iter().filter(|p| p.tag == tag).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization is infallible")
    }

    pub fn from_json(bytes: &[u8]) -> serde_json::Result<Self> {
        serde_json::from_slice(bytes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metrics {
    /// Makespan: latest box end.
    #[serde(rename = "T")]
    pub t: u64,
    /// Bounding-box height: highest occupied wire + 1.
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "BB")]
    pub bb: u64,
    /// Largest total box width alive at one instant.
    pub peak_width: u64,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T={} S={} BB={}", self.t, self.s, self.bb)
    }
}

pub fn metrics(s: &Schedule) -> Metrics {
    let t = s.placements.iter().map(|p| p.t_end).max().unwrap_or(0);
    let sp = s.placements.iter().map(|p| u64::from(p.w_hi)).max().unwrap_or(0);
    let mut events: Vec<(u64, i64)> = s
        .placements
        .iter()
        .flat_map(|p| [(p.t_start, i64::from(p.width())), (p.t_end, -i64::from(p.width()))])
        .collect();
    // Ends sort before starts at the same instant.
    events.sort_unstable();
    let mut live = 0i64;
    let mut peak = 0i64;
    for (_, delta) in events {
        live += delta;
        peak = peak.max(live);
    }
    Metrics { t, s: sp, bb: t * sp, peak_width: peak as u64 }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    Overlap { a: PlacementId, b: PlacementId },
    MalformedBox { placement: PlacementId },
    UnknownOp { placement: PlacementId, op: OpId },
    MissingOp { op: OpId },
    DuplicateOp { op: OpId },
    CostMismatch { placement: PlacementId },
    MissingLink { op: OpId },
    BadLink { op: OpId, placement: PlacementId },
    SharedState { placement: PlacementId },
    Precedence { from: OpId, to: OpId },
    BadHold { placement: PlacementId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { a, b } => write!(f, "placements {a} and {b} overlap"),
            Violation::MalformedBox { placement } => write!(f, "placement {placement} is empty or inverted"),
            Violation::UnknownOp { placement, op } => write!(f, "placement {placement} names unknown op {op}"),
            Violation::MissingOp { op } => write!(f, "op {op} is not placed"),
            Violation::DuplicateOp { op } => write!(f, "op {op} is placed more than once"),
            Violation::CostMismatch { placement } => write!(f, "placement {placement} does not match its cost box"),
            Violation::MissingLink { op } => write!(f, "injected op {op} has no producing trial"),
            Violation::BadLink { op, placement } => {
                write!(f, "injected op {op} links to {placement}, which is not a matching successful trial")
            }
            Violation::SharedState { placement } => write!(f, "trial {placement} feeds more than one op"),
            Violation::Precedence { from, to } => write!(f, "op {to} starts before its predecessor {from} is done"),
            Violation::BadHold { placement } => write!(f, "pooled hold {placement} is malformed"),
        }
    }
}

/// Checks every schedule invariant against the source circuit. An empty list
/// means the schedule is valid.
///
/// Injected initialisations have no `CircuitOp` box of their own: they are
/// realized by the successful trial they link to, and the state is available
/// to the next op on the wire once that trial (or its pooled hold) ends.
pub fn validate_schedule(s: &Schedule, c: &IcmCircuit, cm: &CostModel) -> Vec<Violation> {
    let mut out = Vec::new();

    for (i, p) in s.placements.iter().enumerate() {
        if p.id as usize != i || p.t_end <= p.t_start || p.w_hi <= p.w_lo {
            out.push(Violation::MalformedBox { placement: p.id });
        }
    }

    // Overlap: sweep placements by start time.
    let mut order: Vec<&Placement> = s.placements.iter().collect();
    order.sort_by_key(|p| (p.t_start, p.id));
    let mut active: Vec<&Placement> = Vec::new();
    for p in order {
        active.retain(|q| q.t_end > p.t_start);
        for q in &active {
            if q.w_lo < p.w_hi && p.w_lo < q.w_hi {
                let (a, b) = (q.id.min(p.id), q.id.max(p.id));
                out.push(Violation::Overlap { a, b });
            }
        }
        active.push(p);
    }

    let n = c.ops().len();
    let mut op_box: Vec<Option<&Placement>> = vec![None; n];
    for p in s.placements.iter().filter(|p| p.tag == PlacementTag::CircuitOp) {
        let Some(op) = p.op_id.filter(|&op| (op as usize) < n) else {
            out.push(Violation::UnknownOp { placement: p.id, op: p.op_id.unwrap_or(u32::MAX) });
            continue;
        };
        let kind = c.op(op).kind;
        if kind.is_injected() || p.kind != kind {
            out.push(Violation::UnknownOp { placement: p.id, op });
            continue;
        }
        let cost = cm.effective(kind);
        if p.duration() != cost.time || p.width() != cost.space {
            out.push(Violation::CostMismatch { placement: p.id });
        }
        if op_box[op as usize].replace(p).is_some() {
            out.push(Violation::DuplicateOp { op });
        }
    }

    for p in s.placements.iter() {
        match p.tag {
            PlacementTag::DistillTrialSuccess | PlacementTag::DistillTrialFail => {
                let cost = cm.effective(p.kind);
                if !p.kind.is_injected() || p.duration() != cost.time || p.width() != cost.space {
                    out.push(Violation::CostMismatch { placement: p.id });
                }
            }
            PlacementTag::PooledHold => {
                if !p.kind.is_injected() || p.width() != 1 {
                    out.push(Violation::BadHold { placement: p.id });
                }
            }
            PlacementTag::CircuitOp => {}
        }
    }

    // Time at which each op's output is available to its successors.
    let mut ready: Vec<Option<u64>> = vec![None; n];
    let mut consumed = BTreeSet::new();
    let holds: BTreeMap<OpId, &Placement> = s
        .placements
        .iter()
        .filter(|p| p.tag == PlacementTag::PooledHold)
        .filter_map(|p| p.op_id.map(|op| (op, p)))
        .collect();
    for op in c.ops() {
        if op.kind.is_injected() {
            let Some(&pid) = s.consumer_links.get(&op.id) else {
                out.push(Violation::MissingLink { op: op.id });
                continue;
            };
            match s.get(pid) {
                Some(t) if t.tag == PlacementTag::DistillTrialSuccess && t.kind == op.kind => {
                    if !consumed.insert(pid) {
                        out.push(Violation::SharedState { placement: pid });
                    }
                    let mut at = t.t_end;
                    if let Some(h) = holds.get(&op.id) {
                        if h.t_start != t.t_end || h.kind != op.kind {
                            out.push(Violation::BadHold { placement: h.id });
                        }
                        at = at.max(h.t_end);
                    }
                    ready[op.id as usize] = Some(at);
                }
                _ => out.push(Violation::BadLink { op: op.id, placement: pid }),
            }
        } else {
            match op_box[op.id as usize] {
                Some(p) => ready[op.id as usize] = Some(p.t_end),
                None => out.push(Violation::MissingOp { op: op.id }),
            }
        }
    }

    for (u, v) in c.edges() {
        let (Some(done), Some(next)) = (ready[u as usize], op_box[v as usize]) else {
            continue;
        };
        if next.t_start < done {
            out.push(Violation::Precedence { from: u, to: v });
        }
        if let Some(h) = holds.get(&u) {
            if h.t_end != next.t_start && h.t_end > h.t_start {
                out.push(Violation::BadHold { placement: h.id });
            }
        }
    }

    out
}

//! ICM circuits: wires, operations, and the per-kind space/time cost model.
//!
//! A circuit is a list of operations over dense, 0-based logical wires.
//! Precedence is implied by wire order: an operation depends on the previous
//! operation on each of its operand wires. There is no explicit edge list.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five ICM operation kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    BasisInit,
    #[serde(rename = "inject_a")]
    InjectedInitA,
    #[serde(rename = "inject_y")]
    InjectedInitY,
    Cnot,
    Measure,
}

impl OpKind {
    pub const ALL: [OpKind; 5] = [
        OpKind::BasisInit,
        OpKind::InjectedInitA,
        OpKind::InjectedInitY,
        OpKind::Cnot,
        OpKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::BasisInit => "basis_init",
            OpKind::InjectedInitA => "inject_a",
            OpKind::InjectedInitY => "inject_y",
            OpKind::Cnot => "cnot",
            OpKind::Measure => "measure",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            OpKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_init(self) -> bool {
        matches!(self, OpKind::BasisInit | OpKind::InjectedInitA | OpKind::InjectedInitY)
    }

    /// Injected initialisations are the probabilistic, heralded kinds.
    pub fn is_injected(self) -> bool {
        self.injected_type().is_some()
    }

    pub fn injected_type(self) -> Option<InjectedType> {
        match self {
            OpKind::InjectedInitA => Some(InjectedType::A),
            OpKind::InjectedInitY => Some(InjectedType::Y),
            _ => None,
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown operation kind `{s}`"))
    }
}

/// Magic-state type produced by a distillation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InjectedType {
    A,
    Y,
}

impl InjectedType {
    pub const ALL: [InjectedType; 2] = [InjectedType::A, InjectedType::Y];

    pub fn op_kind(self) -> OpKind {
        match self {
            InjectedType::A => OpKind::InjectedInitA,
            InjectedType::Y => OpKind::InjectedInitY,
        }
    }

    pub fn index(self) -> usize {
        match self {
            InjectedType::A => 0,
            InjectedType::Y => 1,
        }
    }
}

impl fmt::Display for InjectedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectedType::A => f.write_str("A"),
            InjectedType::Y => f.write_str("Y"),
        }
    }
}

pub type OpId = u32;
pub type Wire = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub id: OpId,
    pub kind: OpKind,
    /// Control first for CNOT.
    pub wires: Vec<Wire>,
}

/// A validated ICM circuit. Construct through [`IcmCircuit::new`] or
/// [`parse_circuit`]; both enforce the wire-ordering invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcmCircuit {
    name: String,
    width: u32,
    ops: Vec<Operation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub width: u32,
    pub ops: u32,
    pub inject_a: u32,
    pub inject_y: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("op {op}: {kind} takes {expected} wire(s), got {got}")]
    Arity { op: OpId, kind: OpKind, expected: usize, got: usize },
    #[error("op {op}: wire {wire} out of range for width {width}")]
    WireOutOfRange { op: OpId, wire: Wire, width: u32 },
    #[error("op {op}: cnot control and target are both wire {wire}")]
    RepeatedOperand { op: OpId, wire: Wire },
    #[error("op {op}: first operation on wire {wire} must be an initialisation, found {kind}")]
    MissingInit { op: OpId, wire: Wire, kind: OpKind },
    #[error("op {op}: {kind} on wire {wire} which is already initialised")]
    DoubleInit { op: OpId, wire: Wire, kind: OpKind },
    #[error("op {op}: {kind} on wire {wire} after its measurement")]
    AfterMeasure { op: OpId, wire: Wire, kind: OpKind },
    #[error("wire {wire} is never measured")]
    Unmeasured { wire: Wire },
    #[error("wire {wire} has no operations")]
    EmptyWire { wire: Wire },
}

impl IcmCircuit {
    pub fn new(name: impl Into<String>, width: u32, ops: Vec<(OpKind, Vec<Wire>)>) -> Result<Self, CircuitError> {
        let ops = ops
            .into_iter()
            .enumerate()
            .map(|(i, (kind, wires))| Operation { id: i as OpId, kind, wires })
            .collect();
        let circuit = IcmCircuit { name: name.into(), width, ops };
        circuit.validate()?;
        Ok(circuit)
    }

    fn validate(&self) -> Result<(), CircuitError> {
        #[derive(Clone, Copy, PartialEq)]
        enum WireState {
            Fresh,
            Live,
            Measured,
        }
        let mut state = vec![WireState::Fresh; self.width as usize];
        for op in &self.ops {
            if op.wires.len() != op.kind.arity() {
                return Err(CircuitError::Arity {
                    op: op.id,
                    kind: op.kind,
                    expected: op.kind.arity(),
                    got: op.wires.len(),
                });
            }
            for &w in &op.wires {
                if w >= self.width {
                    return Err(CircuitError::WireOutOfRange { op: op.id, wire: w, width: self.width });
                }
            }
            if op.kind == OpKind::Cnot && op.wires[0] == op.wires[1] {
                return Err(CircuitError::RepeatedOperand { op: op.id, wire: op.wires[0] });
            }
            for &w in &op.wires {
                let slot = &mut state[w as usize];
                match (*slot, op.kind.is_init()) {
                    (WireState::Measured, _) => {
                        return Err(CircuitError::AfterMeasure { op: op.id, wire: w, kind: op.kind })
                    }
                    (WireState::Fresh, true) => *slot = WireState::Live,
                    (WireState::Fresh, false) => {
                        return Err(CircuitError::MissingInit { op: op.id, wire: w, kind: op.kind })
                    }
                    (WireState::Live, true) => {
                        return Err(CircuitError::DoubleInit { op: op.id, wire: w, kind: op.kind })
                    }
                    (WireState::Live, false) => {
                        if op.kind == OpKind::Measure {
                            *slot = WireState::Measured;
                        }
                    }
                }
            }
        }
        for (w, s) in state.iter().enumerate() {
            match s {
                WireState::Fresh => return Err(CircuitError::EmptyWire { wire: w as Wire }),
                WireState::Live => return Err(CircuitError::Unmeasured { wire: w as Wire }),
                WireState::Measured => {}
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, id: OpId) -> &Operation {
        &self.ops[id as usize]
    }

    pub fn stats(&self) -> CircuitStats {
        circuit_stats(self)
    }

    pub fn count_injected(&self, ty: InjectedType) -> u32 {
        self.ops.iter().filter(|op| op.kind == ty.op_kind()).count() as u32
    }

    /// For each op, the previous op on each of its operand wires (same order
    /// as `wires`). `None` means the op is first on that wire.
    pub fn predecessors(&self) -> Vec<Vec<Option<OpId>>> {
        let mut last: Vec<Option<OpId>> = vec![None; self.width as usize];
        self.ops
            .iter()
            .map(|op| {
                op.wires
                    .iter()
                    .map(|&w| last[w as usize].replace(op.id))
                    .collect()
            })
            .collect()
    }

    /// Wire-derived precedence edges `(u, v)`: `u` is the previous operation on
    /// a wire that `v` acts on. A CNOT whose operands were last touched by the
    /// same op yields that edge once.
    pub fn edges(&self) -> Vec<(OpId, OpId)> {
        let mut out = BTreeSet::new();
        for (v, preds) in self.predecessors().into_iter().enumerate() {
            for u in preds.into_iter().flatten() {
                out.insert((u, v as OpId));
            }
        }
        out.into_iter().collect()
    }

    /// The op that follows `id` on wire `wire`, if any.
    pub fn successor_on(&self, id: OpId, wire: Wire) -> Option<OpId> {
        self.ops[id as usize + 1..]
            .iter()
            .find(|op| op.wires.contains(&wire))
            .map(|op| op.id)
    }

    pub fn to_json(&self) -> String {
        let doc = CircuitDoc {
            name: self.name.clone(),
            width: self.width,
            ops: self
                .ops
                .iter()
                .map(|op| OpDoc { kind: op.kind, wires: op.wires.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("circuit serialization is infallible")
    }
}

pub fn circuit_stats(c: &IcmCircuit) -> CircuitStats {
    CircuitStats {
        width: c.width,
        ops: c.ops.len() as u32,
        inject_a: c.count_injected(InjectedType::A),
        inject_y: c.count_injected(InjectedType::Y),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    name: String,
    width: u32,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpDoc {
    kind: OpKind,
    wires: Vec<Wire>,
}

fn syntax_error(e: serde_json::Error) -> CircuitError {
    CircuitError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses and validates a circuit JSON document.
pub fn parse_circuit(bytes: &[u8]) -> Result<IcmCircuit, CircuitError> {
    let doc: CircuitDoc = serde_json::from_slice(bytes).map_err(syntax_error)?;
    IcmCircuit::new(
        doc.name,
        doc.width,
        doc.ops.into_iter().map(|op| (op.kind, op.wires)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostBox {
    pub time: u64,
    pub space: u32,
}

impl CostBox {
    pub const fn new(time: u64, space: u32) -> Self {
        CostBox { time, space }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CostModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("no base cost for {0}")]
    MissingKind(OpKind),
    #[error("{0} has a zero-sized cost box; every kind must be schedulable")]
    ZeroCost(OpKind),
}

/// Space/time box per operation kind, with the movement padding that is added
/// to both axes of the padded kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    base: std::collections::BTreeMap<OpKind, CostBox>,
    movement_pad: u32,
    padded_kinds: BTreeSet<OpKind>,
}

impl Default for CostModel {
    fn default() -> Self {
        let base = [
            (OpKind::BasisInit, CostBox::new(1, 1)),
            (OpKind::InjectedInitA, CostBox::new(7, 15)),
            (OpKind::InjectedInitY, CostBox::new(6, 7)),
            (OpKind::Cnot, CostBox::new(1, 2)),
            (OpKind::Measure, CostBox::new(1, 1)),
        ]
        .into_iter()
        .collect();
        CostModel {
            base,
            movement_pad: 2,
            padded_kinds: [OpKind::InjectedInitA, OpKind::InjectedInitY].into_iter().collect(),
        }
    }
}

impl CostModel {
    pub fn new(
        base: impl IntoIterator<Item = (OpKind, CostBox)>,
        movement_pad: u32,
        padded_kinds: impl IntoIterator<Item = OpKind>,
    ) -> Result<Self, CostModelError> {
        let model = CostModel {
            base: base.into_iter().collect(),
            movement_pad,
            padded_kinds: padded_kinds.into_iter().collect(),
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), CostModelError> {
        for kind in OpKind::ALL {
            let b = self.base.get(&kind).ok_or(CostModelError::MissingKind(kind))?;
            if b.time == 0 || b.space == 0 {
                return Err(CostModelError::ZeroCost(kind));
            }
        }
        Ok(())
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, CostModelError> {
        let model: CostModel = serde_json::from_slice(bytes).map_err(|e| CostModelError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cost model serialization is infallible")
    }

    pub fn base(&self, kind: OpKind) -> CostBox {
        self.base[&kind]
    }

    pub fn movement_pad(&self) -> u32 {
        self.movement_pad
    }

    pub fn is_padded(&self, kind: OpKind) -> bool {
        self.padded_kinds.contains(&kind)
    }

    pub fn effective(&self, kind: OpKind) -> CostBox {
        effective_cost(self, kind)
    }
}

/// Base cost, plus the movement pad on both axes when `kind` is padded.
pub fn effective_cost(model: &CostModel, kind: OpKind) -> CostBox {
    let base = model.base(kind);
    if model.is_padded(kind) {
        CostBox::new(base.time + u64::from(model.movement_pad), base.space + model.movement_pad)
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> IcmCircuit {
        use OpKind::*;
        IcmCircuit::new(
            "fig1",
            3,
            vec![
                (BasisInit, vec![0]),
                (InjectedInitA, vec![1]),
                (BasisInit, vec![2]),
                (Cnot, vec![0, 1]),
                (Cnot, vec![1, 2]),
                (Measure, vec![0]),
                (Measure, vec![1]),
                (Measure, vec![2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn minimal_circuit() {
        let c = parse_circuit(br#"{"name":"m","width":1,"ops":[{"kind":"basis_init","wires":[0]},{"kind":"measure","wires":[0]}]}"#)
            .unwrap();
        assert_eq!(c.width(), 1);
        assert_eq!(c.ops().len(), 2);
        assert_eq!(c.stats(), CircuitStats { width: 1, ops: 2, inject_a: 0, inject_y: 0 });
    }

    #[test]
    fn fig1_has_eight_boxes() {
        let c = fig1();
        let st = c.stats();
        assert_eq!((st.width, st.ops), (3, 8));
        let reparsed = parse_circuit(c.to_json().as_bytes()).unwrap();
        assert_eq!(reparsed, c);
    }

    #[test]
    fn out_of_range_operand() {
        let doc = br#"{"name":"x","width":3,"ops":[
            {"kind":"basis_init","wires":[0]},
            {"kind":"cnot","wires":[0,5]}]}"#;
        assert!(matches!(
            parse_circuit(doc),
            Err(CircuitError::WireOutOfRange { op: 1, wire: 5, width: 3 })
        ));
    }

    #[test]
    fn op_after_measure_is_rejected() {
        use OpKind::*;
        let err = IcmCircuit::new(
            "x",
            1,
            vec![(BasisInit, vec![0]), (Measure, vec![0]), (Measure, vec![0])],
        )
        .unwrap_err();
        assert_eq!(err, CircuitError::AfterMeasure { op: 2, wire: 0, kind: Measure });
        assert!(err.to_string().contains("after its measurement"));
    }

    #[test]
    fn semantic_errors() {
        use OpKind::*;
        assert!(matches!(
            IcmCircuit::new("x", 1, vec![(Measure, vec![0])]),
            Err(CircuitError::MissingInit { .. })
        ));
        assert!(matches!(
            IcmCircuit::new("x", 2, vec![(BasisInit, vec![0]), (BasisInit, vec![1]), (Cnot, vec![1, 1])]),
            Err(CircuitError::RepeatedOperand { .. })
        ));
        assert!(matches!(
            IcmCircuit::new("x", 1, vec![(BasisInit, vec![0])]),
            Err(CircuitError::Unmeasured { wire: 0 })
        ));
        assert!(matches!(
            IcmCircuit::new("x", 2, vec![(BasisInit, vec![0]), (Measure, vec![0])]),
            Err(CircuitError::EmptyWire { wire: 1 })
        ));
        assert!(matches!(
            IcmCircuit::new("x", 1, vec![(BasisInit, vec![0]), (BasisInit, vec![0])]),
            Err(CircuitError::DoubleInit { .. })
        ));
        assert!(matches!(
            IcmCircuit::new("x", 2, vec![(Cnot, vec![0])]),
            Err(CircuitError::Arity { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_circuit(b"{\n  \"name\": \"x\",\n  \"width\": oops\n}").unwrap_err();
        match err {
            CircuitError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_circuit(br#"{"name":"x","width":1,"ops":[{"kind":"toffoli","wires":[0]}]}"#),
            Err(CircuitError::Syntax { .. })
        ));
    }

    #[test]
    fn precedence_follows_wires() {
        let c = fig1();
        assert_eq!(
            c.edges(),
            vec![(0, 3), (1, 3), (2, 4), (3, 4), (3, 5), (4, 6), (4, 7)]
        );
        assert_eq!(c.successor_on(1, 1), Some(3));
        assert_eq!(c.successor_on(7, 2), None);
    }

    #[test]
    fn default_effective_costs() {
        let cm = CostModel::default();
        assert_eq!(cm.effective(OpKind::InjectedInitA), CostBox::new(9, 17));
        assert_eq!(cm.effective(OpKind::InjectedInitY), CostBox::new(8, 9));
        assert_eq!(cm.effective(OpKind::Cnot), CostBox::new(1, 2));
        assert_eq!(cm.effective(OpKind::BasisInit), CostBox::new(1, 1));
        assert_eq!(cm.effective(OpKind::Measure), CostBox::new(1, 1));
    }

    #[test]
    fn cost_model_json() {
        let cm = CostModel::default();
        let json = cm.to_json();
        assert!(json.contains("\"inject_a\""));
        assert_eq!(CostModel::from_json(json.as_bytes()).unwrap(), cm);

        let padded_cnot = CostModel::new(
            OpKind::ALL.map(|k| (k, cm.base(k))),
            3,
            [OpKind::Cnot],
        )
        .unwrap();
        assert_eq!(padded_cnot.effective(OpKind::Cnot), CostBox::new(4, 5));
        assert_eq!(padded_cnot.effective(OpKind::InjectedInitA), CostBox::new(7, 15));

        let zero = br#"{"base":{"basis_init":{"time":0,"space":1},"inject_a":{"time":7,"space":15},
            "inject_y":{"time":6,"space":7},"cnot":{"time":1,"space":2},"measure":{"time":1,"space":1}},
            "movement_pad":2,"padded_kinds":[]}"#;
        assert_eq!(CostModel::from_json(zero), Err(CostModelError::ZeroCost(OpKind::BasisInit)));
        let missing = br#"{"base":{},"movement_pad":2,"padded_kinds":[]}"#;
        assert_eq!(CostModel::from_json(missing), Err(CostModelError::MissingKind(OpKind::BasisInit)));
    }
}

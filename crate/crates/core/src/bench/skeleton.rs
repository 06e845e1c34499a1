//! Expansion of a Toffoli-level circuit into an ICM skeleton with the
//! injection counts of a T-gate-based Toffoli.
//!
//! Each Toffoli follows the usual seven-T network. Every T slot becomes one
//! A-type and two Y-type injections. Each injected state sits on a fresh
//! wire and is consumed by a CNOT onto the data wire the T gate acts on.
//! This reproduces the injection counts but not the CNOT structure of a full
//! ICM synthesis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::mct::MctCircuit;
use crate::icm::{IcmCircuit, InjectedType, OpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonParams {
    pub a_per_toffoli: u32,
    /// Emit the CNOTs between a Toffoli's own wires.
    pub internal_cnots: bool,
}

impl Default for SkeletonParams {
    fn default() -> Self {
        SkeletonParams { a_per_toffoli: 7, internal_cnots: true }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("gate {gate} has {controls} controls; decompose first")]
    TooManyControls { gate: usize, controls: usize },
}

#[derive(Clone, Copy)]
enum Step {
    Cx(usize, usize),
    T(usize),
}

// Operands: 0 = first control, 1 = second control, 2 = target.
const TOFFOLI: [Step; 13] = [
    Step::Cx(1, 2),
    Step::T(2),
    Step::Cx(0, 2),
    Step::T(2),
    Step::Cx(1, 2),
    Step::T(2),
    Step::Cx(0, 2),
    Step::T(1),
    Step::T(2),
    Step::Cx(0, 1),
    Step::T(0),
    Step::T(1),
    Step::Cx(0, 1),
];
const T_SLOTS: [usize; 7] = [2, 2, 2, 1, 2, 0, 1];

pub fn expand_to_icm_skeleton(
    c: &MctCircuit,
    params: SkeletonParams,
    name: &str,
) -> Result<IcmCircuit, SkeletonError> {
    let data = c.width();
    let mut b = Builder { next: data, ops: (0..data).map(|w| (OpKind::BasisInit, vec![w])).collect() };
    for (i, g) in c.gates().iter().enumerate() {
        match g.controls.len() {
            0 => {}
            1 => b.ops.push((OpKind::Cnot, vec![g.controls[0], g.target])),
            2 => {
                let wires = [g.controls[0], g.controls[1], g.target];
                let mut slot = 0;
                for step in TOFFOLI {
                    match step {
                        Step::Cx(a, t) if params.internal_cnots => b.ops.push((OpKind::Cnot, vec![wires[a], wires[t]])),
                        Step::Cx(..) => {}
                        Step::T(w) => {
                            if slot < params.a_per_toffoli {
                                b.t_slot(wires[w]);
                            }
                            slot += 1;
                        }
                    }
                }
                for k in slot..params.a_per_toffoli {
                    b.t_slot(wires[T_SLOTS[k as usize % T_SLOTS.len()]]);
                }
            }
            n => return Err(SkeletonError::TooManyControls { gate: i, controls: n }),
        }
    }
    b.ops.extend((0..data).map(|w| (OpKind::Measure, vec![w])));
    Ok(IcmCircuit::new(name, b.next, b.ops).expect("skeleton construction is well formed"))
}

struct Builder {
    next: u32,
    ops: Vec<(OpKind, Vec<u32>)>,
}

impl Builder {
    fn t_slot(&mut self, target: u32) {
        for ty in [InjectedType::A, InjectedType::Y, InjectedType::Y] {
            let w = self.next;
            self.next += 1;
            self.ops.push((ty.op_kind(), vec![w]));
            self.ops.push((OpKind::Cnot, vec![w, target]));
            self.ops.push((OpKind::Measure, vec![w]));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::mct::MctGate;

    fn toffolis(k: usize) -> MctCircuit {
        let gates = (0..k).map(|i| MctGate::new(vec![i as u32 % 3, (i as u32 + 1) % 3], (i as u32 + 2) % 3)).collect();
        MctCircuit::new(3, gates).unwrap()
    }

    #[test]
    fn counts() {
        for (k, a, y) in [(1, 7, 14), (2, 14, 28), (0, 0, 0)] {
            let s = expand_to_icm_skeleton(&toffolis(k), SkeletonParams::default(), "t").unwrap().stats();
            assert_eq!((s.inject_a, s.inject_y), (a, y));
        }
    }

    #[test]
    fn cnot_and_not_gates() {
        let c = MctCircuit::new(2, vec![MctGate::new(vec![], 0), MctGate::new(vec![0], 1)]).unwrap();
        let s = expand_to_icm_skeleton(&c, SkeletonParams::default(), "t").unwrap();
        assert_eq!(s.width(), 2);
        assert_eq!(s.ops().iter().filter(|o| o.kind == OpKind::Cnot).count(), 1);
    }

    #[test]
    fn parameters() {
        let p = SkeletonParams { a_per_toffoli: 9, internal_cnots: false };
        let s = expand_to_icm_skeleton(&toffolis(2), p, "t").unwrap();
        let st = s.stats();
        assert_eq!((st.inject_a, st.inject_y), (18, 36));
        assert_eq!(s.ops().iter().filter(|o| o.kind == OpKind::Cnot).count(), 54);
        let p = SkeletonParams { a_per_toffoli: 3, internal_cnots: true };
        let st = expand_to_icm_skeleton(&toffolis(1), p, "t").unwrap().stats();
        assert_eq!((st.inject_a, st.inject_y), (3, 6));
    }

    #[test]
    fn rejects_wide_gates() {
        let c = MctCircuit::new(4, vec![MctGate::new(vec![0, 1, 2], 3)]).unwrap();
        assert_eq!(
            expand_to_icm_skeleton(&c, SkeletonParams::default(), "t"),
            Err(SkeletonError::TooManyControls { gate: 0, controls: 3 })
        );
    }
}

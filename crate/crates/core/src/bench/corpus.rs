//! Seeded generators for test and benchmark corpora.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::mct::{decompose_mct, MctCircuit, MctGate};
use crate::bench::skeleton::{expand_to_icm_skeleton, SkeletonParams};
use crate::icm::{IcmCircuit, OpKind};

#[derive(Clone, Copy, PartialEq, Eq)]
enum WireState {
    Fresh,
    Live,
    Done,
}

/// A random valid ICM circuit on `width` wires with at most `max_ops`
/// operations (at least two per wire). Wires start lazily; about a fifth of
/// them are A-type and a fifth Y-type injections.
pub fn random_icm_circuit(rng: &mut impl Rng, name: &str, width: u32, max_ops: usize) -> IcmCircuit {
    let width = width.max(1);
    let target = rng.random_range((2 * width as usize)..=max_ops.max(2 * width as usize));
    let mut state = vec![WireState::Fresh; width as usize];
    let mut ops: Vec<(OpKind, Vec<u32>)> = Vec::with_capacity(target);

    let pending = |state: &[WireState]| -> usize {
        state
            .iter()
            .map(|s| match s {
                WireState::Fresh => 2,
                WireState::Live => 1,
                WireState::Done => 0,
            })
            .sum()
    };
    let start = |w: u32, state: &mut [WireState], ops: &mut Vec<(OpKind, Vec<u32>)>, rng: &mut dyn rand::RngCore| {
        if state[w as usize] == WireState::Fresh {
            let kind = match rng.random_range(0..10) {
                0 | 1 => OpKind::InjectedInitA,
                2 | 3 => OpKind::InjectedInitY,
                _ => OpKind::BasisInit,
            };
            ops.push((kind, vec![w]));
            state[w as usize] = WireState::Live;
        }
    };

    loop {
        let open: Vec<u32> = (0..width).filter(|&w| state[w as usize] != WireState::Done).collect();
        let cost_cnot = 1 + open
            .iter()
            .filter(|&&w| state[w as usize] == WireState::Fresh)
            .count()
            .min(2);
        if open.len() < 2 || ops.len() + pending(&state) + cost_cnot > target {
            break;
        }
        if rng.random_bool(0.1) {
            let live: Vec<u32> = open.iter().copied().filter(|&w| state[w as usize] == WireState::Live).collect();
            if let Some(&w) = live.choose(rng) {
                ops.push((OpKind::Measure, vec![w]));
                state[w as usize] = WireState::Done;
                continue;
            }
        }
        let pair: Vec<u32> = open.choose_multiple(rng, 2).copied().collect();
        for &w in &pair {
            start(w, &mut state, &mut ops, rng);
        }
        ops.push((OpKind::Cnot, pair));
    }
    for w in 0..width {
        start(w, &mut state, &mut ops, rng);
        if state[w as usize] == WireState::Live {
            ops.push((OpKind::Measure, vec![w]));
        }
    }
    IcmCircuit::new(name, width, ops).expect("generator emits valid circuits")
}

/// `count` random circuits of widths 2 to 12 and at most 200 operations.
pub fn random_icm_corpus(seed: u64, count: usize) -> Vec<IcmCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let width = rng.random_range(2..=12);
            random_icm_circuit(&mut rng, &format!("random_{i}"), width, 200)
        })
        .collect()
}

/// A random MCT circuit of `gates` gates with up to `max_controls` controls.
pub fn random_mct_circuit(rng: &mut impl Rng, width: u32, gates: usize, max_controls: usize) -> MctCircuit {
    let wires: Vec<u32> = (0..width).collect();
    let max_controls = max_controls.min(width as usize - 1);
    let gates = (0..gates)
        .map(|_| {
            let n = rng.random_range(0..=max_controls);
            let mut picked: Vec<u32> = wires.choose_multiple(rng, n + 1).copied().collect();
            let target = picked.pop().expect("n + 1 >= 1");
            MctGate::new(picked, target)
        })
        .collect();
    MctCircuit::new(width, gates).expect("distinct wires by construction")
}

/// Skeletons of random MCT circuits with at least one Toffoli after
/// decomposition.
pub fn skeleton_corpus(seed: u64, count: usize, params: SkeletonParams) -> Vec<IcmCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let width = rng.random_range(3..=8);
        let gates = rng.random_range(1..=3);
        let mct = decompose_mct(&random_mct_circuit(&mut rng, width, gates, 3));
        if mct.toffoli_count() == 0 {
            continue;
        }
        let name = format!("skeleton_{}", out.len());
        out.push(expand_to_icm_skeleton(&mct, params, &name).expect("decomposed input"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_bounded() {
        let a = random_icm_corpus(5, 50);
        let b = random_icm_corpus(5, 50);
        assert_eq!(a, b);
        for c in &a {
            assert!((2..=12).contains(&c.width()));
            assert!(c.ops().len() <= 200);
        }
        assert!(a.iter().any(|c| c.stats().inject_a > 0));
        assert!(a.iter().any(|c| c.ops().len() > 100));
    }

    #[test]
    fn skeletons_have_injections() {
        for c in skeleton_corpus(3, 20, SkeletonParams::default()) {
            let s = c.stats();
            assert!(s.inject_a >= 7);
            assert_eq!(s.inject_y, 2 * s.inject_a);
        }
    }
}

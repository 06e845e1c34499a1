use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MctGate {
    pub controls: Vec<u32>,
    pub target: u32,
}

impl MctGate {
    pub fn new(controls: Vec<u32>, target: u32) -> Self {
        MctGate { controls, target }
    }
}

/// A circuit of multi-controlled Toffoli gates over `width` wires, the last
/// `ancillae` of which are clean work wires introduced by decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MctCircuit {
    width: u32,
    gates: Vec<MctGate>,
    ancillae: u32,
    #[serde(default)]
    names: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MctError {
    #[error("gate {gate}: wire {wire} out of range for width {width}")]
    WireOutOfRange { gate: usize, wire: u32, width: u32 },
    #[error("gate {gate}: target {target} is also a control")]
    TargetIsControl { gate: usize, target: u32 },
    #[error("gate {gate}: control {wire} repeated")]
    RepeatedControl { gate: usize, wire: u32 },
    #[error("input has {got} bits, circuit width is {width}")]
    LengthMismatch { got: usize, width: u32 },
    #[error("width {0} too large for bit-mask simulation")]
    TooWide(u32),
}

impl MctCircuit {
    pub fn new(width: u32, gates: Vec<MctGate>) -> Result<Self, MctError> {
        for (i, g) in gates.iter().enumerate() {
            for &w in g.controls.iter().chain([&g.target]) {
                if w >= width {
                    return Err(MctError::WireOutOfRange { gate: i, wire: w, width });
                }
            }
            if g.controls.contains(&g.target) {
                return Err(MctError::TargetIsControl { gate: i, target: g.target });
            }
            let mut seen = g.controls.clone();
            seen.sort_unstable();
            if let Some(w) = seen.windows(2).find(|p| p[0] == p[1]) {
                return Err(MctError::RepeatedControl { gate: i, wire: w[0] });
            }
        }
        Ok(MctCircuit { width, gates, ancillae: 0, names: Vec::new() })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = names;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn gates(&self) -> &[MctGate] {
        &self.gates
    }

    pub fn ancillae(&self) -> u32 {
        self.ancillae
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn max_controls(&self) -> usize {
        self.gates.iter().map(|g| g.controls.len()).max().unwrap_or(0)
    }

    pub fn toffoli_count(&self) -> usize {
        self.gates.iter().filter(|g| g.controls.len() == 2).count()
    }
}

/// Rewrites every gate with `n >= 3` controls as `2n - 3` Toffolis over
/// `n - 2` clean ancillae appended after the existing wires. Ancillae are
/// shared between gates and returned to zero after each one.
pub fn decompose_mct(c: &MctCircuit) -> MctCircuit {
    let extra = c.max_controls().saturating_sub(2) as u32;
    let first = c.width;
    let mut gates = Vec::new();
    for g in &c.gates {
        let n = g.controls.len();
        if n <= 2 {
            gates.push(g.clone());
            continue;
        }
        let cs = &g.controls;
        let anc = |i: usize| first + i as u32;
        // anc(0) = c0 & c1, anc(i) = anc(i-1) & c(i+1).
        let mut chain = vec![MctGate::new(vec![cs[0], cs[1]], anc(0))];
        for i in 1..n - 2 {
            chain.push(MctGate::new(vec![anc(i - 1), cs[i + 1]], anc(i)));
        }
        gates.extend(chain.iter().cloned());
        gates.push(MctGate::new(vec![anc(n - 3), cs[n - 1]], g.target));
        gates.extend(chain.into_iter().rev());
    }
    let mut names = c.names.clone();
    if !names.is_empty() {
        names.extend((0..extra).map(|i| format!("anc{i}")));
    }
    MctCircuit { width: c.width + extra, gates, ancillae: c.ancillae + extra, names }
}

/// Classical simulation on a bit mask (bit `i` is wire `i`).
pub fn simulate_bits(c: &MctCircuit, mut state: u64) -> Result<u64, MctError> {
    if c.width > 64 {
        return Err(MctError::TooWide(c.width));
    }
    for g in &c.gates {
        let mask = g.controls.iter().fold(0u64, |m, &w| m | 1 << w);
        if state & mask == mask {
            state ^= 1 << g.target;
        }
    }
    Ok(state)
}

pub fn simulate_permutation(c: &MctCircuit, input: &[bool]) -> Result<Vec<bool>, MctError> {
    if input.len() != c.width as usize {
        return Err(MctError::LengthMismatch { got: input.len(), width: c.width });
    }
    let mut state = input.to_vec();
    for g in &c.gates {
        if g.controls.iter().all(|&w| state[w as usize]) {
            state[g.target as usize] ^= true;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toffoli() -> MctCircuit {
        MctCircuit::new(3, vec![MctGate::new(vec![0, 1], 2)]).unwrap()
    }

    #[test]
    fn toffoli_truth() {
        let c = toffoli();
        assert_eq!(simulate_permutation(&c, &[true, true, false]).unwrap(), vec![true, true, true]);
        assert_eq!(simulate_permutation(&c, &[true, false, false]).unwrap(), vec![true, false, false]);
        assert!(matches!(simulate_permutation(&c, &[true]), Err(MctError::LengthMismatch { .. })));
    }

    #[test]
    fn palindrome_is_identity() {
        let gates = vec![
            MctGate::new(vec![0, 1], 2),
            MctGate::new(vec![2], 3),
            MctGate::new(vec![0, 1, 3], 4),
        ];
        let mut twice = gates.clone();
        twice.extend(gates.into_iter().rev());
        let c = MctCircuit::new(5, twice).unwrap();
        for x in 0..32 {
            assert_eq!(simulate_bits(&c, x).unwrap(), x);
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(MctCircuit::new(3, vec![MctGate::new(vec![0], 3)]), Err(MctError::WireOutOfRange { .. })));
        assert!(matches!(MctCircuit::new(3, vec![MctGate::new(vec![1], 1)]), Err(MctError::TargetIsControl { .. })));
        assert!(matches!(
            MctCircuit::new(3, vec![MctGate::new(vec![0, 0], 1)]),
            Err(MctError::RepeatedControl { .. })
        ));
    }

    #[test]
    fn decomposition_counts() {
        let c = toffoli();
        assert_eq!(decompose_mct(&c), c);
        for n in 3..=6u32 {
            let c = MctCircuit::new(n + 1, vec![MctGate::new((0..n).collect(), n)]).unwrap();
            let d = decompose_mct(&c);
            assert_eq!(d.gates().len() as u32, 2 * n - 3);
            assert_eq!(d.ancillae(), n - 2);
            assert_eq!(d.max_controls(), 2);
        }
    }

    #[test]
    fn decomposition_preserves_permutation() {
        let c = MctCircuit::new(6, vec![MctGate::new(vec![0, 1, 2, 3, 4], 5)]).unwrap();
        let d = decompose_mct(&c);
        let data = (1u64 << c.width()) - 1;
        for x in 0..1u64 << c.width() {
            let y = simulate_bits(&d, x).unwrap();
            assert_eq!(y & data, simulate_bits(&c, x).unwrap());
            assert_eq!(y & !data, 0, "ancillae must return to zero");
        }
    }
}

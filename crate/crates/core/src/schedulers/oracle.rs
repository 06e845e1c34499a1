//! Heralded distillation outcomes.
//!
//! A distillation's success or failure is only known once it has run. The
//! schedulers ask an oracle for each trial's verdict; the oracle may be
//! random but replayable, adversarial (worst case), or a fixed script.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::icm::InjectedType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Success,
    Fail,
}

impl Verdict {
    pub fn is_success(self) -> bool {
        self == Verdict::Success
    }
}

/// Where a trial sits: its global per-type index, and its position inside
/// the batch or sequence that was started for one need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSlot {
    pub index: u64,
    pub position: u64,
    pub group_size: u64,
    /// Successes the group is guaranteed to contain.
    pub required: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("scripted verdicts for type {kind} exhausted at trial {index}")]
    Exhausted { kind: InjectedType, index: u64 },
    #[error("invalid oracle spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum HeraldOracle {
    /// Verdict of trial `k` of type `t` is a pure function of `(seed, t, k)`.
    Stochastic { seed: u64, p_fail_a: f64, p_fail_y: f64 },
    /// Exactly the guaranteed successes per group, positioned last.
    WorstCase,
    /// Per-type verdict lists (`true` = success), read by global trial index.
    Scripted { a: Vec<bool>, y: Vec<bool> },
}

impl HeraldOracle {
    pub fn stochastic(seed: u64, p_f: f64) -> Self {
        HeraldOracle::Stochastic { seed, p_fail_a: p_f, p_fail_y: p_f }
    }

    /// Parses a scripted-verdict document: `{"A": [bool...], "Y": [bool...]}`.
    pub fn scripted_from_json(bytes: &[u8]) -> Result<Self, OracleError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Script {
            #[serde(rename = "A", default)]
            a: Vec<bool>,
            #[serde(rename = "Y", default)]
            y: Vec<bool>,
        }
        let script: Script = serde_json::from_slice(bytes).map_err(|e| OracleError::Spec(e.to_string()))?;
        Ok(HeraldOracle::Scripted { a: script.a, y: script.y })
    }

    pub fn sample(&self, kind: InjectedType, slot: TrialSlot) -> Result<Verdict, OracleError> {
        sample_verdict(self, kind, slot)
    }
}

/// Uniform draw in `[0, 1)` for trial `index` of `kind` under `seed`.
fn uniform(seed: u64, kind: InjectedType, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(kind.index() as u64);
    rng.set_word_pos(u128::from(index) * 2);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_verdict(oracle: &HeraldOracle, kind: InjectedType, slot: TrialSlot) -> Result<Verdict, OracleError> {
    let success = match oracle {
        HeraldOracle::Stochastic { seed, p_fail_a, p_fail_y } => {
            let p = match kind {
                InjectedType::A => *p_fail_a,
                InjectedType::Y => *p_fail_y,
            };
            uniform(*seed, kind, slot.index) >= p
        }
        HeraldOracle::WorstCase => slot.position + slot.required >= slot.group_size,
        HeraldOracle::Scripted { a, y } => {
            let list = match kind {
                InjectedType::A => a,
                InjectedType::Y => y,
            };
            *list
                .get(slot.index as usize)
                .ok_or(OracleError::Exhausted { kind, index: slot.index })?
        }
    };
    Ok(if success { Verdict::Success } else { Verdict::Fail })
}

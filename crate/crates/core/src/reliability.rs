//! Distillation redundancy: how many extra trials keep the computation's
//! failure probability under budget.
//!
//! The acceptance condition is `1 - F(s, n_t, p_f) < p_c`, where `F` is the
//! binomial CDF: the probability that at most `s` of `n_t` independent
//! trials fail. `F` is a sum over `k = 0..=s`, not a product.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReliabilityError {
    #[error("p_f = {0} outside [0, 1)")]
    FailureProbability(f64),
    #[error("p_c = {0} outside (0, 1)")]
    Budget(f64),
    #[error("s = {s} exceeds n_t = {n_t}")]
    SupportExceeded { s: u64, n_t: u64 },
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
}

/// How the failure budget `p_c` is shared between independent guarantees
/// (one per injected type offline, one per batch online).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// Each guarantee gets the full `p_c`.
    #[default]
    PerGuarantee,
    /// `p_c` is divided evenly by the number of guarantees.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityParams {
    p_f: f64,
    p_c: f64,
    #[serde(default)]
    budget: BudgetMode,
}

impl ReliabilityParams {
    pub fn new(p_f: f64, p_c: f64) -> Result<Self, ReliabilityError> {
        if !(0.0..1.0).contains(&p_f) {
            return Err(ReliabilityError::FailureProbability(p_f));
        }
        if !(p_c > 0.0 && p_c < 1.0) {
            return Err(ReliabilityError::Budget(p_c));
        }
        Ok(ReliabilityParams { p_f, p_c, budget: BudgetMode::PerGuarantee })
    }

    pub fn with_budget(mut self, budget: BudgetMode) -> Self {
        self.budget = budget;
        self
    }

    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    pub fn p_c(&self) -> f64 {
        self.p_c
    }

    pub fn budget(&self) -> BudgetMode {
        self.budget
    }

    /// Parameters for one of `guarantees` independent guarantees.
    pub fn per_guarantee(&self, guarantees: u32) -> ReliabilityParams {
        match self.budget {
            BudgetMode::PerGuarantee => *self,
            BudgetMode::Global => ReliabilityParams {
                p_c: self.p_c / f64::from(guarantees.max(1)),
                ..*self
            },
        }
    }
}

impl Default for ReliabilityParams {
    fn default() -> Self {
        ReliabilityParams { p_f: 0.2, p_c: 0.001, budget: BudgetMode::PerGuarantee }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraCount {
    /// Additional trials beyond the required successes.
    pub s: u64,
    /// Total trials to schedule.
    pub n_t: u64,
}

fn check_p(p: f64) -> Result<(), ReliabilityError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ReliabilityError::Probability(p))
    }
}

/// Natural logs of the binomial pmf terms `k = 0..=n` for `0 < p < 1`,
/// via the term ratio `(n - k) / (k + 1) * p / (1 - p)`.
fn log_terms(n: u64, p: f64) -> impl Iterator<Item = f64> {
    let log_ratio = p.ln() - (-p).ln_1p();
    let mut log_term = n as f64 * (-p).ln_1p();
    (0..=n).map(move |k| {
        let current = log_term;
        log_term += ((n - k) as f64).ln() - ((k + 1) as f64).ln() + log_ratio;
        current
    })
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Probability that at most `s` of `n_t` independent trials fail when each
/// fails with probability `p_f`.
pub fn failure_cdf(s: u64, n_t: u64, p_f: f64) -> Result<f64, ReliabilityError> {
    check_p(p_f)?;
    if s > n_t {
        return Err(ReliabilityError::SupportExceeded { s, n_t });
    }
    if s == n_t || p_f == 0.0 {
        return Ok(1.0);
    }
    if p_f == 1.0 {
        return Ok(0.0);
    }
    // Sum whichever side is smaller to keep the complement accurate.
    if s < n_t / 2 {
        Ok(log_sum_exp(log_terms(n_t, p_f).take(s as usize + 1)).exp().min(1.0))
    } else {
        Ok((1.0 - failure_tail(s, n_t, p_f)?).max(0.0))
    }
}

/// Probability that more than `s` of `n_t` trials fail, `1 - failure_cdf`,
/// summed directly so small tails keep full relative precision.
pub fn failure_tail(s: u64, n_t: u64, p_f: f64) -> Result<f64, ReliabilityError> {
    check_p(p_f)?;
    if s > n_t {
        return Err(ReliabilityError::SupportExceeded { s, n_t });
    }
    if s == n_t || p_f == 0.0 {
        return Ok(0.0);
    }
    if p_f == 1.0 {
        return Ok(1.0);
    }
    Ok(log_sum_exp(log_terms(n_t, p_f).skip(s as usize + 1)).exp().min(1.0))
}

/// Smallest `s` such that scheduling `n_i + s` trials leaves fewer than
/// `n_i` successes with probability below `p_c`.
pub fn min_extra_offline(n_i: u64, p: &ReliabilityParams) -> ExtraCount {
    let mut s = 0;
    loop {
        let n_t = n_i + s;
        let tail = failure_tail(s, n_t, p.p_f).expect("s <= n_t and p_f validated");
        if tail < p.p_c {
            return ExtraCount { s, n_t };
        }
        s += 1;
    }
}

/// Redundancy for one initialisation at a time: smallest `s` with
/// `p_f^(s+1) < p_c`.
pub fn min_extra_online(p: &ReliabilityParams) -> ExtraCount {
    min_extra_offline(1, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p_f: f64, p_c: f64) -> ReliabilityParams {
        ReliabilityParams::new(p_f, p_c).unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert!((failure_cdf(0, 1, 0.2).unwrap() - 0.8).abs() < 1e-15);
        for p in [0.0, 0.2, 0.7, 1.0] {
            assert_eq!(failure_cdf(9, 9, p).unwrap(), 1.0);
        }
        assert!((failure_cdf(4, 5, 0.2).unwrap() - 0.99968).abs() < 1e-12);
    }

    #[test]
    fn cdf_domain_errors() {
        assert_eq!(failure_cdf(6, 5, 0.2), Err(ReliabilityError::SupportExceeded { s: 6, n_t: 5 }));
        assert!(matches!(failure_cdf(0, 5, 1.5), Err(ReliabilityError::Probability(_))));
        assert!(matches!(failure_cdf(0, 5, -0.1), Err(ReliabilityError::Probability(_))));
    }

    #[test]
    fn cdf_survives_large_n() {
        // 0.8^5000 underflows f64; the log-space sum must not.
        let f = failure_cdf(1200, 5000, 0.2).unwrap();
        assert!(f > 0.999 && f <= 1.0, "{f}");
        let g = failure_cdf(900, 5000, 0.2).unwrap();
        assert!(g < 1e-3, "{g}");
    }

    #[test]
    fn offline_examples() {
        assert_eq!(min_extra_offline(14, &params(0.2, 0.001)), ExtraCount { s: 12, n_t: 26 });
        assert_eq!(min_extra_offline(28, &params(0.2, 0.001)), ExtraCount { s: 18, n_t: 46 });
        assert_eq!(min_extra_offline(5, &params(0.0, 0.001)), ExtraCount { s: 0, n_t: 5 });
    }

    #[test]
    fn online_examples() {
        assert_eq!(min_extra_online(&params(0.2, 0.001)), ExtraCount { s: 4, n_t: 5 });
        assert_eq!(min_extra_online(&params(0.5, 0.001)), ExtraCount { s: 9, n_t: 10 });
        assert_eq!(min_extra_online(&params(0.0, 0.3)), ExtraCount { s: 0, n_t: 1 });
    }

    #[test]
    fn param_validation() {
        assert!(ReliabilityParams::new(1.0, 0.1).is_err());
        assert!(ReliabilityParams::new(0.2, 0.0).is_err());
        assert!(ReliabilityParams::new(0.2, 1.0).is_err());
        assert!(ReliabilityParams::new(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn global_budget_splits_p_c() {
        let p = params(0.2, 0.001).with_budget(BudgetMode::Global);
        let half = p.per_guarantee(2);
        assert!((half.p_c() - 0.0005).abs() < 1e-18);
        assert_eq!(params(0.2, 0.001).per_guarantee(2).p_c(), 0.001);
        // 0.2^5 = 3.2e-4 < 5e-4, so the online count is unchanged at half budget...
        assert_eq!(min_extra_online(&half).s, 4);
        // ...but a tenth of it needs one more trial.
        assert_eq!(min_extra_online(&p.per_guarantee(10)).s, 5);
    }
}

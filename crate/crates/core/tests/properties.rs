use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distillery::bench::corpus::{random_icm_circuit, random_mct_circuit};
use distillery::bench::{decompose_mct, expand_to_icm_skeleton, monte_carlo, simulate_bits, SkeletonParams};
use distillery::icm::{parse_circuit, CostModel, IcmCircuit, OpKind};
use distillery::layout::{validate_schedule, PlacementTag};
use distillery::reliability::{failure_cdf, min_extra_offline, min_extra_online, ReliabilityParams};
use distillery::schedulers::{
    run, schedule_online, AlapsStrategy, Algorithm, AsapLayout, HeraldOracle, OnlineOptions, OnlinePolicy,
    SchedulerLimits,
};

const ALGOS: [Algorithm; 4] = [
    Algorithm::Asap { layout: AsapLayout::Column },
    Algorithm::Alapt,
    Algorithm::Alaps { strategy: AlapsStrategy::RepeatUntilSuccess },
    Algorithm::Alaps { strategy: AlapsStrategy::FixedSequence },
];

fn circuit(seed: u64, width: u32, max_ops: usize) -> IcmCircuit {
    random_icm_circuit(&mut ChaCha8Rng::seed_from_u64(seed), "prop", width, max_ops)
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Exact `P(more than s of n fail) < c / d` at `p_f = a / b`.
fn tail_below(s: u64, n: u64, a: u64, b: u64, c: u64, d: u64) -> bool {
    let mut num = BigUint::zero();
    for k in s + 1..=n {
        num += binomial(n, k) * BigUint::from(a).pow(k as u32) * BigUint::from(b - a).pow((n - k) as u32);
    }
    num * d < BigUint::from(b).pow(n as u32) * c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn circuit_json_round_trip(seed in any::<u64>(), width in 2u32..12) {
        let c = circuit(seed, width, 120);
        let back = parse_circuit(c.to_json().as_bytes()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn effective_cost_adds_pad_only_to_padded_kinds(pad in 0u32..5, mask in 0u8..32) {
        let base = CostModel::default();
        let padded: Vec<OpKind> = OpKind::ALL.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, k)| k).collect();
        let cm = CostModel::new(OpKind::ALL.map(|k| (k, base.base(k))), pad, padded.clone()).unwrap();
        for kind in OpKind::ALL {
            let eff = cm.effective(kind);
            let extra = if padded.contains(&kind) { pad } else { 0 };
            prop_assert_eq!(eff.space, base.base(kind).space + extra);
            prop_assert_eq!(eff.time, base.base(kind).time + u64::from(extra));
        }
    }

    #[test]
    fn cdf_nondecreasing_in_s(n in 1u64..200, p_f in 0.0f64..1.0) {
        let mut last = 0.0;
        for s in 0..=n {
            let v = failure_cdf(s, n, p_f).unwrap();
            prop_assert!(v + 1e-12 >= last, "F({s}) = {v} < {last}");
            last = v;
        }
        prop_assert_eq!(failure_cdf(n, n, p_f).unwrap(), 1.0);
    }

    #[test]
    fn online_is_offline_for_one(p_f in 0.0f64..0.95, exp in 1i32..9) {
        let rel = ReliabilityParams::new(p_f, 10f64.powi(-exp)).unwrap();
        prop_assert_eq!(min_extra_offline(1, &rel), min_extra_online(&rel));
    }

    #[test]
    fn solver_is_minimal_against_exact_oracle(
        b in 2u64..21,
        a_frac in 0.0f64..1.0,
        d_exp in 1u32..7,
        n_i in 1u64..80,
    ) {
        let a = 1 + ((b - 2) as f64 * a_frac) as u64;
        let d = 10u64.pow(d_exp);
        let rel = ReliabilityParams::new(a as f64 / b as f64, 1.0 / d as f64).unwrap();
        let e = min_extra_offline(n_i, &rel);
        prop_assert_eq!(e.n_t, n_i + e.s);
        prop_assert!(tail_below(e.s, e.n_t, a, b, 1, d), "s = {} does not meet the budget", e.s);
        if e.s > 0 {
            prop_assert!(!tail_below(e.s - 1, e.n_t - 1, a, b, 1, d), "s = {} is not minimal", e.s);
        }
    }

    #[test]
    fn solver_monotone(n_i in 1u64..120, p_f in 0.01f64..0.6, exp in 2i32..7) {
        let rel = ReliabilityParams::new(p_f, 10f64.powi(-exp)).unwrap();
        let s = min_extra_offline(n_i, &rel).s;
        prop_assert!(min_extra_offline(n_i + 1, &rel).s >= s);
        let worse = ReliabilityParams::new((p_f + 0.05).min(0.99), rel.p_c()).unwrap();
        prop_assert!(min_extra_offline(n_i, &worse).s >= s);
        let looser = ReliabilityParams::new(p_f, rel.p_c() * 10.0).unwrap();
        prop_assert!(min_extra_offline(n_i, &looser).s <= s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn schedules_validate_and_link_once(seed in any::<u64>(), width in 2u32..12, oracle_seed in any::<u64>()) {
        let c = circuit(seed, width, 200);
        let cm = CostModel::default();
        let rel = ReliabilityParams::default();
        for oracle in [HeraldOracle::WorstCase, HeraldOracle::stochastic(oracle_seed, 0.2)] {
            for algo in ALGOS {
                let out = run(algo, &c, &cm, &rel, &oracle, SchedulerLimits::default()).unwrap();
                let v = validate_schedule(&out.schedule, &c, &cm);
                prop_assert!(v.is_empty(), "{algo:?}: {v:?}");
                prop_assert_eq!(out.metrics.bb, out.metrics.t * out.metrics.s);

                let injected = c.ops().iter().filter(|op| op.kind.is_injected()).count();
                prop_assert_eq!(out.schedule.consumer_links.len(), injected);
                let used: HashSet<_> = out.schedule.consumer_links.values().collect();
                prop_assert_eq!(used.len(), injected, "a trial was consumed twice");
                for pid in out.schedule.consumer_links.values() {
                    let tag = out.schedule.get(*pid).unwrap().tag;
                    prop_assert_eq!(tag, PlacementTag::DistillTrialSuccess);
                }
            }
        }
    }

    #[test]
    fn replay_is_byte_identical(seed in any::<u64>(), oracle_seed in any::<u64>()) {
        let c = circuit(seed, 6, 120);
        let cm = CostModel::default();
        let rel = ReliabilityParams::default();
        let oracle = HeraldOracle::stochastic(oracle_seed, 0.3);
        for algo in ALGOS {
            let a = run(algo, &c, &cm, &rel, &oracle, SchedulerLimits::default()).unwrap();
            let b = run(algo, &c, &cm, &rel, &oracle, SchedulerLimits::default()).unwrap();
            prop_assert_eq!(a.schedule.to_json(), b.schedule.to_json());
            prop_assert_eq!(a.trace, b.trace);
        }
    }

    #[test]
    fn matrix_with_n_t_rows_is_column(seed in any::<u64>()) {
        let c = circuit(seed, 8, 150);
        let cm = CostModel::default();
        let rel = ReliabilityParams::default();
        let col = run(ALGOS[0], &c, &cm, &rel, &HeraldOracle::WorstCase, SchedulerLimits::default()).unwrap();
        let rows = [c.stats().inject_a, c.stats().inject_y]
            .iter()
            .filter(|&&n| n > 0)
            .map(|&n| min_extra_offline(u64::from(n), &rel).n_t as u32)
            .max()
            .unwrap_or(1);
        let mat = run(
            Algorithm::Asap { layout: AsapLayout::Matrix { rows } },
            &c, &cm, &rel, &HeraldOracle::WorstCase, SchedulerLimits::default(),
        ).unwrap();
        prop_assert_eq!(mat.metrics, col.metrics);
    }

    #[test]
    fn pooling_never_increases_t(
        seed in any::<u64>(),
        width in 2u32..10,
        script_seed in any::<u64>(),
        success in 0.3f64..0.95,
    ) {
        let c = circuit(seed, width, 150);
        let cm = CostModel::default();
        let rel = ReliabilityParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(script_seed);
        let mut script = || (0..50_000).map(|_| rng.random_bool(success)).collect::<Vec<_>>();
        let oracle = HeraldOracle::Scripted { a: script(), y: script() };
        let policies = [
            OnlinePolicy::Parallel,
            OnlinePolicy::Sequential { strategy: AlapsStrategy::FixedSequence },
        ];
        for policy in policies {
            let go = |pooling| schedule_online(&c, &cm, &rel, &oracle, SchedulerLimits::default(), policy, OnlineOptions { pooling });
            let (pooled, fresh) = (go(true).unwrap(), go(false).unwrap());
            prop_assert!(pooled.metrics.t <= fresh.metrics.t, "{policy:?}: {} > {}", pooled.metrics.t, fresh.metrics.t);
        }
    }

    #[test]
    fn decomposition_preserves_function(seed in any::<u64>(), width in 2u32..9, gates in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mct = random_mct_circuit(&mut rng, width, gates, width as usize - 1);
        let dec = decompose_mct(&mct);
        prop_assert!(dec.max_controls() <= 2);
        let mask = (1u64 << width) - 1;
        for x in 0..1u64 << width {
            let y = simulate_bits(&dec, x).unwrap();
            prop_assert_eq!(y, simulate_bits(&mct, x).unwrap());
            prop_assert_eq!(y & !mask, 0, "ancillae not restored");
        }
    }

    #[test]
    fn skeletons_have_twice_as_many_y(seed in any::<u64>(), width in 3u32..9, gates in 1usize..5, per in 1u32..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mct = decompose_mct(&random_mct_circuit(&mut rng, width, gates, 4));
        let params = SkeletonParams { a_per_toffoli: per, internal_cnots: seed % 2 == 0 };
        let c = expand_to_icm_skeleton(&mct, params, "s").unwrap();
        let s = c.stats();
        prop_assert_eq!(s.inject_y, 2 * s.inject_a);
        prop_assert_eq!(s.inject_a as usize, per as usize * mct.toffoli_count());
        prop_assert!(parse_circuit(c.to_json().as_bytes()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mean_bb_below_worst_case(seed in any::<u64>(), width in 2u32..8, p_f in 0.05f64..0.5) {
        let c = circuit(seed, width, 60);
        prop_assume!(c.stats().inject_a + c.stats().inject_y > 0);
        let cm = CostModel::default();
        let rel = ReliabilityParams::new(p_f, 0.001).unwrap();
        for algo in &ALGOS[2..] {
            let worst = run(*algo, &c, &cm, &rel, &HeraldOracle::WorstCase, SchedulerLimits::default()).unwrap();
            let mc = monte_carlo(&c, &cm, &rel, *algo, 300, seed).unwrap();
            prop_assert!(mc.bb.mean <= worst.metrics.bb as f64, "{algo:?}: {} > {}", mc.bb.mean, worst.metrics.bb);
        }
    }
}

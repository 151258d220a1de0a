use std::collections::{HashMap, HashSet};

use proptest::prelude::*;

use unibandit::processes::{
    c2_not_c4_block_start, dyadic_class, DistinctSchedule, DupBlockLayout, ProcessSpec, Stream,
};
use unibandit::sets::Region;
use unibandit::RngStream;

fn all_specs() -> Vec<ProcessSpec> {
    vec![
        ProcessSpec::IidUniform,
        ProcessSpec::FiniteSupportIid {
            points: vec![0.1, 0.5, 0.9],
            weights: Some(vec![0.2, 0.3, 0.5]),
        },
        ProcessSpec::DeterministicC2 {
            schedule: DistinctSchedule::sqrt(),
        },
        ProcessSpec::DupBlock {
            eps_log2: 2,
            base: 50,
            periods: 3,
            max_block: 1 << 20,
        },
        ProcessSpec::C2NotC4,
        ProcessSpec::C4NotC6,
        ProcessSpec::C5Scheduled { growth: 2, cap: 16 },
        ProcessSpec::Condition8Witness,
    ]
}

/// The same uid always carries the same coordinate, and distinct uids
/// carry distinct coordinates.
fn assert_uid_consistency(s: &Stream) {
    let mut by_uid: HashMap<u64, u64> = HashMap::new();
    let mut by_coord: HashMap<u64, u64> = HashMap::new();
    for x in s.points.iter().filter(|x| !x.is_idle()) {
        assert!((0.0..=1.0).contains(&x.coord));
        let bits = x.coord.to_bits();
        assert_eq!(*by_uid.entry(x.uid).or_insert(bits), bits, "uid {}", x.uid);
        assert_eq!(*by_coord.entry(bits).or_insert(x.uid), x.uid, "coord {}", x.coord);
    }
}

#[test]
fn every_process_replays_and_is_consistent() {
    for spec in all_specs() {
        let a = spec.generate(20_000, RngStream::root(7)).unwrap();
        let b = spec.generate(20_000, RngStream::root(7)).unwrap();
        assert_eq!(a.points, b.points, "{spec:?}");
        assert_eq!(a.notes, b.notes, "{spec:?}");
        assert_eq!(a.len(), 20_000);
        assert_uid_consistency(&a);
        let c = spec.generate(20_000, RngStream::root(8)).unwrap();
        let coords = |s: &Stream| s.points.iter().map(|x| x.coord.to_bits()).collect::<Vec<_>>();
        assert_ne!(coords(&a), coords(&c), "{spec:?} ignores its seed");
    }
}

#[test]
fn zero_horizon_is_rejected() {
    assert!(ProcessSpec::IidUniform.generate(0, RngStream::root(0)).is_err());
}

#[test]
fn iid_uniform_has_uniform_marginal() {
    let s = ProcessSpec::IidUniform
        .generate(100_000, RngStream::root(1))
        .unwrap();
    let mut bins = [0u32; 10];
    for x in &s.points {
        assert!(x.coord > 0.0 && x.coord < 1.0);
        bins[(x.coord * 10.0) as usize] += 1;
    }
    // each bin: mean 10^4, sd ≈ 95
    for b in bins {
        assert!((b as f64 - 10_000.0).abs() < 500.0, "{bins:?}");
    }
    let uids: HashSet<u64> = s.points.iter().map(|x| x.uid).collect();
    assert_eq!(uids.len(), s.len());
}

#[test]
fn finite_support_frequencies_match_weights() {
    let w = [0.2, 0.3, 0.5];
    let n = 60_000;
    let s = ProcessSpec::FiniteSupportIid {
        points: vec![0.1, 0.5, 0.9],
        weights: Some(w.to_vec()),
    }
    .generate(n, RngStream::root(2))
    .unwrap();
    for (j, &p) in w.iter().enumerate() {
        let hits = s.points.iter().filter(|x| x.uid == j as u64 + 1).count() as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits / n as f64 - p).abs() < 4.0 * se);
    }
}

#[test]
fn deterministic_c2_has_exact_distinct_counts() {
    let s = ProcessSpec::DeterministicC2 {
        schedule: DistinctSchedule::Power { exponent: 0.5 },
    }
    .generate(10_000, RngStream::root(3))
    .unwrap();
    let mut seen = HashSet::new();
    for (n, x) in s.points.iter().enumerate() {
        seen.insert(x.uid);
        let t = n as f64 + 1.0;
        assert_eq!(seen.len() as u64, t.sqrt().ceil() as u64, "T = {t}");
    }
}

#[test]
fn dup_block_blocks_are_verbatim_copies() {
    let layout = DupBlockLayout::new(2, 50, 3, 1 << 20).unwrap();
    let horizon = layout.periods[2].block_end - 1;
    let s = ProcessSpec::DupBlock {
        eps_log2: 2,
        base: 50,
        periods: 3,
        max_block: 1 << 20,
    }
    .generate(horizon, RngStream::root(4))
    .unwrap();
    let at = |t: u64| s.points[(t - 1) as usize];
    let mut fresh_seen = HashSet::new();
    for (i, per) in layout.periods.iter().enumerate() {
        // T^i = (1+i)! · 2^k · T0 and k_i = (1+i)! · T0
        let fact: u64 = (1..=i as u64 + 1).product();
        assert_eq!(per.cells, fact * 50);
        assert_eq!(per.start, per.cells * 4);
        assert_eq!(per.block_end, 2 * per.start);
        for t in per.start..per.block_end {
            let x = at(t);
            let first = at(per.start + (t - per.start) % per.cells);
            assert_eq!(x, first);
            assert_eq!(x.coord.to_bits(), first.coord.to_bits());
            if t < per.start + per.cells {
                assert!(fresh_seen.insert(x.uid), "fresh draw repeats an older one");
            }
        }
        if i + 1 < layout.periods.len() {
            for t in per.block_end..per.end {
                assert!(at(t).is_idle());
            }
        }
    }
    for t in 1..layout.periods[0].start {
        assert!(at(t).is_idle());
    }
}

#[test]
fn c2_not_c4_blocks_cycle_on_their_carriers() {
    let horizon = 2 * c2_not_c4_block_start(5).unwrap() - 1;
    let s = ProcessSpec::C2NotC4
        .generate(horizon, RngStream::root(5))
        .unwrap();
    let at = |t: u64| s.points[(t - 1) as usize];
    let mut last_end = 1;
    for k in 1..=5u32 {
        let start = c2_not_c4_block_start(k).unwrap();
        assert_eq!(start, (1u64 << k) * (1..=k as u64).product::<u64>());
        for t in last_end..start {
            assert!(at(t).is_idle());
        }
        let i = dyadic_class(k as u64);
        assert_eq!(i, k.trailing_zeros() + 1);
        let n = 1u64 << (31 - i.leading_zeros()); // 2^⌊log2 i⌋
        let m = start / n;
        let carrier = Region::dyadic_carrier(i);
        for t in start..2 * start {
            let x = at(t);
            assert!(carrier.contains(x.coord));
            assert_eq!(x, at(start + (t - start) % m));
        }
        let distinct: HashSet<u64> = (start..2 * start).map(|t| at(t).uid).collect();
        assert_eq!(distinct.len() as u64, m);
        last_end = 2 * start;
    }
}

#[test]
fn c4_not_c6_stages_repeat_comb_draws() {
    let s = ProcessSpec::C4NotC6
        .generate((1 << 14) - 1, RngStream::root(6))
        .unwrap();
    let at = |t: u64| s.points[(t - 1) as usize];
    assert!(at(1).is_idle());
    for l in 1..14u32 {
        let p = l.trailing_zeros() + 1;
        let stage = 1u64 << l;
        let comb = Region::DyadicComb { p, l };
        let period = 1u64 << l.saturating_sub(p);
        for t in stage..2 * stage {
            let x = at(t);
            if p <= l {
                assert!(comb.contains(x.coord), "l={l} t={t}");
                assert_eq!(x, at(stage + (t - stage) % period));
            }
        }
    }
}

#[test]
fn condition8_witness_runs() {
    let s = ProcessSpec::Condition8Witness
        .generate((1 << 13) - 1, RngStream::root(7))
        .unwrap();
    let at = |t: u64| s.points[(t - 1) as usize];
    assert!(at(1).is_idle());
    for k in 1..13u32 {
        let i = k.trailing_zeros() + 1;
        let n = 1u64 << (31 - i.leading_zeros());
        let carrier = Region::dyadic_carrier(i);
        for t in (1u64 << k)..(2u64 << k) {
            assert!(carrier.contains(at(t).coord));
            // X_t depends on ⌊t / n_i⌋ only
            let run_start = t - t % n;
            if run_start >= 1u64 << k {
                assert_eq!(at(t), at(run_start));
            }
        }
    }
}

#[test]
fn c5_scheduled_run_lengths() {
    let (growth, cap) = (2u32, 8u64);
    let s = ProcessSpec::C5Scheduled { growth, cap }
        .generate((1 << 12) - 1, RngStream::root(8))
        .unwrap();
    // maximal runs of equal uids, split at stage boundaries
    for l in 0..12u32 {
        let want = (1u64 << (l / growth)).min(cap);
        let (lo, hi) = (1u64 << l, 2u64 << l);
        let mut t = lo;
        while t < hi {
            let uid = s.points[(t - 1) as usize].uid;
            let mut len = 0;
            while t < hi && s.points[(t - 1) as usize].uid == uid {
                len += 1;
                t += 1;
            }
            assert!(len == want || t == hi, "stage {l}: run {len}, expected {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prefixes_are_stable(seed in any::<u64>(), which in 0usize..8, short in 1u64..3000) {
        let spec = &all_specs()[which];
        let long = spec.generate(3000, RngStream::root(seed)).unwrap();
        let head = spec.generate(short, RngStream::root(seed)).unwrap();
        prop_assert_eq!(&long.points[..short as usize], &head.points[..]);
    }

    #[test]
    fn duplicates_are_exact(seed in any::<u64>(), which in 0usize..8) {
        let s = all_specs()[which].generate(4000, RngStream::root(seed)).unwrap();
        assert_uid_consistency(&s);
    }
}

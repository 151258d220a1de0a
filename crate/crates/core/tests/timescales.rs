use proptest::prelude::*;

use unibandit::rng::RngStream;
use unibandit::timescales::{
    alg1_position, categories_from_scratch, category_of_count, in_first_appearance_set,
    period_of, stage, t_scale, CategoryTracker, FirstAppearanceTracker, PhaseSchedule,
};
use unibandit::ContextPoint;

/// Largest `k` with `T_i^k ≤ t`, by walking every boundary.
fn scan_period(t: u64, i: u32) -> u64 {
    let mut k = 0;
    while t_scale(i, k + 1).unwrap() <= t {
        k += 1;
    }
    k
}

/// Floating-point evaluation of `2^u (1 + v 2^-i)`, floored.
fn t_scale_float(i: u32, k: u64) -> u64 {
    let u = (k >> i) as i32;
    let v = (k & ((1 << i) - 1)) as f64;
    (2f64.powi(u) * (1.0 + v / 2f64.powi(i as i32))).floor() as u64
}

fn points(uids: &[u64]) -> Vec<ContextPoint> {
    uids.iter()
        .map(|&u| ContextPoint::new((u % 1000) as f64 / 1000.0, u + 1).unwrap())
        .collect()
}

#[test]
fn scale_values() {
    assert_eq!(t_scale(0, 3).unwrap(), 8);
    assert_eq!(t_scale(1, 3).unwrap(), 3);
    assert_eq!(t_scale(2, 9).unwrap(), 5);
    assert!(t_scale(0, 64).is_err());
}

#[test]
fn scale_matches_float_evaluation() {
    for i in 0..=8 {
        for k in 0..(30u64 << i) {
            assert_eq!(t_scale(i, k).unwrap(), t_scale_float(i, k), "i={i} k={k}");
        }
    }
}

#[test]
fn stage_starts_are_powers_of_two() {
    for i in 0..=10 {
        for u in 0..63 {
            assert_eq!(t_scale(i, u << i).unwrap(), 1u64 << u);
        }
    }
}

#[test]
fn period_of_matches_linear_scan() {
    for i in 0..=8 {
        for t in 1..=10_000u64 {
            assert_eq!(period_of(t, i), scan_period(t, i), "t={t} i={i}");
        }
    }
    assert_eq!(period_of(1, 0), 0);
    assert_eq!(period_of(5, 2), 9);
    let big = 1u64 << 40;
    assert_eq!(t_scale(3, period_of(big, 3)).unwrap(), big);
}

#[test]
fn periods_tile_without_gaps() {
    for i in 0..=6 {
        for k in 0..(20u64 << i) {
            let (start, next) = (t_scale(i, k).unwrap(), t_scale(i, k + 1).unwrap());
            assert!(start <= next);
            if start < next {
                // non-degenerate period: every time in it maps back to k
                assert_eq!(period_of(start, i), k);
                assert_eq!(period_of(next - 1, i), k);
            }
        }
    }
}

#[test]
fn first_appearance_examples() {
    // scale 1: periods start at 1, 2, 3, 4, 6, 8, 12, ...
    let xs = points(&[0, 1, 2, 3, 3, 4, 0, 0]);
    // t = 5 repeats t = 4 inside the period [4, 6)
    assert!(!in_first_appearance_set(5, 1, &xs));
    // t = 7 repeats t = 1 from an earlier period
    assert!(in_first_appearance_set(7, 1, &xs));
    // t = 8 starts a new period, so it is a first appearance again
    assert!(in_first_appearance_set(8, 1, &xs));
    // every globally new context is a first appearance at every scale
    for i in 0..5 {
        for t in [1, 2, 3, 4, 6] {
            assert!(in_first_appearance_set(t, i, &xs));
        }
    }
}

#[test]
fn desk_schedule_position() {
    let sched = PhaseSchedule::linear(4).unwrap();
    let pos = alg1_position(20, &sched);
    assert_eq!((pos.phase, pos.stage), (1, 4));
    // periods of phase 1 in stage 4: [16, 24) and [24, 32)
    assert_eq!(pos.period, 0);
    assert_eq!(pos.start, 16);
    assert_eq!(t_scale(1, (4 << 1) + pos.period).unwrap(), pos.start);
    for l in 0..40 {
        assert_eq!(alg1_position(1 << l, &sched).period, 0);
    }
}

#[test]
fn alg1_grid_matches_t_scale() {
    for sched in [
        PhaseSchedule::linear(2).unwrap(),
        PhaseSchedule::affine(2, 2).unwrap(),
    ] {
        for t in 1..5_000u64 {
            let pos = alg1_position(t, &sched);
            let k = (u64::from(pos.stage) << pos.phase) + pos.period;
            assert_eq!(t_scale(pos.phase, k).unwrap(), pos.start);
            assert_eq!(t_scale(pos.phase, k + 1).unwrap(), pos.start + pos.len);
            assert!(pos.start <= t && t < pos.start + pos.len);
            assert_eq!(sched.phase(t), pos.phase);
        }
    }
}

#[test]
fn categories_by_count() {
    assert_eq!(category_of_count(1), 0);
    assert_eq!(category_of_count(4), 1);
    for p in 0..10u32 {
        for n in 4u64.pow(p)..4u64.pow(p + 1).min(4u64.pow(p) + 500) {
            assert_eq!(category_of_count(n), p);
        }
        assert_eq!(category_of_count(4u64.pow(p + 1) - 1), p);
    }
}

/// Duplicate-laden sequences: small alphabets with runs.
fn dup_sequence() -> impl Strategy<Value = Vec<u64>> {
    (1u64..12, 50usize..400).prop_flat_map(|(alphabet, len)| {
        prop::collection::vec((0..alphabet, 1usize..6), len).prop_map(|runs| {
            runs.into_iter()
                .flat_map(|(u, n)| std::iter::repeat_n(u, n))
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn first_appearance_sets_are_nested(uids in dup_sequence()) {
        let xs = points(&uids);
        let masks: Vec<Vec<bool>> = (0..=8)
            .map(|i| FirstAppearanceTracker::mask(i, &xs).unwrap())
            .collect();
        for (i, pair) in masks.windows(2).enumerate() {
            for (t, (&inner, &outer)) in pair[0].iter().zip(&pair[1]).enumerate() {
                prop_assert!(!inner || outer, "scale {i}, t = {}", t + 1);
            }
        }
    }

    #[test]
    fn tracker_matches_scan(uids in dup_sequence(), i in 0u32..8) {
        let xs = points(&uids);
        let mask = FirstAppearanceTracker::mask(i, &xs).unwrap();
        for t in 1..=xs.len() as u64 {
            prop_assert_eq!(mask[(t - 1) as usize], in_first_appearance_set(t, i, &xs));
        }
    }

    #[test]
    fn incremental_categories_match_scratch(uids in dup_sequence(), slope in 1u32..4, offset in 0u32..3) {
        let xs = points(&uids);
        let sched = PhaseSchedule::affine(slope, offset).unwrap();
        let expected = categories_from_scratch(&xs, &sched);
        let mut tracker = CategoryTracker::new();
        for (n, x) in xs.iter().enumerate() {
            let pos = alg1_position(n as u64 + 1, &sched);
            let (_, cat) = tracker.push(pos.start, x);
            prop_assert_eq!(cat, expected[n]);
        }
    }

    #[test]
    fn affine_phase_matches_scan(slope in 1u32..6, offset in 0u32..6, l in 0u32..60) {
        let sched = PhaseSchedule::affine(slope, offset).unwrap();
        let mut best = 0;
        let mut i = 0;
        while let Some(u) = sched.u(i) {
            if u > l {
                break;
            }
            best = i;
            i += 1;
        }
        prop_assert_eq!(sched.phase_of_stage(l), best);
    }

    #[test]
    fn period_of_is_monotone(t in 1u64..u64::MAX / 2, i in 0u32..12) {
        let k = period_of(t, i);
        prop_assert!(t_scale(i, k).unwrap() <= t);
        prop_assert!(period_of(t + 1, i) >= k);
        prop_assert_eq!(stage(t_scale(i, k).unwrap()), stage(t));
    }
}

#[test]
fn random_streams_keep_nesting() {
    // a longer stream than the proptest cases, from the crate's own generator
    let mut rng = RngStream::root(3);
    let uids: Vec<u64> = (0..20_000).map(|_| rng.below(300)).collect();
    let xs = points(&uids);
    let coarse = FirstAppearanceTracker::mask(2, &xs).unwrap();
    let fine = FirstAppearanceTracker::mask(3, &xs).unwrap();
    assert!(coarse.iter().zip(&fine).all(|(a, b)| !a || *b));
}

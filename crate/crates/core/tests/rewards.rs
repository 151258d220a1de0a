use proptest::prelude::*;

use unibandit::processes::ProcessSpec;
use unibandit::rewards::{
    resolution_for, tier_guard_replay, Access, BernoulliArms, CellBernoulli, ContextBernoulli,
    FrozenRewards, GuardOutcome, OnlineDuplicateZeroing, PartitionBernoulli, PhaseEntry,
    PhaseSwitching, RewardMechanism, RewardSpec, RewardTier, RewardView, TitForTat, ZeroReward,
};
use unibandit::sets::Region;
use unibandit::timescales::{period_of, t_scale};
use unibandit::{ActionIndex, ContextPoint, Error, Result, RngStream};

type Factory = Box<dyn Fn() -> Result<Box<dyn RewardMechanism>>>;

fn mechanisms(stream: &[ContextPoint]) -> Vec<(&'static str, Factory)> {
    let m = resolution_for(stream).unwrap();
    let frozen: Vec<f64> = (0..64).map(|j| (j % 5) as f64 / 4.0).collect();
    vec![
        ("zero", Box::new(|| Ok(Box::new(ZeroReward::new(2)) as _))),
        (
            "bernoulli",
            Box::new(|| Ok(Box::new(BernoulliArms::new(vec![0.3, 0.6])?) as _)),
        ),
        (
            "cell_bernoulli",
            Box::new(|| {
                Ok(Box::new(CellBernoulli::new(1, vec![vec![0.9, 0.1], vec![0.2, 0.8]])?) as _)
            }),
        ),
        (
            "context_bernoulli",
            Box::new(|| Ok(Box::new(ContextBernoulli::new(2, 0.75, 0.5, 4)?) as _)),
        ),
        (
            "partition_bernoulli",
            Box::new(move || {
                Ok(Box::new(PartitionBernoulli::new(m, 2, 0, 1, RngStream::root(11))?) as _)
            }),
        ),
        (
            "duplicate_zeroing",
            Box::new(move || {
                let base = PartitionBernoulli::new(m, 2, 0, 1, RngStream::root(11))?;
                Ok(Box::new(OnlineDuplicateZeroing::new(Box::new(base), 2, vec![40, 90])?) as _)
            }),
        ),
        (
            "frozen",
            Box::new(move || Ok(Box::new(FrozenRewards::new(2, frozen.clone())?) as _)),
        ),
        (
            "phase_switching",
            Box::new(move || {
                let phases = vec![
                    PhaseEntry { start: 1, end: 50, mechanism: 0, masked: false },
                    PhaseEntry { start: 50, end: 60, mechanism: 0, masked: true },
                    PhaseEntry { start: 60, end: u64::MAX, mechanism: 1, masked: false },
                ];
                let mechs: Vec<Box<dyn RewardMechanism>> = vec![
                    Box::new(PartitionBernoulli::new(m, 2, 0, 1, RngStream::root(11))?),
                    Box::new(BernoulliArms::new(vec![0.5, 0.5])?),
                ];
                Ok(Box::new(PhaseSwitching::new(RewardTier::Oblivious, phases, mechs)?) as _)
            }),
        ),
    ]
}

fn guard_stream(seed: u64) -> Vec<ContextPoint> {
    ProcessSpec::C5Scheduled { growth: 2, cap: 4 }
        .generate(128, RngStream::root(seed))
        .unwrap()
        .points
}

/// Drives a mechanism over `xs` with a fixed action feed.
fn vectors(m: &mut dyn RewardMechanism, xs: &[ContextPoint], seed: u64) -> Vec<Vec<f64>> {
    let acts = vec![ActionIndex(0); xs.len()];
    let rs = vec![0.0; xs.len()];
    let root = RngStream::root(seed);
    (1..=xs.len() as u64)
        .map(|t| {
            let n = (t - 1) as usize;
            let v = RewardView::new(m.tier(), t, xs, &acts[..n], &rs[..n]).unwrap();
            let mut out = vec![0.0; m.arms()];
            m.rewards(&v, &root.child(t), &mut out).unwrap();
            out
        })
        .collect()
}

#[test]
fn tiers_grant_nested_access() {
    use Access::*;
    let all = [Time, PastContexts, FutureContexts, PastActions, PastRewards];
    let granted = |tier: RewardTier| all.iter().filter(|a| tier.permits(**a)).count();
    assert_eq!(granted(RewardTier::Stationary), 0);
    assert_eq!(granted(RewardTier::Oblivious), 1);
    assert_eq!(granted(RewardTier::Online), 2);
    assert_eq!(granted(RewardTier::Prescient), 3);
    assert!(!RewardTier::Adversarial.permits(FutureContexts));
    assert!(RewardTier::Adversarial.permits(PastActions));
    for tier in [
        RewardTier::Stationary,
        RewardTier::Oblivious,
        RewardTier::Online,
        RewardTier::Prescient,
    ] {
        assert!(tier.is_action_blind());
        assert!(!tier.permits(PastActions) && !tier.permits(PastRewards));
    }
}

#[test]
fn views_refuse_forbidden_reads() {
    let xs = guard_stream(0);
    let acts = [ActionIndex(0); 3];
    let rs = [0.5; 3];
    let v = RewardView::new(RewardTier::Stationary, 4, &xs, &acts, &rs).unwrap();
    assert!(matches!(v.time(), Err(Error::TierViolation { .. })));
    assert!(v.past_actions().is_err());
    assert_eq!(v.current(), &xs[3]);
    let v = v.with_tier(RewardTier::Online);
    assert_eq!(v.time().unwrap(), 4);
    // x_{≤t}, the current context included
    assert_eq!(v.past_contexts().unwrap().len(), 4);
    assert!(v.all_contexts().is_err());
    assert!(v.past_rewards().is_err());
    let v = v.with_tier(RewardTier::Adversarial);
    assert_eq!(v.past_actions().unwrap(), &acts);
    assert!(v.all_contexts().is_err());
}

#[test]
fn guard_exempts_adversarial_mechanisms() {
    let xs = guard_stream(1);
    let a: Vec<ActionIndex> = (0..xs.len()).map(|s| ActionIndex(s % 2)).collect();
    let b: Vec<ActionIndex> = (0..xs.len()).map(|_| ActionIndex(0)).collect();
    let out = tier_guard_replay(
        || Ok(Box::new(TitForTat::new(2)) as _),
        &xs,
        &a,
        &b,
        &RngStream::root(0),
    )
    .unwrap();
    assert_eq!(out, GuardOutcome::Exempt);
}

#[test]
fn bernoulli_means_by_monte_carlo() {
    let xs: Vec<ContextPoint> = (0..40_000)
        .map(|s| ContextPoint::new(0.5, s + 1).unwrap())
        .collect();
    let mut m = BernoulliArms::new(vec![0.25, 0.75]).unwrap();
    let v = vectors(&mut m, &xs, 5);
    for (a, p) in [0.25, 0.75].iter().enumerate() {
        let mean = v.iter().map(|r| r[a]).sum::<f64>() / v.len() as f64;
        let se = (p * (1.0 - p) / v.len() as f64).sqrt();
        assert!((mean - p).abs() < 4.0 * se, "arm {a}: {mean}");
    }
}

#[test]
fn partition_rewards_match_reevaluation() {
    let xs = ProcessSpec::IidUniform
        .generate(2000, RngStream::root(6))
        .unwrap()
        .points;
    let m = resolution_for(&xs).unwrap();
    // every point owns its cell at this resolution
    let mut cells: Vec<u64> = xs.iter().map(|x| (x.coord * 2f64.powi(m as i32)) as u64).collect();
    cells.sort_unstable();
    cells.dedup();
    assert_eq!(cells.len(), xs.len());

    let support = Region::interval(0.0, 0.5).unwrap();
    let mut mech = PartitionBernoulli::new(m, 3, 2, 0, RngStream::root(9))
        .unwrap()
        .with_support(support.clone());
    let v = vectors(&mut mech, &xs, 0);
    // oracle: the bit is a pure function of (seed, phase, cell)
    let fresh = PartitionBernoulli::new(m, 3, 2, 0, RngStream::root(9)).unwrap();
    let mut ones = 0;
    let mut on_support = 0;
    for (x, row) in xs.iter().zip(&v) {
        let cell = fresh.cell_of(x.coord);
        let bit = RngStream::root(9).child(0).child(cell).bernoulli(0.5);
        let want = if support.contains(x.coord) {
            on_support += 1;
            ones += bit as u32;
            [0.75, 0.0, if bit { 1.0 } else { 0.0 }]
        } else {
            [0.0; 3]
        };
        assert_eq!(row.as_slice(), &want);
    }
    // the bits are fair coins
    let frac = ones as f64 / on_support as f64;
    assert!((frac - 0.5).abs() < 4.0 * (0.25 / on_support as f64).sqrt());
}

#[test]
fn partition_detects_collisions() {
    let xs = [
        ContextPoint::new(0.10, 1).unwrap(),
        ContextPoint::new(0.11, 2).unwrap(),
    ];
    let mut mech = PartitionBernoulli::new(2, 2, 0, 1, RngStream::root(0)).unwrap();
    let mut out = [0.0; 2];
    mech.vector_at(&xs[0], &mut out).unwrap();
    mech.vector_at(&xs[0], &mut out).unwrap();
    assert!(matches!(mech.vector_at(&xs[1], &mut out), Err(Error::CellCollision { .. })));
    assert!(resolution_for(&xs).unwrap() >= 7);
}

#[test]
fn zeroing_matches_brute_force() {
    let xs = ProcessSpec::C5Scheduled { growth: 1, cap: 8 }
        .generate(600, RngStream::root(12))
        .unwrap()
        .points;
    let (scale, starts) = (1u32, vec![100u64, 300]);
    let base = || {
        Box::new(BernoulliArms::new(vec![1.0, 1.0]).unwrap()) as Box<dyn RewardMechanism>
    };
    let mut mech = OnlineDuplicateZeroing::new(base(), scale, starts.clone()).unwrap();
    let v = vectors(&mut mech, &xs, 0);
    let block = |t: u64| starts.iter().filter(|&&s| s <= t).count();
    for t in 1..=xs.len() as u64 {
        let uid = xs[(t - 1) as usize].uid;
        let pstart = t_scale(scale, period_of(t, scale)).unwrap();
        let earlier: Vec<u64> = (1..t).filter(|&s| xs[(s - 1) as usize].uid == uid).collect();
        let zero = match earlier.first() {
            None => false,
            Some(&first) => block(first) < block(t) || earlier.iter().any(|&s| s >= pstart),
        };
        let want = if zero { 0.0 } else { 1.0 };
        assert_eq!(v[(t - 1) as usize], vec![want; 2], "t = {t}");
    }
}

#[test]
fn phase_switching_rejects_gaps_and_bad_tiers() {
    let xs = guard_stream(2);
    let mech = || -> Vec<Box<dyn RewardMechanism>> { vec![Box::new(ZeroReward::new(2))] };
    let entry = |start, end| PhaseEntry { start, end, mechanism: 0, masked: false };
    assert!(PhaseSwitching::new(RewardTier::Stationary, vec![entry(1, 10)], mech()).is_err());
    assert!(PhaseSwitching::new(RewardTier::Online, vec![entry(1, 10), entry(5, 20)], mech()).is_err());
    let mut m = PhaseSwitching::new(RewardTier::Online, vec![entry(1, 3)], mech()).unwrap();
    let acts = [ActionIndex(0); 3];
    let rs = [0.0; 3];
    let v = RewardView::new(m.tier(), 4, &xs, &acts, &rs).unwrap();
    let mut out = [0.0; 2];
    assert!(matches!(
        m.rewards(&v, &RngStream::root(0), &mut out),
        Err(Error::UnmappedTime(4))
    ));
}

#[test]
fn specs_build_with_declared_tiers() {
    let xs = guard_stream(3);
    let specs = vec![
        RewardSpec::Zero { arms: 2 },
        RewardSpec::Bernoulli { means: vec![0.1, 0.2] },
        RewardSpec::CellBernoulli { depth: 1, means: vec![vec![0.1, 0.9], vec![0.9, 0.1]] },
        RewardSpec::ContextBernoulli { arms: 2, high: 0.75, low: 0.5, salt: 0 },
        RewardSpec::PartitionBernoulli { arms: 2, resolution: None, a1: 0, a2: 1, support: None },
        RewardSpec::DuplicateZeroing {
            base: Box::new(RewardSpec::Bernoulli { means: vec![0.5, 0.5] }),
            scale: 2,
            block_starts: vec![],
        },
        RewardSpec::TitForTat { arms: 2 },
    ];
    for s in specs {
        let m = s.build(&xs, &RngStream::root(0)).unwrap();
        assert_eq!(m.tier(), s.tier());
        assert_eq!(m.arms(), s.arms());
    }
    assert!(RewardSpec::Zero { arms: 0 }.build(&xs, &RngStream::root(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn non_adversarial_mechanisms_ignore_actions(
        seed in any::<u64>(),
        a in prop::collection::vec(0usize..2, 128),
        b in prop::collection::vec(0usize..2, 128),
    ) {
        let xs = guard_stream(seed);
        let a: Vec<ActionIndex> = a.into_iter().map(ActionIndex).collect();
        let b: Vec<ActionIndex> = b.into_iter().map(ActionIndex).collect();
        for (name, make) in mechanisms(&xs) {
            let out = tier_guard_replay(&make, &xs, &a, &b, &RngStream::root(seed)).unwrap();
            prop_assert_eq!(out, GuardOutcome::Pass, "{}", name);
        }
    }
}

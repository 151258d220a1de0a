use serde::{Deserialize, Serialize};

use super::{RewardMechanism, RewardView};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{ActionIndex, ContextPoint};

/// Result of a tier-guard replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardOutcome {
    Pass,
    Fail,
    /// Adversarial mechanisms may react to actions; nothing to check.
    Exempt,
}

/// Runs two fresh instances of a mechanism over the same stream and seed,
/// once under each action sequence, and compares the full reward vectors
/// bit for bit. Non-adversarial tiers must not react to the learner.
pub fn tier_guard_replay<F>(
    factory: F,
    stream: &[ContextPoint],
    actions_a: &[ActionIndex],
    actions_b: &[ActionIndex],
    rng: &RngStream,
) -> Result<GuardOutcome>
where
    F: Fn() -> Result<Box<dyn RewardMechanism>>,
{
    if actions_a.len() != stream.len() || actions_b.len() != stream.len() {
        return Err(Error::InvalidParameter(format!(
            "action sequences of length {} and {} for a stream of {}",
            actions_a.len(),
            actions_b.len(),
            stream.len()
        )));
    }
    let mut first = factory()?;
    if !first.tier().is_action_blind() {
        return Ok(GuardOutcome::Exempt);
    }
    let a = replay(first.as_mut(), stream, actions_a, rng)?;
    let b = replay(factory()?.as_mut(), stream, actions_b, rng)?;
    let same = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
    Ok(if same {
        GuardOutcome::Pass
    } else {
        GuardOutcome::Fail
    })
}

fn replay(
    mech: &mut dyn RewardMechanism,
    stream: &[ContextPoint],
    actions: &[ActionIndex],
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let arms = mech.arms();
    let mut vectors = Vec::with_capacity(stream.len() * arms);
    let mut rewards = Vec::with_capacity(stream.len());
    let mut row = vec![0.0; arms];
    for t in 1..=stream.len() as u64 {
        let n = (t - 1) as usize;
        let view = RewardView::new(mech.tier(), t, stream, &actions[..n], &rewards[..n])?;
        mech.rewards(&view, &rng.child(t), &mut row)?;
        let a = actions[n].index();
        if a >= arms {
            return Err(Error::ArmOutOfRange { arm: a, arms });
        }
        rewards.push(row[a]);
        vectors.extend_from_slice(&row);
    }
    Ok(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewards::{BernoulliArms, PartitionBernoulli, TitForTat};

    fn stream(n: u64) -> Vec<ContextPoint> {
        (1..=n)
            .map(|u| ContextPoint::new((u as f64 * 0.618).fract(), u).unwrap())
            .collect()
    }

    #[test]
    fn stationary_arms_are_action_blind() {
        let xs = stream(200);
        let a = vec![ActionIndex(0); 200];
        let b = vec![ActionIndex(1); 200];
        let out = tier_guard_replay(
            || Ok(Box::new(BernoulliArms::new(vec![0.5, 0.75])?) as Box<dyn RewardMechanism>),
            &xs,
            &a,
            &b,
            &RngStream::root(9),
        )
        .unwrap();
        assert_eq!(out, GuardOutcome::Pass);
    }

    #[test]
    fn partition_rewards_are_action_blind() {
        let xs = stream(300);
        let mut r = RngStream::root(4);
        let a: Vec<ActionIndex> = (0..300).map(|_| ActionIndex(r.below(2) as usize)).collect();
        let b = vec![ActionIndex(1); 300];
        let m = crate::rewards::resolution_for(&xs).unwrap();
        let out = tier_guard_replay(
            || {
                Ok(Box::new(PartitionBernoulli::new(m, 2, 0, 1, RngStream::root(2))?)
                    as Box<dyn RewardMechanism>)
            },
            &xs,
            &a,
            &b,
            &RngStream::root(9),
        )
        .unwrap();
        assert_eq!(out, GuardOutcome::Pass);
    }

    #[test]
    fn adversarial_is_exempt() {
        let xs = stream(10);
        let a = vec![ActionIndex(0); 10];
        let out = tier_guard_replay(
            || Ok(Box::new(TitForTat::new(2)) as Box<dyn RewardMechanism>),
            &xs,
            &a,
            &a,
            &RngStream::root(0),
        )
        .unwrap();
        assert_eq!(out, GuardOutcome::Exempt);
    }
}

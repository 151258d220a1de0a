//! The simulation harness.
//!
//! [`run`] drives one learner against one reward mechanism over a realized
//! context stream. The learner only ever sees the chosen entry of each
//! round's reward vector; the full vectors are kept in the [`RunRecord`] so
//! that regret can be evaluated against arbitrary policies afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{Learner, StepInternals};
use crate::rewards::{RewardMechanism, RewardView};
use crate::rng::RngStream;
use crate::sum::CompensatedSum;
use crate::types::{check_reward, ActionIndex, ContextPoint, HistoryView};

/// Everything a run produced.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunRecord {
    pub arms: usize,
    pub contexts: Vec<ContextPoint>,
    pub actions: Vec<ActionIndex>,
    pub rewards: Vec<f64>,
    /// Reward vectors, `arms` entries per step.
    pub vectors: Vec<f64>,
    pub internals: Vec<StepInternals>,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Reward vector of step `t` (1-based).
    pub fn vector(&self, t: u64) -> &[f64] {
        let i = (t - 1) as usize * self.arms;
        &self.vectors[i..i + self.arms]
    }

    pub fn total_reward(&self) -> f64 {
        crate::sum::sum(self.rewards.iter().copied())
    }

    /// Cumulative learner reward after each step.
    pub fn cumulative_rewards(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::default();
        self.rewards
            .iter()
            .map(|&r| {
                acc.add(r);
                acc.value()
            })
            .collect()
    }
}

/// Runs `learner` against `mechanism` on `stream`.
///
/// `learner_rng` is handed to the learner unchanged at every step; the
/// mechanism receives `reward_rng.child(t)` at step `t`, so environment
/// randomness does not depend on what the learner did.
pub fn run(
    stream: &[ContextPoint],
    mechanism: &mut dyn RewardMechanism,
    learner: &mut dyn Learner,
    learner_rng: &RngStream,
    reward_rng: &RngStream,
) -> Result<RunRecord> {
    let arms = mechanism.arms();
    let horizon = stream.len();
    let mut rec = RunRecord {
        arms,
        contexts: stream.to_vec(),
        actions: Vec::with_capacity(horizon),
        rewards: Vec::with_capacity(horizon),
        vectors: vec![0.0; horizon * arms],
        internals: Vec::with_capacity(horizon),
    };
    for t in 1..=horizon as u64 {
        let n = (t - 1) as usize;
        let history = HistoryView::new(&stream[..=n], &rec.actions, &rec.rewards)?;
        let a = learner.select(&history, learner_rng)?;
        if a.index() >= arms {
            return Err(Error::ArmOutOfRange {
                arm: a.index(),
                arms,
            });
        }
        let view = RewardView::new(mechanism.tier(), t, stream, &rec.actions, &rec.rewards)?;
        let row = &mut rec.vectors[n * arms..(n + 1) * arms];
        mechanism.rewards(&view, &reward_rng.child(t), row)?;
        for &r in row.iter() {
            check_reward(r)?;
        }
        let r = row[a.index()];
        learner.update(a, r)?;
        rec.internals.push(learner.internals());
        rec.actions.push(a);
        rec.rewards.push(r);
    }
    Ok(rec)
}

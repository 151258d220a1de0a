//! Reward mechanisms and the information each tier may use.
//!
//! A mechanism produces the full reward vector of a round. The harness
//! stores it for evaluation and hands the learner only the chosen entry.
//! What a mechanism may condition on depends on its [`RewardTier`]; the
//! [`RewardView`] it receives enforces this at run time.

mod basic;
mod guard;
mod partition;
mod spec;
mod wrappers;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{ActionIndex, ContextPoint};

pub use basic::{
    BernoulliArms, CellBernoulli, ContextBernoulli, FrozenRewards, TitForTat, ZeroReward,
};
pub use guard::{tier_guard_replay, GuardOutcome};
pub use partition::{resolution_for, PartitionBernoulli};
pub use spec::RewardSpec;
pub use wrappers::{OnlineDuplicateZeroing, PhaseEntry, PhaseSwitching};

/// What a reward mechanism may condition on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardTier {
    /// Current context only.
    Stationary,
    /// Current context and time.
    Oblivious,
    /// Contexts up to now.
    Online,
    /// The whole context sequence.
    Prescient,
    /// Contexts up to now, past actions and past rewards.
    Adversarial,
}

/// Parts of the run beyond the current context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    Time,
    PastContexts,
    FutureContexts,
    PastActions,
    PastRewards,
}

impl RewardTier {
    pub fn permits(self, access: Access) -> bool {
        use Access::*;
        use RewardTier::*;
        match (self, access) {
            (Stationary, _) => false,
            (Oblivious, Time) => true,
            (Oblivious, _) => false,
            (Online, Time | PastContexts) => true,
            (Online, _) => false,
            (Prescient, Time | PastContexts | FutureContexts) => true,
            (Prescient, _) => false,
            (Adversarial, FutureContexts) => false,
            (Adversarial, _) => true,
        }
    }

    /// Whether rewards must not depend on the learner's actions.
    pub fn is_action_blind(self) -> bool {
        self != RewardTier::Adversarial
    }
}

/// The slice of the run a mechanism sees at time `t`.
#[derive(Clone, Copy, Debug)]
pub struct RewardView<'a> {
    tier: RewardTier,
    t: u64,
    contexts: &'a [ContextPoint],
    actions: &'a [ActionIndex],
    rewards: &'a [f64],
}

impl<'a> RewardView<'a> {
    /// `contexts` is the whole stream (at least `t` long); `actions` and
    /// `rewards` hold the `t - 1` past rounds.
    pub fn new(
        tier: RewardTier,
        t: u64,
        contexts: &'a [ContextPoint],
        actions: &'a [ActionIndex],
        rewards: &'a [f64],
    ) -> Result<Self> {
        if t == 0 || (contexts.len() as u64) < t {
            return Err(Error::MalformedHistory(format!(
                "reward view at t = {t} over {} contexts",
                contexts.len()
            )));
        }
        if actions.len() as u64 != t - 1 || rewards.len() as u64 != t - 1 {
            return Err(Error::MalformedHistory(format!(
                "reward view at t = {t} with {} actions, {} rewards",
                actions.len(),
                rewards.len()
            )));
        }
        Ok(Self {
            tier,
            t,
            contexts,
            actions,
            rewards,
        })
    }

    /// The same data seen through another tier.
    pub fn with_tier(&self, tier: RewardTier) -> Self {
        Self { tier, ..*self }
    }

    pub fn tier(&self) -> RewardTier {
        self.tier
    }

    fn check(&self, access: Access) -> Result<()> {
        if self.tier.permits(access) {
            Ok(())
        } else {
            Err(Error::TierViolation {
                tier: self.tier,
                access,
            })
        }
    }

    /// `x_t`; every tier may read it.
    pub fn current(&self) -> &'a ContextPoint {
        &self.contexts[(self.t - 1) as usize]
    }

    pub fn time(&self) -> Result<u64> {
        self.check(Access::Time)?;
        Ok(self.t)
    }

    /// `x_{≤t}`.
    pub fn past_contexts(&self) -> Result<&'a [ContextPoint]> {
        self.check(Access::PastContexts)?;
        Ok(&self.contexts[..self.t as usize])
    }

    /// The whole stream.
    pub fn all_contexts(&self) -> Result<&'a [ContextPoint]> {
        self.check(Access::FutureContexts)?;
        Ok(self.contexts)
    }

    /// `a_{<t}`.
    pub fn past_actions(&self) -> Result<&'a [ActionIndex]> {
        self.check(Access::PastActions)?;
        Ok(self.actions)
    }

    /// `r_{<t}`.
    pub fn past_rewards(&self) -> Result<&'a [f64]> {
        self.check(Access::PastRewards)?;
        Ok(self.rewards)
    }
}

/// A reward generator.
pub trait RewardMechanism: Send {
    fn name(&self) -> &str;

    fn tier(&self) -> RewardTier;

    fn arms(&self) -> usize;

    /// Fills `out` (length `arms`) with the round's rewards. `rng` is the
    /// round's stream; mechanisms derive per-arm draws from it.
    fn rewards(&mut self, view: &RewardView<'_>, rng: &RngStream, out: &mut [f64]) -> Result<()>;

    /// Arm with the highest expected reward at `x`, when the mechanism is
    /// stationary and knows it.
    fn best_arm(&self, _x: &ContextPoint) -> Option<usize> {
        None
    }
}

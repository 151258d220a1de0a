//! The sequential decision contract.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{check_reward, ActionIndex, HistoryView};

/// Per-step internals a learner may expose for tracing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepInternals {
    pub category: Option<u32>,
    pub phase: Option<u32>,
    pub stage: Option<u32>,
    pub period: Option<u64>,
    pub strategy: Option<usize>,
}

/// A learning rule.
///
/// The harness calls [`Learner::select`] with the history up to the current
/// context, then [`Learner::update`] with the reward of the chosen action.
/// `rng` is the learner's own stream for the whole run; implementations
/// derive per-step or per-context sub-streams from it so that replays are
/// exact.
pub trait Learner: Send {
    fn name(&self) -> &str;

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex>;

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()>;

    /// Hash of the learner state, for replay checks.
    fn fingerprint(&self) -> u64;

    /// Internals of the most recent selection.
    fn internals(&self) -> StepInternals {
        StepInternals::default()
    }
}

/// Bookkeeping shared by every learner: step counter and the pending
/// selection that the next update must match.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StepClock {
    completed: u64,
    pending: Option<ActionIndex>,
}

impl StepClock {
    /// Number of completed select/update pairs.
    pub fn completed(&self) -> u64 {
        self.completed
    }

    /// Checks that `history` is at the step this learner expects.
    pub fn begin(&self, history: &HistoryView<'_>) -> Result<u64> {
        if self.pending.is_some() {
            return Err(Error::MalformedHistory(format!(
                "select called twice at t = {}",
                self.completed + 1
            )));
        }
        let expected = self.completed + 1;
        if history.t() != expected {
            return Err(Error::HistoryMismatch {
                expected,
                got: history.t(),
            });
        }
        Ok(expected)
    }

    pub fn commit(&mut self, action: ActionIndex) {
        self.pending = Some(action);
    }

    /// Validates an update and closes the step. Returns the reward.
    pub fn finish(&mut self, chosen: ActionIndex, reward: f64) -> Result<f64> {
        let pending = self.pending.ok_or(Error::UpdateWithoutSelect)?;
        if pending != chosen {
            return Err(Error::InvalidParameter(format!(
                "update for arm {chosen} but arm {pending} was selected"
            )));
        }
        let r = check_reward(reward)?;
        self.pending = None;
        self.completed += 1;
        Ok(r)
    }
}

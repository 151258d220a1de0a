//! Domain types shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved uid of the idle symbol emitted by block constructions.
pub const IDLE_UID: u64 = 0;

/// A context in `[0, 1]` with an identity key.
///
/// Two points are duplicates iff their uids are equal. Generators create
/// duplicates by copying a point, never by re-sampling it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ContextPoint {
    pub coord: f64,
    pub uid: u64,
}

impl ContextPoint {
    pub fn new(coord: f64, uid: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&coord) {
            return Err(Error::InvalidParameter(format!(
                "context coordinate {coord} outside [0, 1]"
            )));
        }
        Ok(Self { coord, uid })
    }

    /// The idle symbol: coordinate 0 with the reserved uid.
    pub const fn idle() -> Self {
        Self {
            coord: 0.0,
            uid: IDLE_UID,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.uid == IDLE_UID
    }
}

impl PartialEq for ContextPoint {
    fn eq(&self, other: &Self) -> bool {
        self.uid == other.uid
    }
}

impl Eq for ContextPoint {}

impl std::hash::Hash for ContextPoint {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.uid.hash(state);
    }
}

/// Index of an action. For finite action sets it is below the arm count; for
/// countable enumerations it indexes the enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionIndex(pub usize);

impl ActionIndex {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for ActionIndex {
    fn from(i: usize) -> Self {
        Self(i)
    }
}

impl std::fmt::Display for ActionIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rejects rewards outside the bounded regime `[0, 1]`.
pub fn check_reward(r: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(Error::RewardOutOfRange(r))
    }
}

/// What a learner may see at step `t`: contexts up to and including `t`,
/// actions and rewards strictly before `t`.
#[derive(Clone, Copy, Debug)]
pub struct HistoryView<'a> {
    contexts: &'a [ContextPoint],
    actions: &'a [ActionIndex],
    rewards: &'a [f64],
}

impl<'a> HistoryView<'a> {
    pub fn new(
        contexts: &'a [ContextPoint],
        actions: &'a [ActionIndex],
        rewards: &'a [f64],
    ) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::MalformedHistory("no current context".into()));
        }
        if actions.len() + 1 != contexts.len() || rewards.len() != actions.len() {
            return Err(Error::MalformedHistory(format!(
                "{} contexts, {} actions, {} rewards",
                contexts.len(),
                actions.len(),
                rewards.len()
            )));
        }
        Ok(Self {
            contexts,
            actions,
            rewards,
        })
    }

    /// Current time, 1-based.
    pub fn t(&self) -> u64 {
        self.contexts.len() as u64
    }

    pub fn current(&self) -> &'a ContextPoint {
        &self.contexts[self.contexts.len() - 1]
    }

    pub fn contexts(&self) -> &'a [ContextPoint] {
        self.contexts
    }

    pub fn actions(&self) -> &'a [ActionIndex] {
        self.actions
    }

    pub fn rewards(&self) -> &'a [f64] {
        self.rewards
    }
}

/// FNV-1a accumulator used for learner state fingerprints.
#[derive(Clone, Copy, Debug)]
pub struct Fingerprint(u64);

impl Default for Fingerprint {
    fn default() -> Self {
        Self(0xCBF2_9CE4_8422_2325)
    }
}

impl Fingerprint {
    pub fn word(&mut self, w: u64) -> &mut Self {
        for b in w.to_le_bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01B3);
        }
        self
    }

    pub fn float(&mut self, x: f64) -> &mut Self {
        self.word(x.to_bits())
    }

    pub fn floats(&mut self, xs: &[f64]) -> &mut Self {
        for &x in xs {
            self.float(x);
        }
        self
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

use thiserror::Error;

use crate::rewards::{Access, RewardTier};

/// Errors raised by learners, generators, reward mechanisms and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("history length mismatch: learner expected t = {expected}, history has t = {got}")]
    HistoryMismatch { expected: u64, got: u64 },

    #[error("malformed history: {0}")]
    MalformedHistory(String),

    #[error("update called without a pending selection")]
    UpdateWithoutSelect,

    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("arm {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("64-bit time overflow computing {0}")]
    Overflow(String),

    #[error("{tier:?} mechanism attempted {access:?} access")]
    TierViolation { tier: RewardTier, access: Access },

    #[error("cell collision at resolution 2^-{resolution}: uids {first} and {second} share cell {cell}")]
    CellCollision {
        resolution: u32,
        cell: u64,
        first: u64,
        second: u64,
    },

    #[error("time {0} is not covered by any reward phase")]
    UnmappedTime(u64),

    #[error("memory guard: {0}")]
    MemoryGuard(String),

    #[error("empty window")]
    EmptyWindow,

    #[error("freeze rule: {0}")]
    Freeze(String),
}

pub type Result<T> = std::result::Result<T, Error>;

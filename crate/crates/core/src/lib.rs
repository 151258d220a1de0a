//! Universal-consistency experiments for non-stationary contextual bandits.
//!
//! The crate is organised around four contracts:
//!
//! * [`learner::Learner`] — select an action from the history, then ingest the
//!   reward of the chosen action only;
//! * [`processes::ContextProcess`] — seeded generators of context streams,
//!   including block constructions with exact duplicates;
//! * [`rewards::RewardMechanism`] — tiered reward generators whose view of
//!   the run is restricted by [`rewards::RewardView`];
//! * [`sim::run`] — the harness that ties them together and records a
//!   [`sim::RunRecord`] with full reward vectors for evaluation.
//!
//! Everything is deterministic given a root seed; see [`rng::RngStream`].

pub mod bandit;
pub mod diagnostics;
pub mod error;
pub mod learner;
pub mod learners;
pub mod processes;
pub mod rewards;
pub mod rng;
pub mod sets;
pub mod sim;
pub mod sum;
pub mod timescales;
pub mod types;

pub use error::{Error, Result};
pub use learner::Learner;
pub use rng::RngStream;
pub use types::{ActionIndex, ContextPoint, HistoryView, IDLE_UID};

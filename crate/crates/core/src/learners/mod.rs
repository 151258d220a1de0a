//! Learning rules built on the bandit primitives.
//!
//! * [`UniformLearner`], [`Exp3IxLearner`] and [`FixedPolicyLearner`] are
//!   context-blind baselines;
//! * [`PerInstanceExp3Ix`] and [`PerInstanceExpInf`] personalise: one
//!   independent sub-learner per distinct context;
//! * [`ExpInfOverPolicies`] generalises: it competes with a policy list;
//! * [`C5Learner`] arbitrates between the two with Hedge on a
//!   multi-scale schedule.

mod basic;
mod c5;
mod expinf_policies;
mod net;
mod per_instance;
mod policy;

pub use basic::{Exp3IxLearner, FixedPolicyLearner, UniformLearner};
pub use c5::{C5Learner, HedgeLogEntry};
pub use expinf_policies::ExpInfOverPolicies;
pub use net::{net_expert_sequence, net_len_through, nearest_net_index};
pub use per_instance::{PerInstanceExp3Ix, PerInstanceExpInf};
pub use policy::Policy;
pub(crate) use policy::cell_index;

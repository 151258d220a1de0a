//! Trace statistics: finite-window surrogates of the visit conditions on
//! context processes, the regret evaluator, and the personalization versus
//! generalization demonstrator.
//!
//! Every statistic is an exact function of the trace; the limsups and sups
//! of the asymptotic definitions become maxima over an explicit window.

mod occupancy;
mod regret;
mod tension;

pub use occupancy::{
    deviation_grid, deviation_stat, distinct_visit_curve, duplicate_cap_curve,
    empirical_submeasure, log_checkpoints, scale_occupancy, Selector, SetFamily, Window,
};
pub use regret::{regret_vs_policy, Annotation, Checkpoint, Comparator, RegretReport};
pub use tension::{
    tension_demo, BlockExploration, FreezeRule, TensionConfig, TensionReport,
};

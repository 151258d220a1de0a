use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::Policy;
use crate::sim::RunRecord;
use crate::sum::CompensatedSum;
use crate::types::{ActionIndex, ContextPoint};

/// The action sequence regret is measured against.
pub enum Comparator<'a> {
    Policy(&'a Policy),
    /// A fixed action per step.
    Actions(&'a [ActionIndex]),
    /// Action by context uid, with a fallback for unlisted uids.
    UidTable {
        table: &'a HashMap<u64, ActionIndex>,
        default: ActionIndex,
    },
    /// The best entry of each step's reward vector. On a deterministic
    /// environment whose vectors depend only on the context this is the
    /// hindsight-optimal policy.
    PointwiseMax,
    Function(&'a dyn Fn(&ContextPoint) -> ActionIndex),
}

impl Comparator<'_> {
    fn reward(&self, t: usize, x: &ContextPoint, row: &[f64]) -> Result<f64> {
        let a = match self {
            Comparator::Policy(p) => p.act(x),
            Comparator::Actions(acts) => *acts.get(t).ok_or_else(|| {
                Error::InvalidParameter(format!("comparator has no action for t = {}", t + 1))
            })?,
            Comparator::UidTable { table, default } => {
                table.get(&x.uid).copied().unwrap_or(*default)
            }
            Comparator::PointwiseMax => {
                return Ok(row.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            }
            Comparator::Function(f) => f(x),
        };
        row.get(a.index()).copied().ok_or(Error::ArmOutOfRange {
            arm: a.index(),
            arms: row.len(),
        })
    }
}

/// Named time range, for reports on block constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub start: u64,
    pub end: u64,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: u64,
    pub learner: f64,
    pub comparator: f64,
    pub regret: f64,
    pub average_regret: f64,
}

/// Cumulative rewards of a learner and a comparator along one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    /// Cumulative learner reward after each step.
    pub learner: Vec<f64>,
    /// Cumulative comparator reward after each step.
    pub comparator: Vec<f64>,
    /// Cumulative regret after each step, summed per step.
    pub regret: Vec<f64>,
    pub annotations: Vec<Annotation>,
}

impl RegretReport {
    pub fn horizon(&self) -> u64 {
        self.regret.len() as u64
    }

    pub fn total_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }

    pub fn average_regret(&self) -> f64 {
        if self.regret.is_empty() {
            0.0
        } else {
            self.total_regret() / self.regret.len() as f64
        }
    }

    /// Regret accumulated over `[start, end]` (1-based, inclusive).
    pub fn window_regret(&self, start: u64, end: u64) -> f64 {
        assert!(start >= 1 && start <= end && end <= self.horizon(), "bad window");
        let before = if start == 1 {
            0.0
        } else {
            self.regret[(start - 2) as usize]
        };
        self.regret[(end - 1) as usize] - before
    }

    pub fn checkpoint(&self, t: u64) -> Checkpoint {
        let i = (t - 1) as usize;
        Checkpoint {
            t,
            learner: self.learner[i],
            comparator: self.comparator[i],
            regret: self.regret[i],
            average_regret: self.regret[i] / t as f64,
        }
    }

    pub fn checkpoints(&self, ts: &[u64]) -> Vec<Checkpoint> {
        ts.iter()
            .filter(|&&t| t >= 1 && t <= self.horizon())
            .map(|&t| self.checkpoint(t))
            .collect()
    }
}

/// `Σ_t r_t(π(X_t)) − r_t(â_t)` along a recorded run.
pub fn regret_vs_policy(record: &RunRecord, comparator: &Comparator<'_>) -> Result<RegretReport> {
    let n = record.len();
    let mut rep = RegretReport {
        learner: Vec::with_capacity(n),
        comparator: Vec::with_capacity(n),
        regret: Vec::with_capacity(n),
        annotations: Vec::new(),
    };
    let (mut l, mut c, mut g) = (
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    );
    for i in 0..n {
        let row = record.vector(i as u64 + 1);
        let mine = record.rewards[i];
        let theirs = comparator.reward(i, &record.contexts[i], row)?;
        l.add(mine);
        c.add(theirs);
        g.add(theirs - mine);
        rep.learner.push(l.value());
        rep.comparator.push(c.value());
        rep.regret.push(g.value());
    }
    Ok(rep)
}

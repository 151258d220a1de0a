//! Hedge over {personalise, follow policy j} on a multi-scale schedule.
//!
//! Times are split into stages `[2^l, 2^{l+1})`, each stage into `2^i`
//! equal periods where `i` is the phase of the stage, and every time gets
//! a category `p = ⌊log4 n⌋` from the number `n` of occurrences of its
//! context so far in the period. For each category a Hedge instance over
//! strategies `{0, …, i}` picks, at the first occurrence of a context in
//! the period, either strategy 0 — a per-context EXP3.IX that lives for
//! the rest of the period — or strategy `j ≥ 1`, which plays `π^j`.
//! Later occurrences in the same category and period inherit the choice.
//! At each period end Hedge receives importance-weighted per-step reward
//! estimates; estimates and probabilities restart with every stage.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bandit::{Exp3Ix, Hedge};
use crate::error::{Error, Result};
use crate::learner::{Learner, StepClock, StepInternals};
use crate::learners::Policy;
use crate::rng::RngStream;
use crate::sum::CompensatedSum;
use crate::timescales::{alg1_position, hedge_rate, Alg1Position, CategoryTracker, PhaseSchedule};
use crate::types::{ActionIndex, Fingerprint, HistoryView};

/// Hedge probabilities after a period-end update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HedgeLogEntry {
    pub stage: u32,
    pub phase: u32,
    pub period: u64,
    pub category: u32,
    /// First time after the period.
    pub boundary: u64,
    /// Estimated per-step rewards fed to Hedge.
    pub estimates: Vec<f64>,
    /// Probabilities for the next period.
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug)]
struct CategoryState {
    hedge: Hedge,
    probs: Vec<f64>,
    acc: Vec<CompensatedSum>,
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    category: u32,
    uid: u64,
    strategy: usize,
    hedge_active: bool,
}

/// The multi-scale learner.
#[derive(Clone, Debug)]
pub struct C5Learner {
    sched: PhaseSchedule,
    policies: Vec<Policy>,
    arms: usize,
    clock: StepClock,
    pos: Option<Alg1Position>,
    cats: Vec<CategoryState>,
    tracker: CategoryTracker,
    assigned: HashMap<(u32, u64), usize>,
    local: HashMap<(u32, u64), Exp3Ix>,
    pending: Option<Pending>,
    last: StepInternals,
    log: Vec<HedgeLogEntry>,
    keep_log: bool,
}

impl C5Learner {
    pub fn new(sched: PhaseSchedule, policies: Vec<Policy>, arms: usize) -> Result<Self> {
        sched.validate()?;
        if arms == 0 {
            return Err(Error::InvalidParameter("need at least one arm".into()));
        }
        for p in &policies {
            p.validate(arms)?;
        }
        Ok(Self {
            sched,
            policies,
            arms,
            clock: StepClock::default(),
            pos: None,
            cats: Vec::new(),
            tracker: CategoryTracker::new(),
            assigned: HashMap::new(),
            local: HashMap::new(),
            pending: None,
            last: StepInternals::default(),
            log: Vec::new(),
            keep_log: true,
        })
    }

    /// Disables the Hedge log (long runs).
    pub fn without_log(mut self) -> Self {
        self.keep_log = false;
        self
    }

    pub fn hedge_log(&self) -> &[HedgeLogEntry] {
        &self.log
    }

    /// Current Hedge probabilities of category `p`, if it has been seen.
    pub fn hedge_probs(&self, p: u32) -> Option<&[f64]> {
        self.cats.get(p as usize).map(|c| c.probs.as_slice())
    }

    /// Strategies available in phase `i`: `{0, …, min(i, |policies|)}`.
    fn support(&self, phase: u32) -> usize {
        (phase as usize).min(self.policies.len()) + 1
    }

    fn fresh_category(&self, phase: u32) -> CategoryState {
        let n = self.support(phase);
        let hedge = Hedge::new(n, hedge_rate(phase)).expect("rate is finite");
        CategoryState {
            probs: hedge.probs(),
            hedge,
            acc: vec![CompensatedSum::default(); n],
        }
    }

    /// Whether Hedge runs for category `p` at stage `l` (`l ≥ u(16p)`).
    fn hedge_active(&self, p: u32, stage: u32) -> bool {
        p.checked_mul(16)
            .and_then(|i| self.sched.u(i))
            .is_some_and(|u| stage >= u)
    }

    /// Closes the period `prev` and opens `next`.
    fn roll_period(&mut self, prev: Alg1Position, next: Alg1Position) -> Result<()> {
        for p in 0..self.cats.len() as u32 {
            if !self.hedge_active(p, prev.stage) {
                continue;
            }
            let cat = &mut self.cats[p as usize];
            let scale = prev.len as f64;
            let est: Vec<f64> = cat
                .acc
                .iter()
                .zip(&cat.probs)
                .map(|(a, &pj)| if pj > 0.0 { a.value() / (scale * pj) } else { 0.0 })
                .collect();
            cat.hedge.update(&est)?;
            cat.probs = cat.hedge.probs();
            cat.acc.iter_mut().for_each(|a| *a = CompensatedSum::default());
            if self.keep_log {
                self.log.push(HedgeLogEntry {
                    stage: prev.stage,
                    phase: prev.phase,
                    period: prev.period,
                    category: p,
                    boundary: prev.start + prev.len,
                    estimates: est,
                    probs: cat.probs.clone(),
                });
            }
        }
        if next.stage != prev.stage {
            for p in 0..self.cats.len() {
                self.cats[p] = self.fresh_category(next.phase);
            }
        }
        self.assigned.clear();
        self.local.clear();
        Ok(())
    }
}

impl Learner for C5Learner {
    fn name(&self) -> &str {
        "c5"
    }

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex> {
        let t = self.clock.begin(history)?;
        let pos = alg1_position(t, &self.sched);
        match self.pos {
            Some(prev) if prev.start != pos.start => self.roll_period(prev, pos)?,
            _ => {}
        }
        self.pos = Some(pos);

        let x = *history.current();
        let (_, p) = self.tracker.push(pos.start, &x);
        while self.cats.len() <= p as usize {
            let c = self.fresh_category(pos.phase);
            self.cats.push(c);
        }
        let step = rng.child(t);
        let hedge_active = self.hedge_active(p, pos.stage);
        let strategy = if !hedge_active {
            0
        } else if let Some(&j) = self.assigned.get(&(p, x.uid)) {
            j
        } else {
            let j = step.child(0).categorical(&self.cats[p as usize].probs);
            self.assigned.insert((p, x.uid), j);
            j
        };

        let arm = if strategy == 0 {
            if self.arms == 1 {
                0
            } else {
                let arms = self.arms;
                self.local
                    .entry((p, x.uid))
                    .or_insert_with(|| Exp3Ix::new(arms).expect("arms ≥ 2"))
                    .select(&mut step.child(1))
            }
        } else {
            self.policies[strategy - 1].act(&x).0
        };

        let a = ActionIndex(arm);
        self.pending = Some(Pending {
            category: p,
            uid: x.uid,
            strategy,
            hedge_active,
        });
        self.last = StepInternals {
            category: Some(p),
            phase: Some(pos.phase),
            stage: Some(pos.stage),
            period: Some(pos.period),
            strategy: Some(strategy),
        };
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        let r = self.clock.finish(chosen, reward)?;
        let pend = self.pending.take().ok_or(Error::UpdateWithoutSelect)?;
        if pend.hedge_active {
            self.cats[pend.category as usize].acc[pend.strategy].add(r);
        }
        if pend.strategy == 0 && self.arms >= 2 {
            self.local
                .get_mut(&(pend.category, pend.uid))
                .expect("local bandit created at select")
                .update(chosen.0, r)?;
        }
        Ok(())
    }

    fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::default();
        fp.word(self.clock.completed());
        for c in &self.cats {
            c.hedge.fingerprint_into(&mut fp);
            fp.floats(&c.probs);
            for a in &c.acc {
                fp.float(a.value());
            }
        }
        let mut keys: Vec<_> = self.local.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            fp.word(k.0 as u64).word(k.1);
            self.local[&k].fingerprint_into(&mut fp);
        }
        let mut assigned: Vec<_> = self.assigned.iter().map(|(k, v)| (*k, *v)).collect();
        assigned.sort_unstable();
        for ((p, u), j) in assigned {
            fp.word(p as u64).word(u).word(j as u64);
        }
        fp.finish()
    }

    fn internals(&self) -> StepInternals {
        self.last
    }
}

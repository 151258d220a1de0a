use crate::bandit::Exp3Ix;
use crate::error::{Error, Result};
use crate::learner::{Learner, StepClock};
use crate::learners::Policy;
use crate::rng::RngStream;
use crate::types::{ActionIndex, Fingerprint, HistoryView};

/// Uniformly random arm every step.
#[derive(Clone, Debug)]
pub struct UniformLearner {
    arms: usize,
    clock: StepClock,
}

impl UniformLearner {
    pub fn new(arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(Error::InvalidParameter("need at least one arm".into()));
        }
        Ok(Self {
            arms,
            clock: StepClock::default(),
        })
    }
}

impl Learner for UniformLearner {
    fn name(&self) -> &str {
        "uniform"
    }

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex> {
        let t = self.clock.begin(history)?;
        let a = ActionIndex(rng.child(t).below(self.arms as u64) as usize);
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        self.clock.finish(chosen, reward).map(|_| ())
    }

    fn fingerprint(&self) -> u64 {
        Fingerprint::default()
            .word(self.arms as u64)
            .word(self.clock.completed())
            .finish()
    }
}

/// Plays a fixed policy.
#[derive(Clone, Debug)]
pub struct FixedPolicyLearner {
    policy: Policy,
    clock: StepClock,
}

impl FixedPolicyLearner {
    pub fn new(policy: Policy) -> Self {
        Self {
            policy,
            clock: StepClock::default(),
        }
    }
}

impl Learner for FixedPolicyLearner {
    fn name(&self) -> &str {
        "fixed_policy"
    }

    fn select(&mut self, history: &HistoryView<'_>, _rng: &RngStream) -> Result<ActionIndex> {
        self.clock.begin(history)?;
        let a = self.policy.act(history.current());
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        self.clock.finish(chosen, reward).map(|_| ())
    }

    fn fingerprint(&self) -> u64 {
        Fingerprint::default().word(self.clock.completed()).finish()
    }
}

/// A single context-blind EXP3.IX.
#[derive(Clone, Debug)]
pub struct Exp3IxLearner {
    state: Exp3Ix,
    clock: StepClock,
}

impl Exp3IxLearner {
    pub fn new(arms: usize) -> Result<Self> {
        Ok(Self {
            state: Exp3Ix::new(arms)?,
            clock: StepClock::default(),
        })
    }

    pub fn state(&self) -> &Exp3Ix {
        &self.state
    }
}

impl Learner for Exp3IxLearner {
    fn name(&self) -> &str {
        "exp3ix"
    }

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex> {
        let t = self.clock.begin(history)?;
        let a = ActionIndex(self.state.select(&mut rng.child(t)));
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        let r = self.clock.finish(chosen, reward)?;
        self.state.update(chosen.0, r)
    }

    fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::default();
        self.state.fingerprint_into(&mut fp);
        fp.finish()
    }
}

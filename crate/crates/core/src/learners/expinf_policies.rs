use crate::bandit::ExpInf;
use crate::error::{Error, Result};
use crate::learner::{Learner, StepClock, StepInternals};
use crate::learners::Policy;
use crate::rng::RngStream;
use crate::types::{ActionIndex, Fingerprint, HistoryView};

/// EXPINF whose expert `j` plays `π^j(X_t)`.
#[derive(Clone, Debug)]
pub struct ExpInfOverPolicies {
    policies: Vec<Policy>,
    state: ExpInf,
    clock: StepClock,
    last_expert: Option<usize>,
}

impl ExpInfOverPolicies {
    pub fn new(policies: Vec<Policy>, arms: usize) -> Result<Self> {
        if policies.is_empty() {
            return Err(Error::InvalidParameter("empty policy list".into()));
        }
        for p in &policies {
            p.validate(arms)?;
        }
        let n = policies.len();
        Ok(Self {
            policies,
            state: ExpInf::new(Some(n))?,
            clock: StepClock::default(),
            last_expert: None,
        })
    }

    pub fn state(&self) -> &ExpInf {
        &self.state
    }
}

impl Learner for ExpInfOverPolicies {
    fn name(&self) -> &str {
        "expinf_policies"
    }

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex> {
        let t = self.clock.begin(history)?;
        let j = self.state.select(&mut rng.child(t));
        let a = self.policies[j].act(history.current());
        self.last_expert = Some(j);
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        let r = self.clock.finish(chosen, reward)?;
        self.state.update(r)
    }

    fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::default();
        self.state.fingerprint_into(&mut fp);
        fp.finish()
    }

    fn internals(&self) -> StepInternals {
        StepInternals {
            strategy: self.last_expert,
            ..StepInternals::default()
        }
    }
}

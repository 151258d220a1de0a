use std::collections::HashMap;

use crate::bandit::{ExpInf, Exp3Ix};
use crate::error::{Error, Result};
use crate::learner::{Learner, StepClock};
use crate::rng::RngStream;
use crate::types::{ActionIndex, Fingerprint, HistoryView};

#[derive(Clone, Debug)]
struct Slot<S> {
    state: S,
    visits: u64,
}

/// One independent EXP3.IX per distinct context uid.
///
/// The draw at the `n`-th visit of context `u` uses the sub-stream
/// `(u, n)`, so each sub-learner's trajectory does not depend on how
/// contexts interleave.
#[derive(Clone, Debug)]
pub struct PerInstanceExp3Ix {
    arms: usize,
    slots: HashMap<u64, Slot<Option<Exp3Ix>>>,
    clock: StepClock,
    pending_uid: Option<u64>,
}

impl PerInstanceExp3Ix {
    /// `arms = 1` is accepted and always plays arm 0.
    pub fn new(arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(Error::InvalidParameter("need at least one arm".into()));
        }
        Ok(Self {
            arms,
            slots: HashMap::new(),
            clock: StepClock::default(),
            pending_uid: None,
        })
    }

    /// Distribution the sub-learner of `uid` would use next.
    pub fn probs_for(&self, uid: u64) -> Vec<f64> {
        match self.slots.get(&uid).and_then(|s| s.state.as_ref()) {
            Some(s) => s.probs(),
            None => vec![1.0 / self.arms as f64; self.arms],
        }
    }

    pub fn instances(&self) -> usize {
        self.slots.len()
    }

    /// Fingerprint of a single sub-learner.
    pub fn instance_fingerprint(&self, uid: u64) -> Option<u64> {
        self.slots.get(&uid).map(|s| {
            let mut fp = Fingerprint::default();
            fp.word(s.visits);
            if let Some(st) = &s.state {
                st.fingerprint_into(&mut fp);
            }
            fp.finish()
        })
    }
}

impl Learner for PerInstanceExp3Ix {
    fn name(&self) -> &str {
        "per_instance_exp3ix"
    }

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex> {
        self.clock.begin(history)?;
        let uid = history.current().uid;
        let arms = self.arms;
        let slot = self.slots.entry(uid).or_insert_with(|| Slot {
            state: (arms >= 2).then(|| Exp3Ix::new(arms).expect("arms ≥ 2")),
            visits: 0,
        });
        let a = match slot.state.as_mut() {
            Some(s) => s.select(&mut rng.child(uid).child(slot.visits)),
            None => 0,
        };
        let a = ActionIndex(a);
        self.pending_uid = Some(uid);
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        let r = self.clock.finish(chosen, reward)?;
        let uid = self.pending_uid.take().ok_or(Error::UpdateWithoutSelect)?;
        let slot = self.slots.get_mut(&uid).expect("slot created at select");
        slot.visits += 1;
        if let Some(s) = slot.state.as_mut() {
            s.update(chosen.0, r)?;
        }
        Ok(())
    }

    fn fingerprint(&self) -> u64 {
        let mut uids: Vec<u64> = self.slots.keys().copied().collect();
        uids.sort_unstable();
        let mut fp = Fingerprint::default();
        for u in uids {
            fp.word(u).word(self.instance_fingerprint(u).expect("present"));
        }
        fp.finish()
    }
}

/// One independent EXPINF per distinct context uid; expert `j` plays
/// action `j` of the enumeration.
#[derive(Clone, Debug)]
pub struct PerInstanceExpInf {
    experts: Option<usize>,
    slots: HashMap<u64, Slot<ExpInf>>,
    clock: StepClock,
    pending_uid: Option<u64>,
}

impl PerInstanceExpInf {
    /// `experts = None` enumerates actions without bound.
    pub fn new(experts: Option<usize>) -> Result<Self> {
        ExpInf::new(experts)?;
        Ok(Self {
            experts,
            slots: HashMap::new(),
            clock: StepClock::default(),
            pending_uid: None,
        })
    }
}

impl Learner for PerInstanceExpInf {
    fn name(&self) -> &str {
        "per_instance_expinf"
    }

    fn select(&mut self, history: &HistoryView<'_>, rng: &RngStream) -> Result<ActionIndex> {
        self.clock.begin(history)?;
        let uid = history.current().uid;
        let experts = self.experts;
        let slot = self.slots.entry(uid).or_insert_with(|| Slot {
            state: ExpInf::new(experts).expect("validated at construction"),
            visits: 0,
        });
        let a = ActionIndex(slot.state.select(&mut rng.child(uid).child(slot.visits)));
        self.pending_uid = Some(uid);
        self.clock.commit(a);
        Ok(a)
    }

    fn update(&mut self, chosen: ActionIndex, reward: f64) -> Result<()> {
        let r = self.clock.finish(chosen, reward)?;
        let uid = self.pending_uid.take().ok_or(Error::UpdateWithoutSelect)?;
        let slot = self.slots.get_mut(&uid).expect("slot created at select");
        slot.visits += 1;
        slot.state.update(r)
    }

    fn fingerprint(&self) -> u64 {
        let mut uids: Vec<u64> = self.slots.keys().copied().collect();
        uids.sort_unstable();
        let mut fp = Fingerprint::default();
        for u in uids {
            let s = &self.slots[&u];
            fp.word(u).word(s.visits);
            s.state.fingerprint_into(&mut fp);
        }
        fp.finish()
    }
}

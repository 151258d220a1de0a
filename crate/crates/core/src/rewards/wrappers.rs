use std::collections::HashMap;

use super::{RewardMechanism, RewardTier, RewardView};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::timescales::{period_of, t_scale};

/// Time range `[start, end)` served by mechanism `mechanism`; masked ranges
/// pay 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseEntry {
    pub start: u64,
    pub end: u64,
    pub mechanism: usize,
    pub masked: bool,
}

/// Delegates each time to the mechanism of its phase.
pub struct PhaseSwitching {
    tier: RewardTier,
    arms: usize,
    phases: Vec<PhaseEntry>,
    mechanisms: Vec<Box<dyn RewardMechanism>>,
}

impl PhaseSwitching {
    pub fn new(
        tier: RewardTier,
        phases: Vec<PhaseEntry>,
        mechanisms: Vec<Box<dyn RewardMechanism>>,
    ) -> Result<Self> {
        if !matches!(tier, RewardTier::Oblivious | RewardTier::Online) {
            return Err(Error::InvalidParameter(format!(
                "phase switching runs at the oblivious or online tier, not {tier:?}"
            )));
        }
        let arms = mechanisms
            .first()
            .map(|m| m.arms())
            .ok_or_else(|| Error::InvalidParameter("no phase mechanisms".into()))?;
        if mechanisms.iter().any(|m| m.arms() != arms) {
            return Err(Error::InvalidParameter("phase mechanisms disagree on arms".into()));
        }
        for p in &phases {
            if p.start >= p.end || p.mechanism >= mechanisms.len() {
                return Err(Error::InvalidParameter(format!("bad phase entry {p:?}")));
            }
        }
        let mut sorted = phases;
        sorted.sort_by_key(|p| p.start);
        if sorted.windows(2).any(|w| w[0].end > w[1].start) {
            return Err(Error::InvalidParameter("overlapping phases".into()));
        }
        Ok(Self {
            tier,
            arms,
            phases: sorted,
            mechanisms,
        })
    }
}

impl RewardMechanism for PhaseSwitching {
    fn name(&self) -> &str {
        "phase_switching"
    }

    fn tier(&self) -> RewardTier {
        self.tier
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, view: &RewardView<'_>, rng: &RngStream, out: &mut [f64]) -> Result<()> {
        let t = view.time()?;
        let idx = self.phases.partition_point(|p| p.start <= t);
        let entry = idx
            .checked_sub(1)
            .map(|i| self.phases[i])
            .filter(|p| t < p.end)
            .ok_or(Error::UnmappedTime(t))?;
        if entry.masked {
            out.fill(0.0);
            return Ok(());
        }
        let inner = &mut self.mechanisms[entry.mechanism];
        let tier = inner.tier();
        inner.rewards(&view.with_tier(tier), rng, out)
    }
}

/// Pays the base reward only at the first occurrence of a context inside
/// its scale-`p` period, and 0 on any context that already occurred in an
/// earlier block. Blocks are `[starts[b], starts[b+1])`; times before the
/// first start form their own block.
pub struct OnlineDuplicateZeroing {
    base: Box<dyn RewardMechanism>,
    scale: u32,
    starts: Vec<u64>,
    processed: u64,
    // uid -> (block of first occurrence, last time seen)
    seen: HashMap<u64, (usize, u64)>,
}

impl OnlineDuplicateZeroing {
    pub fn new(base: Box<dyn RewardMechanism>, scale: u32, mut starts: Vec<u64>) -> Result<Self> {
        if base.tier() != RewardTier::Oblivious && base.tier() != RewardTier::Stationary {
            return Err(Error::InvalidParameter(format!(
                "duplicate zeroing wraps an oblivious mechanism, not {:?}",
                base.tier()
            )));
        }
        t_scale(scale, 0)?;
        starts.sort_unstable();
        starts.dedup();
        Ok(Self {
            base,
            scale,
            starts,
            processed: 0,
            seen: HashMap::new(),
        })
    }

    fn block(&self, t: u64) -> usize {
        self.starts.partition_point(|&s| s <= t)
    }

    fn period_start(&self, t: u64) -> u64 {
        t_scale(self.scale, period_of(t, self.scale)).expect("period start of a valid time")
    }
}

impl RewardMechanism for OnlineDuplicateZeroing {
    fn name(&self) -> &str {
        "online_duplicate_zeroing"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Online
    }

    fn arms(&self) -> usize {
        self.base.arms()
    }

    fn rewards(&mut self, view: &RewardView<'_>, rng: &RngStream, out: &mut [f64]) -> Result<()> {
        let t = view.time()?;
        let past = view.past_contexts()?;
        if t <= self.processed {
            self.processed = 0;
            self.seen.clear();
        }
        while self.processed + 1 < t {
            let s = self.processed + 1;
            let x = past[(s - 1) as usize];
            let b = self.block(s);
            self.seen
                .entry(x.uid)
                .and_modify(|e| e.1 = s)
                .or_insert((b, s));
            self.processed = s;
        }
        let x = view.current();
        let zero = match self.seen.get(&x.uid) {
            Some(&(first_block, last)) => {
                first_block < self.block(t) || last >= self.period_start(t)
            }
            None => false,
        };
        if zero {
            out.fill(0.0);
            return Ok(());
        }
        let tier = self.base.tier();
        self.base.rewards(&view.with_tier(tier), rng, out)
    }
}

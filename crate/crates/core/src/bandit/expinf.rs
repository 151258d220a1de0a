use serde::{Deserialize, Serialize};

use super::Exp3Ix;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{check_reward, Fingerprint};

/// Number of steps before period `k ≥ 1` starts: `i(k) = Σ_{r<k} r^3`.
pub fn expinf_period_start(k: u64) -> u64 {
    let s = (k - 1) * k / 2;
    s * s
}

/// EXPINF over an expert list of length `experts` (`None` for unbounded).
///
/// Period `k` covers global steps `i(k)+1 … i(k)+k^3` and runs a fresh
/// EXP3.IX over the first `min(k, experts)` experts. A one-expert period
/// needs no randomisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpInf {
    experts: Option<usize>,
    period: u64,
    done_in_period: u64,
    inner: Option<Exp3Ix>,
    pending: Option<usize>,
}

impl ExpInf {
    pub fn new(experts: Option<usize>) -> Result<Self> {
        if experts == Some(0) {
            return Err(Error::InvalidParameter("EXPINF needs at least one expert".into()));
        }
        Ok(Self {
            experts,
            period: 1,
            done_in_period: 0,
            inner: None,
            pending: None,
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Experts active in the current period.
    pub fn active(&self) -> usize {
        let k = self.period.min(usize::MAX as u64) as usize;
        match self.experts {
            Some(n) => k.min(n),
            None => k,
        }
    }

    pub fn period_len(&self) -> u64 {
        self.period.pow(3)
    }

    /// Distribution over the active experts for the upcoming step.
    pub fn probs(&self) -> Vec<f64> {
        match &self.inner {
            Some(s) => s.probs(),
            None => {
                let n = self.active();
                vec![1.0 / n as f64; n]
            }
        }
    }

    pub fn select(&mut self, rng: &mut RngStream) -> usize {
        let n = self.active();
        let j = if n == 1 {
            0
        } else {
            let inner = self
                .inner
                .get_or_insert_with(|| Exp3Ix::new(n).expect("n ≥ 2"));
            inner.select(rng)
        };
        self.pending = Some(j);
        j
    }

    pub fn update(&mut self, reward: f64) -> Result<()> {
        let r = check_reward(reward)?;
        let j = self.pending.take().ok_or(Error::UpdateWithoutSelect)?;
        if let Some(inner) = self.inner.as_mut() {
            inner.update(j, r)?;
        }
        self.done_in_period += 1;
        if self.done_in_period == self.period_len() {
            self.period += 1;
            self.done_in_period = 0;
            self.inner = None;
        }
        Ok(())
    }

    pub fn fingerprint_into(&self, fp: &mut Fingerprint) {
        fp.word(self.period).word(self.done_in_period);
        if let Some(inner) = &self.inner {
            inner.fingerprint_into(fp);
        }
    }
}

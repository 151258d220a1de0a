use serde::{Deserialize, Serialize};

use super::softmax;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{check_reward, Fingerprint};

/// EXP3.IX state for `K ≥ 2` arms.
///
/// Probabilities are `∝ exp(-η_u L̂_a)` with `u = updates + 1`; after the
/// chosen arm `a` yields reward `r`, `L̂_a += (1 - r) / (p_a + γ_u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exp3Ix {
    arms: usize,
    updates: u64,
    lhat: Vec<f64>,
    last_probs: Option<Vec<f64>>,
}

impl Exp3Ix {
    pub fn new(arms: usize) -> Result<Self> {
        if arms < 2 {
            return Err(Error::InvalidParameter(format!(
                "EXP3.IX needs at least 2 arms, got {arms}"
            )));
        }
        Ok(Self {
            arms,
            updates: 0,
            lhat: vec![0.0; arms],
            last_probs: None,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn loss_estimates(&self) -> &[f64] {
        &self.lhat
    }

    /// `η_u` for the upcoming step.
    pub fn eta(&self) -> f64 {
        let k = self.arms as f64;
        (k.ln() / (k * (self.updates + 1) as f64)).sqrt()
    }

    /// `γ_u = η_u / 2`.
    pub fn gamma(&self) -> f64 {
        self.eta() / 2.0
    }

    /// Sampling distribution for the upcoming step.
    pub fn probs(&self) -> Vec<f64> {
        softmax(&self.lhat, -self.eta())
    }

    /// Draws an arm and caches the distribution it was drawn from.
    pub fn select(&mut self, rng: &mut RngStream) -> usize {
        let p = self.probs();
        let arm = rng.categorical(&p);
        self.last_probs = Some(p);
        arm
    }

    /// Caches the distribution without drawing (for callers that draw
    /// themselves).
    pub fn prepare(&mut self) -> &[f64] {
        let p = self.probs();
        self.last_probs.insert(p)
    }

    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if arm >= self.arms {
            return Err(Error::ArmOutOfRange {
                arm,
                arms: self.arms,
            });
        }
        let r = check_reward(reward)?;
        let probs = self.last_probs.take().ok_or(Error::UpdateWithoutSelect)?;
        let gamma = self.gamma();
        self.lhat[arm] += (1.0 - r) / (probs[arm] + gamma);
        self.updates += 1;
        Ok(())
    }

    pub fn fingerprint_into(&self, fp: &mut Fingerprint) {
        fp.word(self.arms as u64).word(self.updates).floats(&self.lhat);
    }
}

use serde::{Deserialize, Serialize};

use super::softmax;
use crate::error::{Error, Result};
use crate::types::Fingerprint;

/// Exponential weights over `N` experts at a fixed rate.
///
/// Inputs are reward estimates; importance-weighted values above 1 are
/// accepted as-is.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hedge {
    eta: f64,
    rhat: Vec<f64>,
}

impl Hedge {
    pub fn new(experts: usize, eta: f64) -> Result<Self> {
        if experts == 0 {
            return Err(Error::InvalidParameter("Hedge needs at least one expert".into()));
        }
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::InvalidParameter(format!("Hedge rate {eta}")));
        }
        Ok(Self {
            eta,
            rhat: vec![0.0; experts],
        })
    }

    pub fn experts(&self) -> usize {
        self.rhat.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.rhat
    }

    /// `P_j ∝ exp(η R̂_j)`.
    pub fn probs(&self) -> Vec<f64> {
        softmax(&self.rhat, self.eta)
    }

    pub fn update(&mut self, rewards: &[f64]) -> Result<()> {
        if rewards.len() != self.rhat.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rewards for {} experts",
                rewards.len(),
                self.rhat.len()
            )));
        }
        if let Some(bad) = rewards.iter().find(|r| !r.is_finite()) {
            return Err(Error::NonFinite(format!("Hedge reward {bad}")));
        }
        for (acc, r) in self.rhat.iter_mut().zip(rewards) {
            *acc += r;
        }
        Ok(())
    }

    pub fn fingerprint_into(&self, fp: &mut Fingerprint) {
        fp.float(self.eta).floats(&self.rhat);
    }
}

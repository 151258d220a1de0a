use serde::{Deserialize, Serialize};

use super::{
    resolution_for, BernoulliArms, CellBernoulli, ContextBernoulli, OnlineDuplicateZeroing,
    PartitionBernoulli, RewardMechanism, RewardTier, TitForTat, ZeroReward,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sets::Region;
use crate::types::ContextPoint;

/// Serializable description of a reward mechanism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardSpec {
    Zero {
        arms: usize,
    },
    Bernoulli {
        means: Vec<f64>,
    },
    CellBernoulli {
        depth: u32,
        means: Vec<Vec<f64>>,
    },
    ContextBernoulli {
        arms: usize,
        high: f64,
        low: f64,
        #[serde(default)]
        salt: u64,
    },
    PartitionBernoulli {
        arms: usize,
        /// Cell exponent; chosen from the realized stream when absent.
        #[serde(default)]
        resolution: Option<u32>,
        #[serde(default)]
        a1: usize,
        #[serde(default = "default_a2")]
        a2: usize,
        #[serde(default)]
        support: Option<Region>,
    },
    DuplicateZeroing {
        base: Box<RewardSpec>,
        scale: u32,
        #[serde(default)]
        block_starts: Vec<u64>,
    },
    TitForTat {
        arms: usize,
    },
}

fn default_a2() -> usize {
    1
}

impl RewardSpec {
    pub fn arms(&self) -> usize {
        match self {
            RewardSpec::Zero { arms }
            | RewardSpec::ContextBernoulli { arms, .. }
            | RewardSpec::PartitionBernoulli { arms, .. }
            | RewardSpec::TitForTat { arms } => *arms,
            RewardSpec::Bernoulli { means } => means.len(),
            RewardSpec::CellBernoulli { means, .. } => means.first().map_or(0, Vec::len),
            RewardSpec::DuplicateZeroing { base, .. } => base.arms(),
        }
    }

    pub fn tier(&self) -> RewardTier {
        match self {
            RewardSpec::Zero { .. }
            | RewardSpec::Bernoulli { .. }
            | RewardSpec::CellBernoulli { .. }
            | RewardSpec::ContextBernoulli { .. } => RewardTier::Stationary,
            RewardSpec::PartitionBernoulli { .. } => RewardTier::Oblivious,
            RewardSpec::DuplicateZeroing { .. } => RewardTier::Online,
            RewardSpec::TitForTat { .. } => RewardTier::Adversarial,
        }
    }

    /// Builds the mechanism for a realized stream. `rng` keys any internal
    /// tables (partition bits).
    pub fn build(
        &self,
        stream: &[ContextPoint],
        rng: &RngStream,
    ) -> Result<Box<dyn RewardMechanism>> {
        Ok(match self {
            RewardSpec::Zero { arms } => {
                if *arms == 0 {
                    return Err(Error::InvalidParameter("zero arms".into()));
                }
                Box::new(ZeroReward::new(*arms))
            }
            RewardSpec::Bernoulli { means } => Box::new(BernoulliArms::new(means.clone())?),
            RewardSpec::CellBernoulli { depth, means } => {
                Box::new(CellBernoulli::new(*depth, means.clone())?)
            }
            RewardSpec::ContextBernoulli {
                arms,
                high,
                low,
                salt,
            } => Box::new(ContextBernoulli::new(*arms, *high, *low, *salt)?),
            RewardSpec::PartitionBernoulli {
                arms,
                resolution,
                a1,
                a2,
                support,
            } => {
                let m = match resolution {
                    Some(m) => *m,
                    None => resolution_for(stream)?,
                };
                let mut mech = PartitionBernoulli::new(m, *arms, *a1, *a2, rng.named("bits"))?;
                if let Some(s) = support {
                    mech = mech.with_support(s.clone());
                }
                Box::new(mech)
            }
            RewardSpec::DuplicateZeroing {
                base,
                scale,
                block_starts,
            } => Box::new(OnlineDuplicateZeroing::new(
                base.build(stream, rng)?,
                *scale,
                block_starts.clone(),
            )?),
            RewardSpec::TitForTat { arms } => {
                if *arms == 0 {
                    return Err(Error::InvalidParameter("zero arms".into()));
                }
                Box::new(TitForTat::new(*arms))
            }
        })
    }
}

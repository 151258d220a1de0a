//! Seeded context generators.
//!
//! Every generator is an iterator of [`Emission`]s: a context point plus a
//! ground-truth [`Note`] describing where the step sits in the
//! construction. Fresh draws always get fresh uids; duplicates are copies.
//! The idle symbol is [`ContextPoint::idle`].

mod dup_block;
mod dyadic;
mod iid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::ContextPoint;

pub use dup_block::{DupBlock, DupBlockLayout, OuterPeriod};
pub use dyadic::{
    c2_not_c4_block_start, dyadic_class, C2NotC4, C4NotC6, C5Scheduled, Condition8Witness,
};
pub use iid::{DeterministicC2, DistinctSchedule, FiniteSupportIid, IidUniform};

/// Where a step sits in its construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    /// Block or phase label; 0 for idle steps.
    pub segment: u64,
    /// Carrier class or duplication scale.
    pub class: u32,
    /// 1-based repetition of the current value inside its block; 0 if idle.
    pub rep: u32,
    /// Index of the fresh draw inside its block.
    pub slot: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emission {
    pub point: ContextPoint,
    pub note: Note,
}

/// A context generator.
pub trait ContextProcess: Iterator<Item = Emission> + Send {}

impl<T: Iterator<Item = Emission> + Send> ContextProcess for T {}

/// A generated prefix.
#[derive(Clone, Debug, Default)]
pub struct Stream {
    pub points: Vec<ContextPoint>,
    pub notes: Vec<Note>,
}

impl Stream {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Hands out fresh uids; 0 is reserved for the idle symbol.
#[derive(Clone, Debug)]
pub(crate) struct UidSource(u64);

impl Default for UidSource {
    fn default() -> Self {
        Self(1)
    }
}

impl UidSource {
    pub(crate) fn fresh(&mut self) -> u64 {
        let u = self.0;
        self.0 += 1;
        u
    }
}

/// Serializable description of a generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessSpec {
    IidUniform,
    FiniteSupportIid {
        points: Vec<f64>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    DeterministicC2 {
        schedule: DistinctSchedule,
    },
    DupBlock {
        /// `ε = 2^-eps_log2`.
        eps_log2: u32,
        base: u64,
        periods: u32,
        #[serde(default = "default_block_cap")]
        max_block: u64,
    },
    C2NotC4,
    C4NotC6,
    C5Scheduled {
        growth: u32,
        cap: u64,
    },
    Condition8Witness,
}

fn default_block_cap() -> u64 {
    1 << 24
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::FiniteSupportIid { points, weights } => {
                FiniteSupportIid::new(points.clone(), weights.clone()).map(|_| ())
            }
            ProcessSpec::DeterministicC2 { schedule } => schedule.validate(),
            ProcessSpec::DupBlock {
                eps_log2,
                base,
                periods,
                max_block,
            } => DupBlockLayout::new(*eps_log2, *base, *periods, *max_block).map(|_| ()),
            ProcessSpec::C5Scheduled { growth, cap } => {
                if *growth == 0 || *cap == 0 {
                    return Err(Error::InvalidParameter(
                        "c5_scheduled needs growth ≥ 1 and cap ≥ 1".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Builds the generator on `rng`.
    pub fn build(&self, rng: RngStream) -> Result<Box<dyn ContextProcess>> {
        self.validate()?;
        Ok(match self {
            ProcessSpec::IidUniform => Box::new(IidUniform::new(rng)),
            ProcessSpec::FiniteSupportIid { points, weights } => {
                Box::new(FiniteSupportIid::new(points.clone(), weights.clone())?.on(rng))
            }
            ProcessSpec::DeterministicC2 { schedule } => {
                Box::new(DeterministicC2::new(schedule.clone(), rng)?)
            }
            ProcessSpec::DupBlock {
                eps_log2,
                base,
                periods,
                max_block,
            } => Box::new(DupBlock::new(
                DupBlockLayout::new(*eps_log2, *base, *periods, *max_block)?,
                rng,
            )),
            ProcessSpec::C2NotC4 => Box::new(C2NotC4::new(rng)),
            ProcessSpec::C4NotC6 => Box::new(C4NotC6::new(rng)),
            ProcessSpec::C5Scheduled { growth, cap } => {
                Box::new(C5Scheduled::new(*growth, *cap, rng))
            }
            ProcessSpec::Condition8Witness => Box::new(Condition8Witness::new(rng)),
        })
    }

    /// The first `horizon` steps.
    pub fn generate(&self, horizon: u64, rng: RngStream) -> Result<Stream> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be ≥ 1".into()));
        }
        if let ProcessSpec::DeterministicC2 { schedule } = self {
            schedule.check_horizon(horizon)?;
        }
        let mut s = Stream {
            points: Vec::with_capacity(horizon as usize),
            notes: Vec::with_capacity(horizon as usize),
        };
        for e in self.build(rng)?.take(horizon as usize) {
            s.points.push(e.point);
            s.notes.push(e.note);
        }
        Ok(s)
    }
}

use super::{Emission, Note, UidSource};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::ContextPoint;

/// One outer period `[T^i, T^{i+1})` of the duplication-block process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OuterPeriod {
    pub index: u32,
    /// `T^i`.
    pub start: u64,
    /// `k_i`: fresh draws per block.
    pub cells: u64,
    /// `2 T^i`, first idle step after the block.
    pub block_end: u64,
    /// `T^{i+1}`.
    pub end: u64,
}

impl OuterPeriod {
    pub fn contains_block(&self, t: u64) -> bool {
        self.start <= t && t < self.block_end
    }
}

/// Timing of the duplication-block process: `T^i = (1+i)!·2^k·T0` and
/// `k_i = (1+i)!·T0`, so each block `[T^i, 2T^i)` is `2^k` verbatim copies
/// of `k_i` fresh draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DupBlockLayout {
    pub eps_log2: u32,
    pub base: u64,
    pub reps: u64,
    pub periods: Vec<OuterPeriod>,
}

impl DupBlockLayout {
    pub fn new(eps_log2: u32, base: u64, periods: u32, max_block: u64) -> Result<Self> {
        if eps_log2 == 0 || eps_log2 > 20 {
            return Err(Error::InvalidParameter(format!(
                "ε = 2^-{eps_log2} must have exponent in 1..=20"
            )));
        }
        if base == 0 || periods == 0 {
            return Err(Error::InvalidParameter("base time and period count must be ≥ 1".into()));
        }
        let reps = 1u64 << eps_log2;
        let overflow = || Error::Overflow("duplication-block times".into());
        let mut fact: u64 = 1; // (1+i)!
        let mut out = Vec::with_capacity(periods as usize);
        for i in 0..periods {
            fact = fact.checked_mul(i as u64 + 1).ok_or_else(overflow)?;
            let cells = fact.checked_mul(base).ok_or_else(overflow)?;
            if cells > max_block {
                return Err(Error::MemoryGuard(format!(
                    "block {i} needs {cells} fresh draws, cap is {max_block}"
                )));
            }
            let start = cells.checked_mul(reps).ok_or_else(overflow)?;
            let next = start.checked_mul(i as u64 + 2).ok_or_else(overflow)?;
            out.push(OuterPeriod {
                index: i,
                start,
                cells,
                block_end: start.checked_mul(2).ok_or_else(overflow)?,
                end: next,
            });
        }
        Ok(Self {
            eps_log2,
            base,
            reps,
            periods: out,
        })
    }

    /// Outer period whose block contains `t`.
    pub fn block_at(&self, t: u64) -> Option<&OuterPeriod> {
        self.periods.iter().find(|p| p.contains_block(t))
    }

    /// Last step of the first block, `2T^0 - 1`.
    pub fn first_block_last_step(&self) -> u64 {
        self.periods[0].block_end - 1
    }
}

/// The duplication-block generator. Idle on `[1, T^0)`, on every
/// `[2T^i, T^{i+1})` and after the last configured period.
#[derive(Clone, Debug)]
pub struct DupBlock {
    layout: DupBlockLayout,
    rng: RngStream,
    uids: UidSource,
    t: u64,
    current: usize,
    block: Vec<ContextPoint>,
}

impl DupBlock {
    pub fn new(layout: DupBlockLayout, rng: RngStream) -> Self {
        Self {
            layout,
            rng,
            uids: UidSource::default(),
            t: 0,
            current: 0,
            block: Vec::new(),
        }
    }

    pub fn layout(&self) -> &DupBlockLayout {
        &self.layout
    }
}

impl Iterator for DupBlock {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.t += 1;
        let t = self.t;
        while self.current < self.layout.periods.len() && t >= self.layout.periods[self.current].end
        {
            self.current += 1;
        }
        let idle = Emission {
            point: ContextPoint::idle(),
            note: Note::default(),
        };
        let Some(per) = self.layout.periods.get(self.current).copied() else {
            return Some(idle);
        };
        if !per.contains_block(t) {
            return Some(idle);
        }
        let r = t - per.start;
        let rep = r / per.cells + 1;
        let slot = r % per.cells;
        if r == 0 {
            self.block.clear();
            self.block.reserve(per.cells as usize);
        }
        let point = if rep == 1 {
            let p = ContextPoint {
                coord: self.rng.open01(),
                uid: self.uids.fresh(),
            };
            self.block.push(p);
            p
        } else {
            self.block[slot as usize]
        };
        Some(Emission {
            point,
            note: Note {
                segment: per.index as u64 + 1,
                class: self.layout.eps_log2,
                rep: rep as u32,
                slot,
            },
        })
    }
}

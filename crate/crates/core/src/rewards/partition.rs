use std::collections::HashMap;

use super::{RewardMechanism, RewardTier, RewardView};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sets::Region;
use crate::types::ContextPoint;

/// Smallest `m` such that cells of width `2^-m` are at most half the
/// minimum gap between the distinct non-idle coordinates of `points`, so
/// that distinct points land in distinct cells.
pub fn resolution_for(points: &[ContextPoint]) -> Result<u32> {
    let mut coords: Vec<f64> = points
        .iter()
        .filter(|p| !p.is_idle())
        .map(|p| p.coord)
        .collect();
    coords.sort_by(f64::total_cmp);
    coords.dedup();
    let gap = coords
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Ok(1);
    }
    let half = gap / 2.0;
    let mut m = 1u32;
    while 0.5f64.powi(m as i32) > half {
        m += 1;
        if m > 60 {
            return Err(Error::InvalidParameter(format!(
                "coordinates closer than 2^-60 (gap {gap:e})"
            )));
        }
    }
    Ok(m)
}

/// Dyadic-cell rewards: on the support, arm `a1` pays the cell's Bernoulli(1/2)
/// bit and arm `a2` pays 3/4; every other arm, every off-support point and
/// the idle symbol pay 0.
///
/// Bits are drawn lazily from the key `(phase, cell)` and memoised; a cell
/// reached by two distinct contexts is an error, since the construction
/// needs every context to own its cell.
#[derive(Clone, Debug)]
pub struct PartitionBernoulli {
    resolution: u32,
    arms: usize,
    a1: usize,
    a2: usize,
    support: Region,
    phase: u64,
    rng: RngStream,
    cells: HashMap<u64, (bool, u64)>,
}

impl PartitionBernoulli {
    pub fn new(resolution: u32, arms: usize, a1: usize, a2: usize, rng: RngStream) -> Result<Self> {
        if !(1..=60).contains(&resolution) {
            return Err(Error::InvalidParameter(format!("resolution 2^-{resolution}")));
        }
        if a1 == a2 || a1 >= arms || a2 >= arms {
            return Err(Error::InvalidParameter(format!(
                "arms a1 = {a1}, a2 = {a2} must be distinct and below {arms}"
            )));
        }
        Ok(Self {
            resolution,
            arms,
            a1,
            a2,
            support: Region::Full,
            phase: 0,
            rng,
            cells: HashMap::new(),
        })
    }

    pub fn with_support(mut self, support: Region) -> Self {
        self.support = support;
        self
    }

    /// Label of the independent bit table.
    pub fn with_phase(mut self, phase: u64) -> Self {
        self.phase = phase;
        self
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn a1(&self) -> usize {
        self.a1
    }

    pub fn a2(&self) -> usize {
        self.a2
    }

    pub fn cell_of(&self, x: f64) -> u64 {
        let n = 1u64 << self.resolution;
        ((x * n as f64) as u64).min(n - 1)
    }

    /// The bit of a cell; a pure function of `(seed, phase, cell)`.
    pub fn bit(&self, cell: u64) -> bool {
        self.rng.child(self.phase).child(cell).bernoulli(0.5)
    }

    /// Bit of `x`'s cell, recording which context owns the cell.
    fn bit_for(&mut self, x: &ContextPoint) -> Result<bool> {
        let cell = self.cell_of(x.coord);
        if let Some(&(b, owner)) = self.cells.get(&cell) {
            if owner != x.uid {
                return Err(Error::CellCollision {
                    resolution: self.resolution,
                    cell,
                    first: owner,
                    second: x.uid,
                });
            }
            return Ok(b);
        }
        let b = self.bit(cell);
        self.cells.insert(cell, (b, x.uid));
        Ok(b)
    }

    /// Rewards at `x` without going through a view.
    pub fn vector_at(&mut self, x: &ContextPoint, out: &mut [f64]) -> Result<()> {
        out.fill(0.0);
        if x.is_idle() || !self.support.contains(x.coord) {
            return Ok(());
        }
        let b = self.bit_for(x)?;
        out[self.a1] = if b { 1.0 } else { 0.0 };
        out[self.a2] = 0.75;
        Ok(())
    }
}

impl RewardMechanism for PartitionBernoulli {
    fn name(&self) -> &str {
        "partition_bernoulli"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Oblivious
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, view: &RewardView<'_>, _rng: &RngStream, out: &mut [f64]) -> Result<()> {
        self.vector_at(view.current(), out)
    }
}

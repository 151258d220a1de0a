//! Measurable subsets of `[0, 1]` used by reward supports and diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open interval `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn len(&self) -> f64 {
        (self.hi.min(1.0) - self.lo.max(0.0)).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }
}

/// A subset of `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Empty,
    /// All of `[0, 1]`, both endpoints included.
    Full,
    /// Finite union of half-open intervals.
    Intervals { parts: Vec<Interval> },
    /// `⋃_{0≤j<2^l} [j·2^p / 2^{p+l}, (j·2^p + 1) / 2^{p+l}]`, of measure `2^-p`.
    DyadicComb { p: u32, l: u32 },
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(Region::Intervals {
            parts: vec![Interval::new(lo, hi)?],
        })
    }

    /// Union of intervals; parts are sorted and merged.
    pub fn union_of(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| !p.is_empty());
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => merged.push(p),
            }
        }
        Region::Intervals { parts: merged }
    }

    /// Carrier `[2^-i, 2^-i+1)` of class `i ≥ 1`.
    pub fn dyadic_carrier(i: u32) -> Self {
        let lo = 0.5f64.powi(i as i32);
        Region::Intervals {
            parts: vec![Interval { lo, hi: 2.0 * lo }],
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Region::Empty => false,
            Region::Full => (0.0..=1.0).contains(&x),
            Region::Intervals { parts } => {
                // parts are sorted and disjoint after union_of; fall back to a
                // scan for hand-built lists
                match parts.binary_search_by(|p| p.lo.total_cmp(&x)) {
                    Ok(_) => true,
                    Err(0) => false,
                    Err(pos) => parts[pos - 1].contains(x) || parts.iter().any(|p| p.contains(x)),
                }
            }
            Region::DyadicComb { p, l } => comb_contains(*p, *l, x),
        }
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        match self {
            Region::Empty => 0.0,
            Region::Full => 1.0,
            Region::Intervals { parts } => parts.iter().map(Interval::len).sum(),
            Region::DyadicComb { p, .. } => 0.5f64.powi(*p as i32),
        }
    }
}

fn comb_contains(p: u32, l: u32, x: f64) -> bool {
    if !(0.0..=1.0).contains(&x) {
        return false;
    }
    if p == 0 {
        return true;
    }
    let scale = (p + l) as i32;
    let y = x * 2f64.powi(scale); // exact: power-of-two scaling
    let period = 2f64.powi(p as i32);
    if y >= 2f64.powi(scale) {
        return false;
    }
    let r = y - (y / period).floor() * period;
    r <= 1.0
}

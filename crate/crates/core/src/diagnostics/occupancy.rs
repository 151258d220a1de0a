use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::Region;
use crate::timescales::FirstAppearanceTracker;
use crate::types::ContextPoint;

/// Which times count towards a statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selector {
    All,
    /// The first-appearance set `T^p`.
    FirstAppearance { scale: u32 },
    /// An explicit membership mask, index `t - 1`.
    Mask { mask: Vec<bool> },
}

impl Selector {
    fn mask(&self, stream: &[ContextPoint]) -> Result<Vec<bool>> {
        match self {
            Selector::All => Ok(vec![true; stream.len()]),
            Selector::FirstAppearance { scale } => FirstAppearanceTracker::mask(*scale, stream),
            Selector::Mask { mask } => {
                if mask.len() < stream.len() {
                    return Err(Error::InvalidParameter(format!(
                        "selector mask of length {} for a stream of {}",
                        mask.len(),
                        stream.len()
                    )));
                }
                Ok(mask[..stream.len()].to_vec())
            }
        }
    }
}

/// Horizon range `[t_min, t_max]` over which a limsup is replaced by a max.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub t_min: u64,
    pub t_max: u64,
}

impl Window {
    pub fn new(t_min: u64, t_max: u64) -> Self {
        Self { t_min, t_max }
    }

    /// Whole prefix.
    pub fn full(len: usize) -> Self {
        Self {
            t_min: 1,
            t_max: len as u64,
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        if self.t_min == 0 || self.t_min > self.t_max || self.t_max > len as u64 {
            return Err(Error::EmptyWindow);
        }
        Ok(())
    }
}

/// A finite family of subsets of `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SetFamily {
    pub sets: Vec<Region>,
}

impl SetFamily {
    pub fn new(sets: Vec<Region>) -> Self {
        Self { sets }
    }

    /// `[0, 2^-j)` for `j = 0..n`.
    pub fn shrinking_intervals(n: u32) -> Self {
        Self {
            sets: (0..n)
                .map(|j| Region::interval(0.0, 0.5f64.powi(j as i32)).expect("valid interval"))
                .collect(),
        }
    }
}

/// Max over `T` in the window of `count(T) / T`, where `count` is a
/// running sum of `hits`.
fn windowed_max(hits: impl Iterator<Item = bool>, window: Window) -> f64 {
    let mut count = 0u64;
    let mut best = 0.0f64;
    for (i, h) in hits.enumerate().take(window.t_max as usize) {
        count += h as u64;
        let t = i as u64 + 1;
        if t >= window.t_min {
            best = best.max(count as f64 / t as f64);
        }
    }
    best
}

/// `max_{T ∈ window} (1/T) Σ_{t ≤ T, t selected} 1_A(X_t)`.
pub fn empirical_submeasure(
    stream: &[ContextPoint],
    selector: &Selector,
    set: &Region,
    window: Window,
) -> Result<f64> {
    window.check(stream.len())?;
    let mask = selector.mask(&stream[..window.t_max as usize])?;
    Ok(windowed_max(
        stream
            .iter()
            .zip(&mask)
            .map(|(x, &m)| m && set.contains(x.coord)),
        window,
    ))
}

/// Powers of two up to `horizon`, plus `horizon` itself.
pub fn log_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64)
        .map(|e| 1u64 << e)
        .take_while(|&c| c <= horizon)
        .collect();
    if horizon > 0 && out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

/// `N(T) / T` at each checkpoint, `N(T)` the number of distinct contexts in
/// the first `T` steps.
pub fn distinct_visit_curve(stream: &[ContextPoint], checkpoints: &[u64]) -> Vec<(u64, f64)> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut cps = checkpoints
        .iter()
        .copied()
        .filter(|&c| c >= 1 && c <= stream.len() as u64)
        .peekable();
    for (i, x) in stream.iter().enumerate() {
        seen.insert(x.uid);
        let t = i as u64 + 1;
        while cps.peek() == Some(&t) {
            cps.next();
            out.push((t, seen.len() as f64 / t as f64));
        }
    }
    out
}

/// Windowed empirical submeasure of every set of `family` along `T^p`.
pub fn scale_occupancy(
    stream: &[ContextPoint],
    p: u32,
    family: &SetFamily,
    window: Window,
) -> Result<Vec<f64>> {
    window.check(stream.len())?;
    let mask = FirstAppearanceTracker::mask(p, &stream[..window.t_max as usize])?;
    Ok(family
        .sets
        .iter()
        .map(|a| {
            windowed_max(
                stream
                    .iter()
                    .zip(&mask)
                    .map(|(x, &m)| m && a.contains(x.coord)),
                window,
            )
        })
        .collect())
}

/// `sup_{T' ≥ T} (1/T') Σ_{t ≤ T', t ∈ T^p} 1_A(X_t)` over the prefix.
pub fn deviation_stat(stream: &[ContextPoint], p: u32, set: &Region, t: u64) -> Result<f64> {
    empirical_submeasure(
        stream,
        &Selector::FirstAppearance { scale: p },
        set,
        Window::new(t, stream.len() as u64),
    )
}

/// The deviation statistic on a fixed grid of start times, standing in for
/// the stopping-time quantifier, which has no finite surrogate.
pub fn deviation_grid(
    stream: &[ContextPoint],
    p: u32,
    set: &Region,
    grid: &[u64],
) -> Result<Vec<(u64, f64)>> {
    let mask = FirstAppearanceTracker::mask(p, stream)?;
    let n = stream.len();
    // suffix maxima of the running ratio
    let mut ratio = Vec::with_capacity(n);
    let mut count = 0u64;
    for (i, (x, &m)) in stream.iter().zip(&mask).enumerate() {
        count += (m && set.contains(x.coord)) as u64;
        ratio.push(count as f64 / (i + 1) as f64);
    }
    let mut suffix = ratio;
    for i in (0..n.saturating_sub(1)).rev() {
        suffix[i] = suffix[i].max(suffix[i + 1]);
    }
    grid.iter()
        .map(|&t| {
            if t == 0 || t as usize > n {
                Err(Error::EmptyWindow)
            } else {
                Ok((t, suffix[t as usize - 1]))
            }
        })
        .collect()
}

/// Fenwick tree over occurrence counts.
struct Fenwick(Vec<u64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    fn add(&mut self, i: usize) {
        let mut i = i;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over indices `1..=i`.
    fn prefix(&self, i: usize) -> u64 {
        let mut i = i.min(self.0.len() - 1);
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// For each set `A`: `max_{T ∈ window} (1/T) Σ_{t ≤ T} 1_A(X_t)·1[N_t(X_t) ≤ Ψ(T)]`,
/// where `N_t(x)` counts the occurrences of `x` in the first `t` steps.
pub fn duplicate_cap_curve(
    stream: &[ContextPoint],
    psi: &dyn Fn(u64) -> u64,
    family: &SetFamily,
    window: Window,
) -> Result<Vec<f64>> {
    window.check(stream.len())?;
    let n = window.t_max as usize;
    let mut occ: HashMap<u64, usize> = HashMap::new();
    let counts: Vec<usize> = stream[..n]
        .iter()
        .map(|x| {
            let c = occ.entry(x.uid).or_insert(0);
            *c += 1;
            *c
        })
        .collect();
    let mut out = Vec::with_capacity(family.sets.len());
    for a in &family.sets {
        let mut tree = Fenwick::new(n);
        let mut best = 0.0f64;
        let mut prev_psi = 0u64;
        for (i, x) in stream[..n].iter().enumerate() {
            if a.contains(x.coord) {
                tree.add(counts[i]);
            }
            let t = i as u64 + 1;
            let cap = psi(t);
            if cap < prev_psi {
                return Err(Error::InvalidParameter(format!(
                    "cap schedule decreases at T = {t}"
                )));
            }
            prev_psi = cap;
            if t >= window.t_min {
                let hits = tree.prefix(cap.min(n as u64) as usize);
                best = best.max(hits as f64 / t as f64);
            }
        }
        out.push(best);
    }
    Ok(out)
}

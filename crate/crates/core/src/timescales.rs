//! Exponential time scales.
//!
//! Scale `i` cuts `[1, ∞)` into periods `[T_i^k, T_i^{k+1})` with
//! `T_i^k = ⌊2^u (1 + v·2^-i)⌋` for `k = u·2^i + v`. Scale 0 is the doubling
//! grid; each further scale halves every period. A time is in the
//! first-appearance set `T^i` when its context has not occurred earlier in
//! its scale-`i` period.
//!
//! The phase schedule `u(0) = 0 < u(1) < …` groups stages `[2^l, 2^{l+1})`
//! into phases: phase `i` covers the stages `u(i) ≤ l < u(i+1)` and splits
//! each of them into `2^i` equal periods.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ContextPoint;

/// Largest scale index supported; keeps `2^i` and `v` in 64 bits.
pub const MAX_SCALE: u32 = 62;

fn check_scale(i: u32) -> Result<()> {
    if i > MAX_SCALE {
        return Err(Error::InvalidParameter(format!(
            "scale {i} exceeds {MAX_SCALE}"
        )));
    }
    Ok(())
}

/// `T_i^k`. Errors if the value does not fit in 64 bits.
pub fn t_scale(i: u32, k: u64) -> Result<u64> {
    check_scale(i)?;
    let u = k >> i;
    let v = k & ((1u64 << i) - 1);
    if u >= 64 {
        return Err(Error::Overflow(format!("T_{i}^{k}")));
    }
    let base = (1u128 << i) + v as u128; // 2^i (1 + v 2^-i)
    let value = if u as u32 >= i {
        base << (u as u32 - i)
    } else {
        base >> (i - u as u32)
    };
    u64::try_from(value).map_err(|_| Error::Overflow(format!("T_{i}^{k}")))
}

/// `⌊log2 t⌋`, the stage of `t ≥ 1`.
pub fn stage(t: u64) -> u32 {
    debug_assert!(t >= 1);
    63 - t.max(1).leading_zeros()
}

/// Largest `k` with `T_i^k ≤ t`. Degenerate (empty) periods are skipped
/// because the largest such `k` is returned.
pub fn period_of(t: u64, i: u32) -> u64 {
    assert!(t >= 1, "times start at 1");
    assert!(i <= MAX_SCALE, "scale {i} exceeds {MAX_SCALE}");
    let u = stage(t) as u64;
    // T_i^{u 2^i} = 2^u <= t < 2^{u+1} = T_i^{(u+1) 2^i}
    let first = u << i;
    let (mut lo, mut hi) = (0u64, (1u64 << i) - 1);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        // in range: u <= 63, so the value fits
        let at = t_scale(i, first + mid).expect("in-range period boundary");
        if at <= t {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    first + lo
}

/// Whether `t` (1-based) is a first appearance at scale `i`, computed by a
/// direct scan of `history` (`history[t-1]` is `X_t`).
pub fn in_first_appearance_set(t: u64, i: u32, history: &[ContextPoint]) -> bool {
    assert!(t >= 1 && history.len() as u64 >= t, "history shorter than t");
    let k = period_of(t, i);
    let start = t_scale(i, k).expect("period start of an in-range time");
    let uid = history[(t - 1) as usize].uid;
    !history[(start - 1) as usize..(t - 1) as usize]
        .iter()
        .any(|x| x.uid == uid)
}

/// Incremental membership in `T^i` for one scale.
#[derive(Clone, Debug)]
pub struct FirstAppearanceTracker {
    scale: u32,
    t: u64,
    period: u64,
    seen: HashSet<u64>,
}

impl FirstAppearanceTracker {
    pub fn new(scale: u32) -> Result<Self> {
        check_scale(scale)?;
        Ok(Self {
            scale,
            t: 0,
            period: 0,
            seen: HashSet::new(),
        })
    }

    /// Feeds the next context; returns whether its time is in `T^i`.
    pub fn push(&mut self, x: &ContextPoint) -> bool {
        self.t += 1;
        let k = period_of(self.t, self.scale);
        if k != self.period || self.t == 1 {
            self.period = k;
            self.seen.clear();
        }
        self.seen.insert(x.uid)
    }

    /// Membership mask of `T^i` over a whole stream.
    pub fn mask(scale: u32, stream: &[ContextPoint]) -> Result<Vec<bool>> {
        let mut tr = Self::new(scale)?;
        Ok(stream.iter().map(|x| tr.push(x)).collect())
    }
}

/// Whether the schedule's paper constraints are enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Paper,
    #[default]
    Desk,
}

/// How `u(i)` is specified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleShape {
    /// `u(i) = slope·i`.
    Linear { slope: u32 },
    /// `u(0) = 0` and `u(i) = slope·i + offset` for `i ≥ 1`: longer periods
    /// at the same phase, which keeps Hedge's importance weights tame at
    /// small horizons.
    Affine { slope: u32, offset: u32 },
    /// Explicit values; phases beyond the list are never reached.
    Explicit { u: Vec<u32> },
}

/// The phase schedule `T_i = 2^{u(i)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub shape: ScheduleShape,
    #[serde(default)]
    pub mode: ScheduleMode,
}

/// Hedge learning rate of phase `i`: `sqrt(8 ln(i+1) / 2^i)`.
pub fn hedge_rate(i: u32) -> f64 {
    (8.0 * ((i + 1) as f64).ln() / 2f64.powi(i as i32)).sqrt()
}

impl PhaseSchedule {
    pub fn linear(slope: u32) -> Result<Self> {
        let s = Self {
            shape: ScheduleShape::Linear { slope },
            mode: ScheduleMode::Desk,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn affine(slope: u32, offset: u32) -> Result<Self> {
        let s = Self {
            shape: ScheduleShape::Affine { slope, offset },
            mode: ScheduleMode::Desk,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit(u: Vec<u32>, mode: ScheduleMode) -> Result<Self> {
        let s = Self {
            shape: ScheduleShape::Explicit { u },
            mode,
        };
        s.validate()?;
        Ok(s)
    }

    /// `u(i)`, or `None` when phase `i` is never reached.
    pub fn u(&self, i: u32) -> Option<u32> {
        match &self.shape {
            ScheduleShape::Linear { slope } => slope.checked_mul(i),
            ScheduleShape::Affine { slope, offset } => match i {
                0 => Some(0),
                _ => slope.checked_mul(i)?.checked_add(*offset),
            },
            ScheduleShape::Explicit { u } => u.get(i as usize).copied(),
        }
    }

    /// `2^{u(i)}`, saturating to `u64::MAX` when unreachable in 64 bits.
    pub fn start_of_phase(&self, i: u32) -> u64 {
        match self.u(i) {
            Some(u) if u < 64 => 1u64 << u,
            _ => u64::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.shape {
            ScheduleShape::Linear { slope } | ScheduleShape::Affine { slope, .. } => {
                if *slope == 0 {
                    return Err(Error::InvalidParameter("schedule slope must be ≥ 1".into()));
                }
            }
            ScheduleShape::Explicit { u } => {
                if u.first() != Some(&0) {
                    return Err(Error::InvalidParameter("schedule must start at u(0) = 0".into()));
                }
                if u.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParameter(
                        "schedule must be strictly increasing".into(),
                    ));
                }
            }
        }
        if self.mode == ScheduleMode::Paper {
            let n = match &self.shape {
                ScheduleShape::Linear { .. } | ScheduleShape::Affine { .. } => 64,
                ScheduleShape::Explicit { u } => u.len() as u32,
            };
            for i in 1..n {
                let Some(ui) = self.u(i) else { break };
                let need = hedge_rate(i) * 2f64.powi(i as i32 + 5);
                if ui < 2 * i || (ui as f64) < need {
                    return Err(Error::InvalidParameter(format!(
                        "u({i}) = {ui} violates u(i) ≥ max(2i, η_i·2^(i+5)) = {:.1}",
                        need.max(2.0 * i as f64)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest `i` with `u(i) ≤ l`.
    pub fn phase_of_stage(&self, l: u32) -> u32 {
        match &self.shape {
            ScheduleShape::Linear { slope } => l / slope,
            ScheduleShape::Affine { slope, offset } => {
                if l < slope + offset {
                    0
                } else {
                    (l - offset) / slope
                }
            }
            ScheduleShape::Explicit { u } => {
                (u.partition_point(|&ui| ui <= l) as u32).saturating_sub(1)
            }
        }
    }

    /// Phase of time `t`: the `i` with `T_i ≤ t < T_{i+1}`.
    pub fn phase(&self, t: u64) -> u32 {
        self.phase_of_stage(stage(t))
    }
}

/// Position of a time inside Algorithm 1's grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alg1Position {
    pub phase: u32,
    pub stage: u32,
    /// Period inside the stage, in `[0, 2^phase)`.
    pub period: u64,
    /// First time of the period.
    pub start: u64,
    /// Length of the period, `2^{stage - phase}`.
    pub len: u64,
}

/// `(Phase, Stage, Period)` of `t`.
///
/// The phase is constant inside a stage because every `T_i = 2^{u(i)}` is a
/// stage start; since `u(i) ≥ i`, the stage splits into `2^i` periods of
/// equal length `2^{l-i}`, and `T_i^{l·2^i + k} = 2^l + k·2^{l-i}`.
pub fn alg1_position(t: u64, sched: &PhaseSchedule) -> Alg1Position {
    assert!(t >= 1, "times start at 1");
    let l = stage(t);
    let i = sched.phase_of_stage(l);
    debug_assert!(i <= l);
    let shift = l - i;
    let k = (t - (1u64 << l)) >> shift;
    Alg1Position {
        phase: i,
        stage: l,
        period: k,
        start: (1u64 << l) + (k << shift),
        len: 1u64 << shift,
    }
}

/// `⌊log4 n⌋` for an occurrence count `n ≥ 1`.
pub fn category_of_count(n: u64) -> u32 {
    assert!(n >= 1, "occurrence counts start at 1");
    stage(n) / 2
}

/// Category of every time in `history`, recomputed from scratch by scanning
/// each Algorithm-1 period.
pub fn categories_from_scratch(history: &[ContextPoint], sched: &PhaseSchedule) -> Vec<u32> {
    let mut out = Vec::with_capacity(history.len());
    for t in 1..=history.len() as u64 {
        let pos = alg1_position(t, sched);
        let uid = history[(t - 1) as usize].uid;
        let count = history[(pos.start - 1) as usize..t as usize]
            .iter()
            .filter(|x| x.uid == uid)
            .count() as u64;
        out.push(category_of_count(count));
    }
    out
}

/// Incremental occurrence counter within Algorithm-1 periods.
#[derive(Clone, Debug, Default)]
pub struct CategoryTracker {
    period_start: u64,
    counts: HashMap<u64, u64>,
}

impl CategoryTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `x` at a time whose period starts at `period_start`; returns
    /// the occurrence count and category.
    pub fn push(&mut self, period_start: u64, x: &ContextPoint) -> (u64, u32) {
        if period_start != self.period_start {
            self.period_start = period_start;
            self.counts.clear();
        }
        let c = self.counts.entry(x.uid).or_insert(0);
        *c += 1;
        (*c, category_of_count(*c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_period(t: u64, i: u32) -> u64 {
        let mut k = 0;
        while t_scale(i, k + 1).unwrap() <= t {
            k += 1;
        }
        k
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(t_scale(0, 3).unwrap(), 8);
        assert_eq!(t_scale(1, 3).unwrap(), 3);
        assert_eq!(t_scale(2, 9).unwrap(), 5);
        assert_eq!(t_scale(0, 0).unwrap(), 1);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(t_scale(0, 63).is_ok());
        assert!(matches!(t_scale(0, 64), Err(Error::Overflow(_))));
        assert!(matches!(t_scale(3, 64 << 3), Err(Error::Overflow(_))));
        assert!(t_scale(MAX_SCALE + 1, 0).is_err());
    }

    #[test]
    fn period_examples() {
        assert_eq!(period_of(1, 0), 0);
        assert_eq!(period_of(5, 2), 9);
        assert_eq!(t_scale(2, 10).unwrap(), 6);
        let t = 1u64 << 40;
        let k = period_of(t, 3);
        assert_eq!(t_scale(3, k).unwrap(), t);
        assert_eq!(k, 40 << 3);
    }

    #[test]
    fn period_matches_scan() {
        for i in 0..=6 {
            for t in 1..=2000 {
                assert_eq!(period_of(t, i), scan_period(t, i), "t={t} i={i}");
            }
        }
    }

    #[test]
    fn first_appearance_scan() {
        let a = ContextPoint::new(0.3, 1).unwrap();
        let b = ContextPoint::new(0.6, 2).unwrap();
        // scale 0 periods: [1,2), [2,4), [4,8)
        let hist = [a, a, a, b, a];
        assert!(in_first_appearance_set(1, 0, &hist));
        assert!(in_first_appearance_set(2, 0, &hist)); // new period
        assert!(!in_first_appearance_set(3, 0, &hist));
        assert!(in_first_appearance_set(4, 0, &hist));
        assert!(in_first_appearance_set(5, 0, &hist)); // last seen at t=3, earlier period
        let mask = FirstAppearanceTracker::mask(0, &hist).unwrap();
        assert_eq!(mask, vec![true, true, false, true, true]);
    }

    #[test]
    fn desk_schedule_positions() {
        let sched = PhaseSchedule::explicit(vec![0, 4, 8, 12], ScheduleMode::Desk).unwrap();
        let pos = alg1_position(20, &sched);
        assert_eq!((pos.phase, pos.stage), (1, 4));
        // scan oracle: boundaries of scale 1 inside stage 4 are 16 and 24
        let k_global = scan_period(20, 1);
        assert_eq!(pos.period, k_global - (4 << 1));
        assert_eq!(pos.start, t_scale(1, k_global).unwrap());
        // t = T_i starts phase i
        assert_eq!(sched.phase(16), 1);
        assert_eq!(sched.phase(15), 0);
        assert_eq!(sched.phase(256), 2);
        // t = 2^l starts period 0
        for l in 0..30 {
            assert_eq!(alg1_position(1 << l, &sched).period, 0);
        }
    }

    #[test]
    fn alg1_matches_scale_grid() {
        let sched = PhaseSchedule::linear(2).unwrap();
        for t in 1..5000u64 {
            let p = alg1_position(t, &sched);
            let k = period_of(t, p.phase);
            assert_eq!(k, ((p.stage as u64) << p.phase) + p.period);
            assert_eq!(t_scale(p.phase, k).unwrap(), p.start);
            assert_eq!(t_scale(p.phase, k + 1).unwrap(), p.start + p.len);
        }
    }

    #[test]
    fn category_counts() {
        assert_eq!(category_of_count(1), 0);
        assert_eq!(category_of_count(3), 0);
        assert_eq!(category_of_count(4), 1);
        for p in 0..6u32 {
            for n in 4u64.pow(p)..4u64.pow(p + 1) {
                assert_eq!(category_of_count(n), p);
            }
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(PhaseSchedule::explicit(vec![0, 4, 8], ScheduleMode::Desk).is_ok());
        assert!(PhaseSchedule::explicit(vec![1, 4], ScheduleMode::Desk).is_err());
        assert!(PhaseSchedule::explicit(vec![0, 4, 4], ScheduleMode::Desk).is_err());
        assert!(PhaseSchedule::explicit(vec![0, 4, 8], ScheduleMode::Paper).is_err());
        // η_1·2^6 = sqrt(4 ln 2)·64 ≈ 106.6
        assert!(PhaseSchedule::explicit(vec![0, 107], ScheduleMode::Paper).is_ok());
        assert!(PhaseSchedule::explicit(vec![0, 106], ScheduleMode::Paper).is_err());
    }
}

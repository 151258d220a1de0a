use serde::{Deserialize, Serialize};

use super::{Emission, Note, UidSource};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::ContextPoint;

/// Uniform draws on `(0, 1)`, a fresh uid each.
#[derive(Clone, Debug)]
pub struct IidUniform {
    rng: RngStream,
    uids: UidSource,
}

impl IidUniform {
    pub fn new(rng: RngStream) -> Self {
        Self {
            rng,
            uids: UidSource::default(),
        }
    }
}

impl Iterator for IidUniform {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        let coord = self.rng.open01();
        Some(Emission {
            point: ContextPoint {
                coord,
                uid: self.uids.fresh(),
            },
            note: Note::default(),
        })
    }
}

/// I.i.d. draws from a finite set of points. Point `j` always carries uid
/// `j + 1`, so repeated visits are exact duplicates.
#[derive(Clone, Debug)]
pub struct FiniteSupportIid {
    points: Vec<f64>,
    probs: Vec<f64>,
    rng: Option<RngStream>,
}

impl FiniteSupportIid {
    pub fn new(points: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        for &p in &points {
            ContextPoint::new(p, 1)?;
        }
        let mut sorted: Vec<u64> = points.iter().map(|p| p.to_bits()).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("support points must be distinct".into()));
        }
        let w = weights.unwrap_or_else(|| vec![1.0; points.len()]);
        if w.len() != points.len() || w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter("bad support weights".into()));
        }
        let z: f64 = w.iter().sum();
        if z <= 0.0 {
            return Err(Error::InvalidParameter("support weights sum to 0".into()));
        }
        Ok(Self {
            points,
            probs: w.iter().map(|x| x / z).collect(),
            rng: None,
        })
    }

    pub fn on(mut self, rng: RngStream) -> Self {
        self.rng = Some(rng);
        self
    }
}

impl Iterator for FiniteSupportIid {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        let rng = self.rng.as_mut().expect("generator has a stream");
        let j = rng.categorical(&self.probs);
        Some(Emission {
            point: ContextPoint {
                coord: self.points[j],
                uid: j as u64 + 1,
            },
            note: Note {
                slot: j as u64,
                ..Note::default()
            },
        })
    }
}

/// Number of distinct contexts visited by time `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistinctSchedule {
    /// `D(T) = count`; only `count = 1` is a valid schedule from `T = 1`.
    Constant { count: u64 },
    /// `D(T) = ⌈T^exponent⌉` with `0 < exponent < 1`.
    Power { exponent: f64 },
}

impl DistinctSchedule {
    pub fn sqrt() -> Self {
        DistinctSchedule::Power { exponent: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DistinctSchedule::Constant { count } if *count != 1 => Err(Error::InvalidParameter(
                format!("D(1) = {count} exceeds T = 1"),
            )),
            DistinctSchedule::Power { exponent } if !(*exponent > 0.0 && *exponent < 1.0) => Err(
                Error::InvalidParameter(format!("exponent {exponent} outside (0, 1)")),
            ),
            _ => Ok(()),
        }
    }

    pub fn d(&self, t: u64) -> u64 {
        match self {
            DistinctSchedule::Constant { count } => *count,
            DistinctSchedule::Power { exponent } => {
                if *exponent == 0.5 {
                    // exact integer ceil(sqrt)
                    let mut r = (t as f64).sqrt() as u64;
                    while r * r < t {
                        r += 1;
                    }
                    while r > 0 && (r - 1) * (r - 1) >= t {
                        r -= 1;
                    }
                    r
                } else {
                    (t as f64).powf(*exponent).ceil() as u64
                }
            }
        }
    }

    /// Rejects schedules with `D(T) > T` or jumps of more than one new
    /// context per step up to `horizon`.
    pub fn check_horizon(&self, horizon: u64) -> Result<()> {
        self.validate()?;
        let mut prev = 0;
        for t in 1..=horizon.min(1 << 20) {
            let d = self.d(t);
            if d > t || d < prev || d > prev + 1 {
                return Err(Error::InvalidParameter(format!(
                    "distinct schedule D({t}) = {d} after D({}) = {prev}",
                    t - 1
                )));
            }
            prev = d;
        }
        Ok(())
    }
}

/// Deterministic-after-seeding process with exactly `D(T)` distinct
/// contexts by time `T`; steps that do not introduce a new context revisit
/// the existing ones round-robin.
#[derive(Clone, Debug)]
pub struct DeterministicC2 {
    schedule: DistinctSchedule,
    rng: RngStream,
    t: u64,
    seen: Vec<ContextPoint>,
    cursor: usize,
}

impl DeterministicC2 {
    pub fn new(schedule: DistinctSchedule, rng: RngStream) -> Result<Self> {
        schedule.validate()?;
        Ok(Self {
            schedule,
            rng,
            t: 0,
            seen: Vec::new(),
            cursor: 0,
        })
    }
}

impl Iterator for DeterministicC2 {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.t += 1;
        let want = self.schedule.d(self.t);
        let point = if want as usize > self.seen.len() {
            let p = ContextPoint {
                coord: self.rng.open01(),
                uid: self.seen.len() as u64 + 1,
            };
            self.seen.push(p);
            p
        } else {
            let p = self.seen[self.cursor % self.seen.len()];
            self.cursor = (self.cursor + 1) % self.seen.len();
            p
        };
        Some(Emission {
            point,
            note: Note {
                slot: point.uid - 1,
                ..Note::default()
            },
        })
    }
}

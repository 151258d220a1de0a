//! Block constructions on the dyadic carriers `A_i = [2^-i, 2^-i+1)`.
//!
//! Each construction assigns to every positive integer `k` the class
//! `i = 1 + trailing_zeros(k)`; the classes partition the positive integers
//! (`k ≡ 2^{i-1} mod 2^i`). Class `i` duplicates values `n_i = 2^{⌊log2 i⌋}`
//! times.

use super::{Emission, Note, UidSource};
use crate::rng::RngStream;
use crate::timescales::stage;
use crate::types::ContextPoint;

/// Class of `k ≥ 1`: the `i` with `k ≡ 2^{i-1} mod 2^i`.
pub fn dyadic_class(k: u64) -> u32 {
    assert!(k >= 1);
    k.trailing_zeros() + 1
}

/// `n_i = 2^{⌊log2 i⌋}`.
pub fn class_multiplicity(i: u32) -> u64 {
    1u64 << stage(i as u64)
}

/// `T_k = 2^k·k!`, or `None` past 64 bits.
pub fn c2_not_c4_block_start(k: u32) -> Option<u64> {
    let mut v: u64 = 1u64.checked_shl(k).filter(|_| k < 64)?;
    for j in 2..=k as u64 {
        v = v.checked_mul(j)?;
    }
    Some(v)
}

/// A uniform draw on the carrier `[2^-i, 2^-i+1)`.
fn carrier_draw(rng: &mut RngStream, i: u32) -> f64 {
    0.5f64.powi(i as i32) * (1.0 + rng.next_f64())
}

/// Per-class i.i.d. streams `Z^i`.
#[derive(Clone, Debug)]
struct ClassStreams {
    root: RngStream,
    streams: Vec<RngStream>,
}

impl ClassStreams {
    fn new(root: RngStream) -> Self {
        Self {
            root,
            streams: Vec::new(),
        }
    }

    fn get(&mut self, i: u32) -> &mut RngStream {
        while self.streams.len() <= i as usize {
            let j = self.streams.len() as u64;
            self.streams.push(self.root.child(j));
        }
        &mut self.streams[i as usize]
    }
}

/// Blocks `[T_k, 2T_k)` with `T_k = 2^k k!`: class `i` of `k` draws
/// `T_k / n_i` fresh points on `A_i` and cycles through them `n_i` times.
/// Idle elsewhere.
#[derive(Clone, Debug)]
pub struct C2NotC4 {
    z: ClassStreams,
    uids: UidSource,
    t: u64,
    k: u32,
    block: Vec<ContextPoint>,
}

impl C2NotC4 {
    pub fn new(rng: RngStream) -> Self {
        Self {
            z: ClassStreams::new(rng),
            uids: UidSource::default(),
            t: 0,
            k: 1,
            block: Vec::new(),
        }
    }
}

impl Iterator for C2NotC4 {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.t += 1;
        let t = self.t;
        let idle = Emission {
            point: ContextPoint::idle(),
            note: Note::default(),
        };
        let Some(mut start) = c2_not_c4_block_start(self.k) else {
            return Some(idle);
        };
        while t >= start.saturating_mul(2) {
            self.k += 1;
            match c2_not_c4_block_start(self.k) {
                Some(s) => start = s,
                None => return Some(idle),
            }
        }
        if t < start {
            return Some(idle);
        }
        let i = dyadic_class(self.k as u64);
        let n = class_multiplicity(i);
        let m = start / n;
        let r = t - start;
        let (rep, slot) = (r / m + 1, r % m);
        if r == 0 {
            self.block.clear();
        }
        let point = if rep == 1 {
            let p = ContextPoint {
                coord: carrier_draw(self.z.get(i), i),
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
                segment: self.k as u64,
                class: i,
                rep: rep as u32,
                slot,
            },
        })
    }
}

/// Stages `[2^l, 2^{l+1})` with `l` of class `p`: the first `2^{l-p}` steps
/// are fresh uniform draws on the comb
/// `A_p(l) = ⋃_j [j 2^p / 2^{p+l}, (j 2^p + 1) / 2^{p+l}]`, and the rest of
/// the stage repeats them with period `2^{l-p}`. `X_1` is idle.
#[derive(Clone, Debug)]
pub struct C4NotC6 {
    rng: RngStream,
    uids: UidSource,
    t: u64,
    block: Vec<ContextPoint>,
}

impl C4NotC6 {
    pub fn new(rng: RngStream) -> Self {
        Self {
            rng,
            uids: UidSource::default(),
            t: 0,
            block: Vec::new(),
        }
    }
}

impl Iterator for C4NotC6 {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.t += 1;
        let t = self.t;
        let l = stage(t);
        if l == 0 || l > 40 {
            return Some(Emission {
                point: ContextPoint::idle(),
                note: Note::default(),
            });
        }
        let p = dyadic_class(l as u64);
        let w = 1u64 << (l - p);
        let r = t - (1u64 << l);
        let (rep, slot) = (r / w + 1, r % w);
        if r == 0 {
            self.block.clear();
        }
        let point = if rep == 1 {
            let j = self.rng.below(1u64 << l);
            let tooth = (j << p) as f64;
            let y = (tooth + self.rng.next_f64()).min((tooth + 1.0).next_down());
            let p_ = ContextPoint {
                coord: y * 0.5f64.powi((p + l) as i32),
                uid: self.uids.fresh(),
            };
            self.block.push(p_);
            p_
        } else {
            self.block[slot as usize]
        };
        Some(Emission {
            point,
            note: Note {
                segment: l as u64,
                class: p,
                rep: rep as u32,
                slot,
            },
        })
    }
}

/// Stages `[2^k, 2^{k+1})` with `k` of class `i`: `X_t = Z^i_{⌊t/n_i⌋}` on
/// the carrier `A_i`, i.e. runs of `n_i` consecutive copies. `X_1` is idle.
#[derive(Clone, Debug)]
pub struct Condition8Witness {
    z: ClassStreams,
    uids: UidSource,
    t: u64,
    last: ContextPoint,
}

impl Condition8Witness {
    pub fn new(rng: RngStream) -> Self {
        Self {
            z: ClassStreams::new(rng),
            uids: UidSource::default(),
            t: 0,
            last: ContextPoint::idle(),
        }
    }
}

impl Iterator for Condition8Witness {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.t += 1;
        let t = self.t;
        let k = stage(t);
        if k == 0 {
            return Some(Emission {
                point: ContextPoint::idle(),
                note: Note::default(),
            });
        }
        let i = dyadic_class(k as u64);
        let n = class_multiplicity(i);
        if t.is_multiple_of(n) {
            self.last = ContextPoint {
                coord: carrier_draw(self.z.get(i), i),
                uid: self.uids.fresh(),
            };
        }
        Some(Emission {
            point: self.last,
            note: Note {
                segment: k as u64,
                class: i,
                rep: (t % n) as u32 + 1,
                slot: (t - (1u64 << k)) / n,
            },
        })
    }
}

/// Stage `l` repeats each uniform draw `min(2^{⌊l/growth⌋}, cap)` times in a
/// row: duplicates grow slowly with time, so first-appearance subsamples
/// stay well spread while the full process revisits points.
#[derive(Clone, Debug)]
pub struct C5Scheduled {
    growth: u32,
    cap: u64,
    rng: RngStream,
    uids: UidSource,
    t: u64,
    last: ContextPoint,
}

impl C5Scheduled {
    pub fn new(growth: u32, cap: u64, rng: RngStream) -> Self {
        Self {
            growth: growth.max(1),
            cap: cap.max(1),
            rng,
            uids: UidSource::default(),
            t: 0,
            last: ContextPoint::idle(),
        }
    }

    pub fn run_length(&self, l: u32) -> u64 {
        let e = l / self.growth;
        if e >= 63 {
            self.cap
        } else {
            (1u64 << e).min(self.cap)
        }
    }
}

impl Iterator for C5Scheduled {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.t += 1;
        let l = stage(self.t);
        let n = self.run_length(l);
        let r = self.t - (1u64 << l);
        if r.is_multiple_of(n) {
            self.last = ContextPoint {
                coord: self.rng.open01(),
                uid: self.uids.fresh(),
            };
        }
        Some(Emission {
            point: self.last,
            note: Note {
                segment: l as u64,
                class: 0,
                rep: (r % n) as u32 + 1,
                slot: r / n,
            },
        })
    }
}

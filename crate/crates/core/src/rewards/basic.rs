use super::{RewardMechanism, RewardTier, RewardView};
use crate::error::{Error, Result};
use crate::learners::Policy;
use crate::rng::RngStream;
use crate::types::ContextPoint;

fn check_mean(m: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&m) {
        Ok(m)
    } else {
        Err(Error::InvalidParameter(format!("mean {m} outside [0, 1]")))
    }
}

fn argmax(xs: &[f64]) -> usize {
    // lowest index wins ties
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Pays 0 on every arm.
#[derive(Clone, Debug)]
pub struct ZeroReward {
    arms: usize,
}

impl ZeroReward {
    pub fn new(arms: usize) -> Self {
        Self { arms }
    }
}

impl RewardMechanism for ZeroReward {
    fn name(&self) -> &str {
        "zero"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Stationary
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, _view: &RewardView<'_>, _rng: &RngStream, out: &mut [f64]) -> Result<()> {
        out.fill(0.0);
        Ok(())
    }
}

/// Context-free Bernoulli arms.
#[derive(Clone, Debug)]
pub struct BernoulliArms {
    means: Vec<f64>,
}

impl BernoulliArms {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::InvalidParameter("no arms".into()));
        }
        for &m in &means {
            check_mean(m)?;
        }
        Ok(Self { means })
    }
}

impl RewardMechanism for BernoulliArms {
    fn name(&self) -> &str {
        "bernoulli"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Stationary
    }

    fn arms(&self) -> usize {
        self.means.len()
    }

    fn rewards(&mut self, _view: &RewardView<'_>, rng: &RngStream, out: &mut [f64]) -> Result<()> {
        for (a, (o, m)) in out.iter_mut().zip(&self.means).enumerate() {
            *o = if rng.child(a as u64).bernoulli(*m) { 1.0 } else { 0.0 };
        }
        Ok(())
    }

    fn best_arm(&self, _x: &ContextPoint) -> Option<usize> {
        Some(argmax(&self.means))
    }
}

/// Bernoulli arms whose means are piecewise constant on the dyadic cells of
/// depth `depth`.
#[derive(Clone, Debug)]
pub struct CellBernoulli {
    depth: u32,
    arms: usize,
    means: Vec<Vec<f64>>,
}

impl CellBernoulli {
    /// `means[c][a]`: mean of arm `a` on cell `c`.
    pub fn new(depth: u32, means: Vec<Vec<f64>>) -> Result<Self> {
        if depth > 30 || means.len() != 1usize << depth {
            return Err(Error::InvalidParameter(format!(
                "depth {depth} needs {} cells, got {}",
                1u64 << depth.min(63),
                means.len()
            )));
        }
        let arms = means.first().map(Vec::len).unwrap_or(0);
        if arms == 0 || means.iter().any(|row| row.len() != arms) {
            return Err(Error::InvalidParameter("ragged cell means".into()));
        }
        for row in &means {
            for &m in row {
                check_mean(m)?;
            }
        }
        Ok(Self { depth, arms, means })
    }

    fn row(&self, x: &ContextPoint) -> &[f64] {
        &self.means[crate::learners::cell_index(x.coord, self.depth)]
    }

    /// The policy playing the best arm of every cell.
    pub fn optimal_policy(&self) -> Policy {
        Policy::Cells {
            depth: self.depth,
            arms: self.means.iter().map(|r| argmax(r)).collect(),
        }
    }
}

impl RewardMechanism for CellBernoulli {
    fn name(&self) -> &str {
        "cell_bernoulli"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Stationary
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, view: &RewardView<'_>, rng: &RngStream, out: &mut [f64]) -> Result<()> {
        let row = self.row(view.current());
        for (a, (o, m)) in out.iter_mut().zip(row).enumerate() {
            *o = if rng.child(a as u64).bernoulli(*m) { 1.0 } else { 0.0 };
        }
        Ok(())
    }

    fn best_arm(&self, x: &ContextPoint) -> Option<usize> {
        Some(argmax(self.row(x)))
    }
}

/// Bernoulli arms where a hash of the context coordinate picks one good arm
/// (mean `high`) and every other arm has mean `low`: each distinct context
/// is its own stationary bandit problem.
#[derive(Clone, Debug)]
pub struct ContextBernoulli {
    arms: usize,
    high: f64,
    low: f64,
    salt: u64,
}

impl ContextBernoulli {
    pub fn new(arms: usize, high: f64, low: f64, salt: u64) -> Result<Self> {
        if arms == 0 {
            return Err(Error::InvalidParameter("no arms".into()));
        }
        if high < low {
            return Err(Error::InvalidParameter(format!("good-arm mean {high} below {low}")));
        }
        Ok(Self {
            arms,
            high: check_mean(high)?,
            low: check_mean(low)?,
            salt,
        })
    }

    pub fn good_arm(&self, x: &ContextPoint) -> usize {
        let mut s = RngStream::root(self.salt).child(x.coord.to_bits());
        s.below(self.arms as u64) as usize
    }
}

impl RewardMechanism for ContextBernoulli {
    fn name(&self) -> &str {
        "context_bernoulli"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Stationary
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, view: &RewardView<'_>, rng: &RngStream, out: &mut [f64]) -> Result<()> {
        let good = self.good_arm(view.current());
        for (a, o) in out.iter_mut().enumerate() {
            let m = if a == good { self.high } else { self.low };
            *o = if rng.child(a as u64).bernoulli(m) { 1.0 } else { 0.0 };
        }
        Ok(())
    }

    fn best_arm(&self, x: &ContextPoint) -> Option<usize> {
        Some(self.good_arm(x))
    }
}

/// Replays a recorded table of reward vectors, cycling with period
/// `table.len() / arms`.
#[derive(Clone, Debug)]
pub struct FrozenRewards {
    arms: usize,
    table: Vec<f64>,
}

impl FrozenRewards {
    pub fn new(arms: usize, table: Vec<f64>) -> Result<Self> {
        if arms == 0 || table.is_empty() || !table.len().is_multiple_of(arms) {
            return Err(Error::InvalidParameter("frozen table shape".into()));
        }
        Ok(Self { arms, table })
    }

    pub fn period(&self) -> u64 {
        (self.table.len() / self.arms) as u64
    }
}

impl RewardMechanism for FrozenRewards {
    fn name(&self) -> &str {
        "frozen"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Oblivious
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, view: &RewardView<'_>, _rng: &RngStream, out: &mut [f64]) -> Result<()> {
        let row = ((view.time()? - 1) % self.period()) as usize;
        out.copy_from_slice(&self.table[row * self.arms..(row + 1) * self.arms]);
        Ok(())
    }
}

/// Adversarial example: pays 1 on the arm the learner played last round and
/// 0 elsewhere (arm 0 pays at the first round).
#[derive(Clone, Debug)]
pub struct TitForTat {
    arms: usize,
}

impl TitForTat {
    pub fn new(arms: usize) -> Self {
        Self { arms }
    }
}

impl RewardMechanism for TitForTat {
    fn name(&self) -> &str {
        "tit_for_tat"
    }

    fn tier(&self) -> RewardTier {
        RewardTier::Adversarial
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn rewards(&mut self, view: &RewardView<'_>, _rng: &RngStream, out: &mut [f64]) -> Result<()> {
        let last = view.past_actions()?.last().map(|a| a.0).unwrap_or(0);
        out.fill(0.0);
        if last < self.arms {
            out[last] = 1.0;
        }
        Ok(())
    }
}

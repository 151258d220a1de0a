use serde::{Deserialize, Serialize};

use super::regret::{regret_vs_policy, Comparator};
use crate::error::{Error, Result};
use crate::learner::Learner;
use crate::learners::PerInstanceExp3Ix;
use crate::processes::{DupBlock, DupBlockLayout};
use crate::rewards::{resolution_for, FrozenRewards, PartitionBernoulli};
use crate::rng::RngStream;
use crate::sim::{run, RunRecord};
use crate::types::ContextPoint;

/// When the stochastic phase ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreezeRule {
    /// Latest freeze time.
    pub horizon: u64,
    /// Freeze at the end of the current block once the share of cells whose
    /// uncertain arm is tried for the first time during a repetition falls
    /// below this threshold.
    #[serde(default)]
    pub theta: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensionConfig {
    /// `ε = 2^-eps_log2`.
    pub eps_log2: u32,
    /// Fresh cells in the first block.
    pub base: u64,
    /// Outer periods generated.
    pub periods: u32,
    pub freeze: FreezeRule,
    /// How many times the frozen environment is replayed back to back.
    pub passes: u32,
    /// Uncertain arm.
    pub a1: usize,
    /// Safe arm.
    pub a2: usize,
}

impl Default for TensionConfig {
    fn default() -> Self {
        Self {
            eps_log2: 3,
            base: 1000,
            periods: 1,
            freeze: FreezeRule {
                horizon: 15_999,
                theta: Some(0.05),
            },
            passes: 1,
            a1: 0,
            a2: 1,
        }
    }
}

/// Exploration bookkeeping of one block: `counts[q - 1]` is the number of
/// cells whose uncertain arm was first played during repetition `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockExploration {
    pub index: u32,
    pub start: u64,
    pub cells: u64,
    pub reps: u64,
    pub counts: Vec<u64>,
    /// Block steps whose cell had not been explored up to and including
    /// that step.
    pub unexplored_steps: u64,
    pub steps: u64,
}

impl BlockExploration {
    /// `|B| + Σ_q (reps − q + 1)·E_q = block steps`.
    pub fn identity_holds(&self) -> bool {
        let weighted: u64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(q, &e)| (self.reps - q as u64) * e)
            .sum();
        self.unexplored_steps + weighted == self.steps
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensionReport {
    /// Last step of the stochastic phase.
    pub freeze_at: u64,
    /// Whether the exploration trigger fired.
    pub triggered: bool,
    pub blocks: Vec<BlockExploration>,
    /// Mean over block cells of the best reward at the cell.
    pub hindsight_fresh_mean: f64,
    /// Learner's average regret against the hindsight-optimal policy during
    /// the stochastic phase.
    pub stochastic_average_regret: f64,
    pub passes: u32,
    /// Average regret over all replay passes of the frozen environment.
    pub learner_replay_average_regret: f64,
    pub per_instance_replay_average_regret: f64,
    /// Average regret of each replay pass, learner then per-instance.
    pub learner_pass_regret: Vec<f64>,
    pub per_instance_pass_regret: Vec<f64>,
}

fn block_exploration(
    layout: &DupBlockLayout,
    record: &RunRecord,
    a1: usize,
    upto: u64,
) -> Vec<BlockExploration> {
    let reps = layout.reps;
    let mut out = Vec::new();
    for per in layout.periods.iter().filter(|p| p.block_end - 1 <= upto) {
        let mut explored = vec![false; per.cells as usize];
        let mut counts = vec![0u64; reps as usize];
        let mut unexplored = 0;
        for t in per.start..per.block_end {
            let r = t - per.start;
            let (q, slot) = ((r / per.cells) as usize, (r % per.cells) as usize);
            if !explored[slot] && record.actions[(t - 1) as usize].index() == a1 {
                explored[slot] = true;
                counts[q] += 1;
            }
            if !explored[slot] {
                unexplored += 1;
            }
        }
        out.push(BlockExploration {
            index: per.index,
            start: per.start,
            cells: per.cells,
            reps,
            counts,
            unexplored_steps: unexplored,
            steps: per.block_end - per.start,
        });
    }
    out
}

/// Freeze time under the trigger: end of the first block in which some
/// repetition's fresh-exploration share drops below `theta`.
fn trigger(blocks: &[BlockExploration], layout: &DupBlockLayout, theta: f64) -> Option<u64> {
    blocks.iter().find_map(|b| {
        b.counts
            .iter()
            .any(|&e| (e as f64) < theta * b.cells as f64)
            .then(|| layout.periods[b.index as usize].block_end - 1)
    })
}

fn replay(
    stream: &[ContextPoint],
    table: &[f64],
    arms: usize,
    passes: u32,
    learner: &mut dyn Learner,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let n = stream.len();
    let long: Vec<ContextPoint> = stream
        .iter()
        .copied()
        .cycle()
        .take(n * passes as usize)
        .collect();
    let mut env = FrozenRewards::new(arms, table.to_vec())?;
    let rec = run(&long, &mut env, learner, rng, &rng.named("env"))?;
    let rep = regret_vs_policy(&rec, &Comparator::PointwiseMax)?;
    Ok((0..passes as u64)
        .map(|k| rep.window_regret(k * n as u64 + 1, (k + 1) * n as u64) / n as f64)
        .collect())
}

/// Runs `learner_factory()` on a duplication-block stream with
/// partition-Bernoulli rewards, freezes contexts and reward vectors, and
/// replays the frozen, now deterministic, environment against a fresh copy
/// of the learner and against per-context EXP3.IX.
pub fn tension_demo(
    config: &TensionConfig,
    learner_factory: &dyn Fn() -> Result<Box<dyn Learner>>,
    rng: &RngStream,
) -> Result<TensionReport> {
    let arms = config.a1.max(config.a2) + 1;
    let layout = DupBlockLayout::new(config.eps_log2, config.base, config.periods, 1 << 24)?;
    let first = layout.first_block_last_step();
    if config.freeze.horizon < first {
        return Err(Error::Freeze(format!(
            "freeze horizon {} precedes the end of the first block at {first}",
            config.freeze.horizon
        )));
    }
    if config.passes == 0 {
        return Err(Error::InvalidParameter("at least one replay pass".into()));
    }
    let horizon = config.freeze.horizon;
    let stream: Vec<ContextPoint> = DupBlock::new(layout.clone(), rng.named("contexts"))
        .take(horizon as usize)
        .map(|e| e.point)
        .collect();
    let m = resolution_for(&stream)?;
    let mut mech =
        PartitionBernoulli::new(m, arms, config.a1, config.a2, rng.named("bits"))?;
    let mut learner = learner_factory()?;
    let record = run(
        &stream,
        &mut mech,
        learner.as_mut(),
        &rng.named("learner"),
        &rng.named("rewards"),
    )?;

    let all_blocks = block_exploration(&layout, &record, config.a1, horizon);
    let (freeze_at, triggered) = match config
        .freeze
        .theta
        .and_then(|th| trigger(&all_blocks, &layout, th))
    {
        Some(t) => (t, true),
        None => (horizon, false),
    };
    let blocks: Vec<BlockExploration> = all_blocks
        .into_iter()
        .filter(|b| layout.periods[b.index as usize].block_end - 1 <= freeze_at)
        .collect();

    let n = freeze_at as usize;
    let frozen = &stream[..n];
    let table = &record.vectors[..n * arms];

    let mut best = Vec::new();
    for per in layout.periods.iter().filter(|p| p.block_end - 1 <= freeze_at) {
        for t in per.start..per.start + per.cells {
            let row = record.vector(t);
            best.push(row.iter().copied().fold(0.0, f64::max));
        }
    }
    let hindsight_fresh_mean = crate::sum::sum(best.iter().copied()) / best.len().max(1) as f64;

    let head = RunRecord {
        arms,
        contexts: frozen.to_vec(),
        actions: record.actions[..n].to_vec(),
        rewards: record.rewards[..n].to_vec(),
        vectors: table.to_vec(),
        internals: Vec::new(),
    };
    let stochastic_average_regret =
        regret_vs_policy(&head, &Comparator::PointwiseMax)?.average_regret();

    let replay_rng = rng.named("replay");
    let mut fresh = learner_factory()?;
    let learner_pass_regret = replay(
        frozen,
        table,
        arms,
        config.passes,
        fresh.as_mut(),
        &replay_rng.child(0),
    )?;
    let mut per_instance = PerInstanceExp3Ix::new(arms)?;
    let per_instance_pass_regret = replay(
        frozen,
        table,
        arms,
        config.passes,
        &mut per_instance,
        &replay_rng.child(1),
    )?;
    let mean = |v: &[f64]| crate::sum::sum(v.iter().copied()) / v.len() as f64;
    Ok(TensionReport {
        freeze_at,
        triggered,
        blocks,
        hindsight_fresh_mean,
        stochastic_average_regret,
        passes: config.passes,
        learner_replay_average_regret: mean(&learner_pass_regret),
        per_instance_replay_average_regret: mean(&per_instance_pass_regret),
        learner_pass_regret,
        per_instance_pass_regret,
    })
}

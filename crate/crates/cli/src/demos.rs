//! Bundled demonstrations of the block constructions.

use std::fmt::Write as _;
use std::path::Path;

use unibandit::diagnostics::{
    scale_occupancy, tension_demo, FreezeRule, SetFamily, TensionConfig, Window,
};
use unibandit::learners::{C5Learner, ExpInfOverPolicies, Policy};
use unibandit::processes::{c2_not_c4_block_start, dyadic_class, ProcessSpec};
use unibandit::sets::Region;
use unibandit::sim::run;
use unibandit::timescales::stage;
use unibandit::{Learner, RngStream};

use crate::config::{ExperimentConfig, LearnerSpec};
use crate::error::CliError;
use crate::runner::{replica_stream, run_experiment, RunOptions};

pub const QUICKSTART: &str = include_str!("../configs/quickstart.toml");

/// `(name, config)` of every demo.
pub const DEMOS: [(&str, &str); 4] = [
    ("dup-block", include_str!("../configs/dup_block.toml")),
    ("c2-not-c4", include_str!("../configs/c2_not_c4.toml")),
    ("c4-not-c6", include_str!("../configs/c4_not_c6.toml")),
    ("c5-alg1", include_str!("../configs/c5_alg1.toml")),
];

/// Replays of the frozen environment in the dup-block demo.
pub const TENSION_PASSES: u32 = 32;

pub fn demo_config(name: &str) -> Result<ExperimentConfig, CliError> {
    let text = DEMOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let known: Vec<&str> = DEMOS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown demo '{name}' (known: {})", known.join(", ")))
        })?;
    ExperimentConfig::parse(text)
}

/// Runs the demo's experiment into `out`, then its diagnostic; returns the
/// diagnostic as text.
pub fn run_demo(name: &str, out: &Path) -> Result<String, CliError> {
    let cfg = demo_config(name)?;
    run_experiment(&cfg, out, RunOptions::default())?;
    match name {
        "dup-block" => dup_block_report(&cfg),
        "c2-not-c4" => c2_not_c4_report(&cfg),
        "c4-not-c6" => c4_not_c6_report(&cfg),
        "c5-alg1" => c5_report(&cfg),
        _ => unreachable!("demo_config accepted the name"),
    }
}

fn dup_block_report(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let ProcessSpec::DupBlock {
        eps_log2,
        base,
        periods,
        ..
    } = cfg.process
    else {
        return Err(CliError::Config("dup-block demo needs a dup_block process".into()));
    };
    let tc = TensionConfig {
        eps_log2,
        base,
        periods,
        freeze: FreezeRule {
            horizon: cfg.experiment.horizon,
            theta: Some(0.05),
        },
        passes: TENSION_PASSES,
        a1: 0,
        a2: 1,
    };
    let policies = vec![Policy::Constant { arm: 0 }, Policy::Constant { arm: 1 }];
    let rep = tension_demo(
        &tc,
        &|| Ok(Box::new(ExpInfOverPolicies::new(policies.clone(), 2)?) as Box<dyn Learner>),
        &replica_stream(cfg.experiment.seed, 0),
    )?;
    let mut s = String::new();
    writeln!(s, "freeze at t = {} (trigger fired: {})", rep.freeze_at, rep.triggered).ok();
    writeln!(s, "hindsight mean reward on fresh cells: {:.4}", rep.hindsight_fresh_mean).ok();
    for b in &rep.blocks {
        writeln!(
            s,
            "block {}: first explorations per repetition {:?}, unexplored steps {}, identity {}",
            b.index,
            b.counts,
            b.unexplored_steps,
            if b.identity_holds() { "holds" } else { "FAILS" }
        )
        .ok();
    }
    writeln!(
        s,
        "frozen replay over {} passes: policy learner avg regret {:.4}, per-context EXP3.IX {:.4}",
        rep.passes, rep.learner_replay_average_regret, rep.per_instance_replay_average_regret
    )
    .ok();
    Ok(s)
}

fn generate(cfg: &ExperimentConfig) -> Result<Vec<unibandit::ContextPoint>, CliError> {
    Ok(cfg
        .process
        .generate(
            cfg.experiment.horizon,
            replica_stream(cfg.experiment.seed, 0).named("process"),
        )?
        .points)
}

fn iid_reference(horizon: u64, seed: u64) -> Result<Vec<unibandit::ContextPoint>, CliError> {
    Ok(ProcessSpec::IidUniform
        .generate(horizon, RngStream::root(seed).named("iid-reference"))?
        .points)
}

fn c2_not_c4_report(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let xs = generate(cfg)?;
    let iid = iid_reference(cfg.experiment.horizon, cfg.experiment.seed)?;
    let mut s = String::from("block k  class i  scale p  occupancy(A_i)  iid occupancy  |A_i|\n");
    for k in 1..64u32 {
        let Some(tk) = c2_not_c4_block_start(k) else { break };
        let end = 2 * tk - 1;
        if end > cfg.experiment.horizon {
            break;
        }
        let i = dyadic_class(u64::from(k));
        let p = i.ilog2();
        let fam = SetFamily::new(vec![Region::dyadic_carrier(i)]);
        let w = Window::new(end, end);
        let occ = scale_occupancy(&xs, p, &fam, w)?[0];
        let base = scale_occupancy(&iid, p, &fam, w)?[0];
        writeln!(
            s,
            "{k:>7}  {i:>7}  {p:>7}  {occ:>14.4}  {base:>13.4}  {:.4}",
            fam.sets[0].measure()
        )
        .ok();
    }
    Ok(s)
}

fn c4_not_c6_report(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let xs = generate(cfg)?;
    let iid = iid_reference(cfg.experiment.horizon, cfg.experiment.seed)?;
    let mut s = String::from("stage l  class p  occupancy(A_p(l))  iid occupancy  |A_p(l)|\n");
    for l in 1..=stage(cfg.experiment.horizon) {
        let end = (1u64 << (l + 1)) - 1;
        if end > cfg.experiment.horizon {
            break;
        }
        let p = dyadic_class(u64::from(l));
        let fam = SetFamily::new(vec![Region::DyadicComb { p, l }]);
        let w = Window::new(end, end);
        let occ = scale_occupancy(&xs, p, &fam, w)?[0];
        let base = scale_occupancy(&iid, p, &fam, w)?[0];
        writeln!(
            s,
            "{l:>7}  {p:>7}  {occ:>17.4}  {base:>13.4}  {:.4}",
            fam.sets[0].measure()
        )
        .ok();
    }
    Ok(s)
}

fn c5_report(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let LearnerSpec::C5 { schedule, policies } = &cfg.learner else {
        return Err(CliError::Config("c5-alg1 demo needs a c5 learner".into()));
    };
    let root = replica_stream(cfg.experiment.seed, 0);
    let xs = cfg
        .process
        .generate(cfg.experiment.horizon, root.named("process"))?
        .points;
    let mut mech = cfg.reward.build(&xs, &root.named("rewards"))?;
    let mut learner = C5Learner::new(schedule.clone(), cfg.policy_list(policies), cfg.reward.arms())?;
    run(
        &xs,
        mech.as_mut(),
        &mut learner,
        &root.named("learner"),
        &root.named("reward_draws"),
    )?;
    let mut s = String::from("stage  phase  period  category  Hedge probabilities\n");
    let last_stage = learner.hedge_log().last().map(|e| e.stage);
    for e in learner
        .hedge_log()
        .iter()
        .filter(|e| Some(e.stage) == last_stage)
        .rev()
        .take(4)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
    {
        let probs: Vec<String> = e.probs.iter().map(|p| format!("{p:.3}")).collect();
        writeln!(
            s,
            "{:>5}  {:>5}  {:>6}  {:>8}  [{}]",
            e.stage,
            e.phase,
            e.period,
            e.category,
            probs.join(", ")
        )
        .ok();
    }
    Ok(s)
}

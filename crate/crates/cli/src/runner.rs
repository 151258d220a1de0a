//! Replica orchestration and artifact emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use unibandit::bandit::exp3ix_highprob_check;
use unibandit::diagnostics::{regret_vs_policy, Comparator, RegretReport};
use unibandit::learners::{
    C5Learner, Exp3IxLearner, ExpInfOverPolicies, FixedPolicyLearner, PerInstanceExp3Ix,
    PerInstanceExpInf, UniformLearner,
};
use unibandit::rewards::RewardTier;
use unibandit::sim::{run, RunRecord};
use unibandit::types::ActionIndex;
use unibandit::{Learner, RngStream};

use crate::config::{ComparatorSpec, ExperimentConfig, LearnerSpec};
use crate::error::CliError;

pub const OUTPUT_ROOT_VAR: &str = "UNIBANDIT_OUTPUT_ROOT";

/// Where a config's artifacts go: `$UNIBANDIT_OUTPUT_ROOT/<name>` when the
/// variable is set, else `experiment.output`, else `runs/<name>`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    if let Ok(root) = std::env::var(OUTPUT_ROOT_VAR) {
        if !root.is_empty() {
            return Path::new(&root).join(&cfg.experiment.name);
        }
    }
    match &cfg.experiment.output {
        Some(o) => PathBuf::from(o),
        None => Path::new("runs").join(&cfg.experiment.name),
    }
}

/// Knobs that are not part of an experiment's identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Give every replica the key of replica 0 (testing aggregation).
    pub same_stream_for_all: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSidecar {
    pub replica: u32,
    /// Key of the replica's root stream, in hex.
    pub stream_key: String,
    pub config_hash: String,
    pub horizon: u64,
    pub cum_reward: f64,
    pub cum_regret: BTreeMap<String, f64>,
    /// Whether the EXP3.IX high-probability bound held (EXP3.IX on an
    /// action-blind mechanism only).
    pub certificate: Option<bool>,
    pub trace: Option<FileDigest>,
    pub summary: FileDigest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub config_hash: String,
    pub software: String,
    pub version: String,
    pub seed: u64,
    pub seed_derivation: String,
    pub replicas: Vec<FileDigest>,
    pub config: serde_json::Value,
}

const SEED_DERIVATION: &str = "replica r runs on root(seed).child(r); its context process, \
learner, reward tables and reward draws use the named sub-streams process, learner, rewards \
and reward_draws";

/// Root stream of replica `r`.
pub fn replica_stream(seed: u64, r: u32) -> RngStream {
    RngStream::root(seed).child(u64::from(r))
}

pub fn build_learner(cfg: &ExperimentConfig) -> Result<Box<dyn Learner>, CliError> {
    let arms = cfg.reward.arms();
    Ok(match &cfg.learner {
        LearnerSpec::Uniform => Box::new(UniformLearner::new(arms)?),
        LearnerSpec::Exp3ix => Box::new(Exp3IxLearner::new(arms)?),
        LearnerSpec::FixedPolicy { policy } => Box::new(FixedPolicyLearner::new(policy.clone())),
        LearnerSpec::PerInstanceExp3ix => Box::new(PerInstanceExp3Ix::new(arms)?),
        LearnerSpec::PerInstanceExpinf { experts } => {
            let n = experts.unwrap_or(arms);
            if n > arms {
                return Err(CliError::Config(format!(
                    "per-instance EXPINF with {n} experts over {arms} arms"
                )));
            }
            Box::new(PerInstanceExpInf::new(Some(n))?)
        }
        LearnerSpec::ExpinfPolicies { policies } => {
            Box::new(ExpInfOverPolicies::new(cfg.policy_list(policies), arms)?)
        }
        LearnerSpec::C5 { schedule, policies } => Box::new(
            C5Learner::new(schedule.clone(), cfg.policy_list(policies), arms)?.without_log(),
        ),
    })
}

/// One replica, in memory.
pub struct ReplicaRun {
    pub record: RunRecord,
    pub regrets: Vec<(String, RegretReport)>,
    pub certificate: Option<bool>,
    pub stream_key: u64,
}

/// Runs replica `r` without writing anything.
pub fn run_replica(cfg: &ExperimentConfig, r: u32) -> Result<ReplicaRun, CliError> {
    let root = replica_stream(cfg.experiment.seed, r);
    let stream = cfg
        .process
        .generate(cfg.experiment.horizon, root.named("process"))?
        .points;
    let mut mech = cfg.reward.build(&stream, &root.named("rewards"))?;
    let mut learner = build_learner(cfg)?;
    let record = run(
        &stream,
        mech.as_mut(),
        learner.as_mut(),
        &root.named("learner"),
        &root.named("reward_draws"),
    )?;
    let mut regrets = Vec::with_capacity(cfg.comparators.len());
    for c in &cfg.comparators {
        let rep = match c {
            ComparatorSpec::Policy { policy, .. } => {
                regret_vs_policy(&record, &Comparator::Policy(policy))?
            }
            ComparatorSpec::PointwiseMax { .. } => {
                regret_vs_policy(&record, &Comparator::PointwiseMax)?
            }
            ComparatorSpec::Oracle { name } => {
                let oracle = cfg.reward.build(&stream, &root.named("rewards"))?;
                let actions = stream
                    .iter()
                    .map(|x| {
                        oracle.best_arm(x).map(ActionIndex).ok_or_else(|| {
                            CliError::Report(format!(
                                "comparator {name}: the {} mechanism has no best-arm oracle",
                                oracle.name()
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                regret_vs_policy(&record, &Comparator::Actions(&actions))?
            }
        };
        regrets.push((c.name().to_string(), rep));
    }
    let certificate = match (&cfg.learner, mech.tier()) {
        (LearnerSpec::Exp3ix, tier) if tier != RewardTier::Adversarial => Some(
            exp3ix_highprob_check(&record.vectors, record.arms, &record.actions, cfg.experiment.delta)?,
        ),
        _ => None,
    };
    Ok(ReplicaRun {
        record,
        regrets,
        certificate,
        stream_key: root.key(),
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn digest(path: &Path) -> Result<FileDigest, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(FileDigest {
        file: path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Report(format!("{}: {other:?}", path.display())),
    }
}

fn write_trace(path: &Path, replica: u32, rec: &RunRecord) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record([
        "replica",
        "t",
        "context_uid",
        "context_coord",
        "category",
        "phase",
        "stage",
        "period",
        "chosen_arm",
        "reward",
        "strategy",
    ])
    .map_err(|e| csv_err(path, e))?;
    for i in 0..rec.len() {
        let x = rec.contexts[i];
        let s = rec.internals.get(i).copied().unwrap_or_default();
        w.write_record([
            replica.to_string(),
            (i + 1).to_string(),
            x.uid.to_string(),
            x.coord.to_string(),
            opt(s.category),
            opt(s.phase),
            opt(s.stage),
            opt(s.period),
            rec.actions[i].to_string(),
            rec.rewards[i].to_string(),
            opt(s.strategy),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_summary(
    path: &Path,
    replica: u32,
    checkpoints: &[u64],
    run: &ReplicaRun,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec![
        "replica".to_string(),
        "checkpoint_T".to_string(),
        "cum_reward".to_string(),
    ];
    header.extend(run.regrets.iter().map(|(n, _)| format!("cum_regret_{n}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    let cum = run.record.cumulative_rewards();
    for &t in checkpoints {
        let i = (t - 1) as usize;
        let mut row = vec![replica.to_string(), t.to_string(), cum[i].to_string()];
        row.extend(run.regrets.iter().map(|(_, r)| r.regret[i].to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Report(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Runs every replica of `cfg` and writes the artifact set into `out`:
/// `trace_{r}.csv`, `summary_{r}.csv`, `replica_{r}.json` and
/// `manifest.json`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out: &Path,
    options: RunOptions,
) -> Result<Manifest, CliError> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let hash = cfg.hash();
    let checkpoints = cfg.checkpoints();
    let sidecars: Vec<ReplicaSidecar> = (0..cfg.experiment.replicas)
        .into_par_iter()
        .map(|r| -> Result<ReplicaSidecar, CliError> {
            let key_replica = if options.same_stream_for_all { 0 } else { r };
            let run = run_replica(cfg, key_replica)?;
            let trace = if cfg.experiment.trace {
                let p = out.join(format!("trace_{r}.csv"));
                write_trace(&p, r, &run.record)?;
                Some(digest(&p)?)
            } else {
                None
            };
            let sp = out.join(format!("summary_{r}.csv"));
            write_summary(&sp, r, &checkpoints, &run)?;
            Ok(ReplicaSidecar {
                replica: r,
                stream_key: format!("{:016x}", run.stream_key),
                config_hash: hash.clone(),
                horizon: cfg.experiment.horizon,
                cum_reward: run.record.total_reward(),
                cum_regret: run
                    .regrets
                    .iter()
                    .map(|(n, rep)| (n.clone(), rep.total_regret()))
                    .collect(),
                certificate: run.certificate,
                trace,
                summary: digest(&sp)?,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut replicas = Vec::with_capacity(sidecars.len());
    for s in &sidecars {
        let p = out.join(format!("replica_{}.json", s.replica));
        write_json(&p, s)?;
        replicas.push(digest(&p)?);
    }
    let mut canon = cfg.clone();
    canon.experiment.output = None;
    let manifest = Manifest {
        name: cfg.experiment.name.clone(),
        config_hash: hash,
        software: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.experiment.seed,
        seed_derivation: SEED_DERIVATION.to_string(),
        replicas,
        config: serde_json::to_value(&canon)
            .map_err(|e| CliError::Report(format!("serializing config: {e}")))?,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

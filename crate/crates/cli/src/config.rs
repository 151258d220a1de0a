//! Experiment configuration.
//!
//! One TOML document per experiment:
//!
//! ```toml
//! [experiment]
//! name = "quickstart"
//! horizon = 20000
//! replicas = 2
//! seed = 7
//! output = "runs/quickstart"
//!
//! [process]
//! kind = "deterministic_c2"
//! schedule = { kind = "power", exponent = 0.5 }
//!
//! [reward]
//! kind = "context_bernoulli"
//! arms = 2
//! high = 0.75
//! low = 0.5
//!
//! [learner]
//! kind = "per_instance_exp3ix"
//!
//! [[comparators]]
//! name = "oracle"
//! kind = "oracle"
//! ```
//!
//! Policy lists live under `[policies.<name>]` and are referenced by name
//! from the learner section.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use unibandit::learners::Policy;
use unibandit::processes::ProcessSpec;
use unibandit::rewards::RewardSpec;
use unibandit::timescales::PhaseSchedule;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub process: ProcessSpec,
    pub reward: RewardSpec,
    pub learner: LearnerSpec,
    #[serde(default)]
    pub policies: BTreeMap<String, PolicyList>,
    #[serde(default)]
    pub comparators: Vec<ComparatorSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub horizon: u64,
    #[serde(default = "one")]
    pub replicas: u32,
    pub seed: u64,
    /// Output directory; `UNIBANDIT_OUTPUT_ROOT` replaces it with
    /// `<root>/<name>`.
    #[serde(default)]
    pub output: Option<String>,
    /// Checkpoint times; powers of two up to the horizon by default.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    /// Confidence level of the EXP3.IX regret certificate.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Write per-step trace files.
    #[serde(default = "yes")]
    pub trace: bool,
}

fn one() -> u32 {
    1
}

fn yes() -> bool {
    true
}

fn default_delta() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyList {
    pub list: Vec<Policy>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerSpec {
    Uniform,
    Exp3ix,
    FixedPolicy {
        policy: Policy,
    },
    PerInstanceExp3ix,
    PerInstanceExpinf {
        #[serde(default)]
        experts: Option<usize>,
    },
    ExpinfPolicies {
        policies: String,
    },
    C5 {
        schedule: PhaseSchedule,
        policies: String,
    },
}

impl LearnerSpec {
    fn policy_ref(&self) -> Option<&str> {
        match self {
            LearnerSpec::ExpinfPolicies { policies } | LearnerSpec::C5 { policies, .. } => {
                Some(policies)
            }
            _ => None,
        }
    }
}

/// A named comparator for the summary's regret columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComparatorSpec {
    Policy { name: String, policy: Policy },
    /// The mechanism's best arm at each context (stationary mechanisms).
    Oracle { name: String },
    /// The best entry of each reward vector.
    PointwiseMax { name: String },
}

impl ComparatorSpec {
    pub fn name(&self) -> &str {
        match self {
            ComparatorSpec::Policy { name, .. }
            | ComparatorSpec::Oracle { name }
            | ComparatorSpec::PointwiseMax { name } => name,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let e = &self.experiment;
        if e.horizon == 0 {
            return bad("experiment.horizon must be ≥ 1".into());
        }
        if e.replicas == 0 {
            return bad("experiment.replicas must be ≥ 1".into());
        }
        if !(e.delta > 0.0 && e.delta < 1.0) {
            return bad(format!("experiment.delta = {} outside (0, 1)", e.delta));
        }
        if let Some(cps) = &e.checkpoints {
            if cps.iter().any(|&c| c == 0 || c > e.horizon) {
                return bad("checkpoints must lie in [1, horizon]".into());
            }
        }
        self.process
            .validate()
            .map_err(|err| CliError::Config(format!("process: {err}")))?;
        let arms = self.reward.arms();
        if arms == 0 {
            return bad("reward: no arms".into());
        }
        for (name, list) in &self.policies {
            if list.list.is_empty() {
                return bad(format!("policies.{name} is empty"));
            }
            for p in &list.list {
                p.validate(arms)
                    .map_err(|err| CliError::Config(format!("policies.{name}: {err}")))?;
            }
        }
        if let Some(r) = self.learner.policy_ref() {
            if !self.policies.contains_key(r) {
                return bad(format!("learner references unknown policy list '{r}'"));
            }
        }
        match &self.learner {
            LearnerSpec::FixedPolicy { policy } => policy
                .validate(arms)
                .map_err(|err| CliError::Config(format!("learner.policy: {err}")))?,
            LearnerSpec::C5 { schedule, .. } => schedule
                .validate()
                .map_err(|err| CliError::Config(format!("learner.schedule: {err}")))?,
            _ => {}
        }
        let mut names = std::collections::HashSet::new();
        for c in &self.comparators {
            if !names.insert(c.name()) {
                return bad(format!("duplicate comparator name '{}'", c.name()));
            }
            if c.name().is_empty() || c.name().contains([',', '"', '\n']) {
                return bad(format!("comparator name '{}' is not a plain CSV label", c.name()));
            }
            if let ComparatorSpec::Policy { policy, name } = c {
                policy
                    .validate(arms)
                    .map_err(|err| CliError::Config(format!("comparator {name}: {err}")))?;
            }
        }
        Ok(())
    }

    pub fn policy_list(&self, name: &str) -> Vec<Policy> {
        self.policies
            .get(name)
            .map(|l| l.list.clone())
            .unwrap_or_default()
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        match &self.experiment.checkpoints {
            Some(c) => {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                c
            }
            None => unibandit::diagnostics::log_checkpoints(self.experiment.horizon),
        }
    }

    /// SHA-256 over everything that influences trajectories and reports:
    /// the configuration with the output location removed.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.experiment.output = None;
        let json = serde_json::to_vec(&canon).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

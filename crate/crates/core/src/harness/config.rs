use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bandit::BanditConfig;
use crate::dqn::DqnConfig;
use crate::env::EnvConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Cmab,
    Dqn,
    Oracle,
    NeverHedge,
}

impl AgentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Cmab => "cmab",
            AgentKind::Dqn => "dqn",
            AgentKind::Oracle => "oracle",
            AgentKind::NeverHedge => "never_hedge",
        }
    }

    /// Whether the agent has parameters to learn.
    pub fn learns(self) -> bool {
        matches!(self, AgentKind::Cmab | AgentKind::Dqn)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmab" => Ok(AgentKind::Cmab),
            "dqn" => Ok(AgentKind::Dqn),
            "oracle" => Ok(AgentKind::Oracle),
            "never_hedge" | "never-hedge" => Ok(AgentKind::NeverHedge),
            other => Err(Error::InvalidConfig(format!("unknown agent kind {other:?}"))),
        }
    }
}

/// Everything needed to reproduce one train-and-evaluate run.
///
/// Training consumes the `TrainPath` and `Agent` streams of `train_seed`,
/// evaluation the `EvalPath` streams of `eval_seed`, so the two phases never
/// share a stream even when the seeds coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub agent: AgentKind,
    pub episodes: usize,
    pub train_seed: u64,
    pub eval_seed: u64,
    pub eval_paths: usize,
    /// Where artifacts go; `None` keeps the run in memory.
    pub output_dir: Option<PathBuf>,
    pub bandit: BanditConfig,
    /// Also carries the discount factor.
    pub dqn: DqnConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvConfig::default(),
            agent: AgentKind::Cmab,
            episodes: 100,
            train_seed: 0,
            eval_seed: 1,
            eval_paths: 100,
            output_dir: None,
            bandit: BanditConfig::default(),
            dqn: DqnConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        if self.eval_paths == 0 {
            return Err(Error::InvalidConfig("eval_paths must be >= 1".into()));
        }
        match self.agent {
            AgentKind::Cmab => self.bandit.validate(),
            AgentKind::Dqn => self.dqn.validate(),
            AgentKind::Oracle | AgentKind::NeverHedge => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON encoding, excluding the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config is always serialisable");
        hex::encode(Sha256::digest(&bytes))
    }
}

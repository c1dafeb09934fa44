use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::artifacts;
use super::config::{AgentKind, ExperimentConfig};
use crate::bandit::{train_agent, NeuralLinearState};
use crate::dqn::{train_dqn, QAgentState};
use crate::env::{run_episode, Context, EnvConfig, EpisodeResult};
use crate::rng::{Domain, SeedStream};
use crate::{Error, Result};

pub const SNAPSHOT_VERSION: u32 = 1;
pub const SUMMARY_VERSION: u32 = 1;

/// A frozen agent ready for greedy evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum TrainedAgent {
    Cmab(Box<NeuralLinearState>),
    Dqn(Box<QAgentState>),
    Oracle,
    NeverHedge,
}

impl TrainedAgent {
    pub fn kind(&self) -> AgentKind {
        match self {
            TrainedAgent::Cmab(_) => AgentKind::Cmab,
            TrainedAgent::Dqn(_) => AgentKind::Dqn,
            TrainedAgent::Oracle => AgentKind::Oracle,
            TrainedAgent::NeverHedge => AgentKind::NeverHedge,
        }
    }

    /// Action without exploration: posterior means for the bandit, the
    /// arg-max Q-value for the Q-agent.
    pub fn greedy_action(&self, context: &Context, env: &EnvConfig) -> Result<usize> {
        match self {
            TrainedAgent::Cmab(s) => s.greedy_action(context.as_slice()),
            TrainedAgent::Dqn(q) => q.greedy_action(context.as_slice()),
            TrainedAgent::Oracle => {
                let spot = context.moneyness() * env.contract.strike;
                let delta = crate::market::bsm_call_delta(
                    spot,
                    env.contract.strike,
                    env.gbm.sigma,
                    context.tau(),
                )?;
                Ok(env.actions.nearest(delta))
            }
            TrainedAgent::NeverHedge => Ok(env.actions.nearest(0.0)),
        }
    }
}

/// Serialised agent plus what produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub reward_curve: Vec<f64>,
    pub agent: TrainedAgent,
}

impl AgentSnapshot {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(SNAPSHOT_VERSION) => {}
            other => {
                return Err(Error::Snapshot(format!(
                    "expected format_version {SNAPSHOT_VERSION}, found {other:?}"
                )))
            }
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Trains the configured agent and returns it with its per-episode
/// accumulated reward. Fixed policies are run over the same training paths
/// so their curves are comparable.
pub fn train(config: &ExperimentConfig) -> Result<(TrainedAgent, Vec<f64>)> {
    config.validate()?;
    let env = &config.env;
    match config.agent {
        AgentKind::Cmab => {
            let (state, curve) = train_agent(env, &config.bandit, config.episodes, config.train_seed)?;
            Ok((TrainedAgent::Cmab(Box::new(state)), curve))
        }
        AgentKind::Dqn => {
            let (state, curve) = train_dqn(env, &config.dqn, config.episodes, config.train_seed)?;
            Ok((TrainedAgent::Dqn(Box::new(state)), curve))
        }
        AgentKind::Oracle | AgentKind::NeverHedge => {
            let agent = if config.agent == AgentKind::Oracle {
                TrainedAgent::Oracle
            } else {
                TrainedAgent::NeverHedge
            };
            let curve = (0..config.episodes)
                .map(|episode| {
                    let seed = SeedStream::new(config.train_seed, Domain::TrainPath, episode as u64);
                    Ok(run_greedy(&agent, env, seed)?.accumulated_reward())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((agent, curve))
        }
    }
}

fn run_greedy(agent: &TrainedAgent, env: &EnvConfig, seed: SeedStream) -> Result<EpisodeResult> {
    let mut error = None;
    let mut policy = |c: &Context| match agent.greedy_action(c, env) {
        Ok(a) => a,
        Err(e) => {
            error.get_or_insert(e);
            0
        }
    };
    let result = run_episode(env, &mut policy, seed)?;
    match error {
        Some(e) => Err(e),
        None => Ok(result),
    }
}

/// One held-out path, played by the agent and by the delta oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPath {
    pub agent: EpisodeResult,
    pub oracle_pnl: f64,
}

/// Greedy evaluation on `config.eval_paths` held-out paths, in parallel.
/// Results are in path order regardless of scheduling.
pub fn evaluate(config: &ExperimentConfig, agent: &TrainedAgent) -> Result<Vec<EvalPath>> {
    config.validate()?;
    let env = &config.env;
    (0..config.eval_paths)
        .into_par_iter()
        .map(|p| {
            let seed = SeedStream::new(config.eval_seed, Domain::EvalPath, p as u64);
            let played = run_greedy(agent, env, seed)?;
            let oracle = run_greedy(&TrainedAgent::Oracle, env, seed)?;
            Ok(EvalPath {
                agent: played,
                oracle_pnl: oracle.terminal_pnl,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnlStats {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single path.
    pub std: f64,
    pub mean_abs: f64,
    pub mean_sq: f64,
}

impl PnlStats {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        Ok(PnlStats {
            mean,
            std: if values.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 },
            mean_abs: values.iter().map(|v| v.abs()).sum::<f64>() / n,
            mean_sq: values.iter().map(|v| v * v).sum::<f64>() / n,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub agent_pnl: PnlStats,
    pub oracle_pnl: PnlStats,
    /// Mean over all evaluated steps of `|chosen level - delta|`.
    pub mean_abs_action_delta: f64,
    /// Fraction of steps with `|chosen level - delta|` within two arm widths.
    pub delta_agreement: f64,
}

impl Metrics {
    pub fn from_paths(paths: &[EvalPath], env: &EnvConfig) -> Result<Self> {
        let agent: Vec<f64> = paths.iter().map(|p| p.agent.terminal_pnl).collect();
        let oracle: Vec<f64> = paths.iter().map(|p| p.oracle_pnl).collect();
        let tolerance = 2.0 * env.actions.width() * (1.0 + 1e-9);
        let (mut abs_sum, mut within, mut steps) = (0.0, 0usize, 0usize);
        for p in paths {
            for (level, delta) in p.agent.levels.iter().zip(&p.agent.deltas) {
                let gap = (level - delta).abs();
                abs_sum += gap;
                within += usize::from(gap <= tolerance);
                steps += 1;
            }
        }
        if steps == 0 {
            return Err(Error::Empty);
        }
        Ok(Metrics {
            agent_pnl: PnlStats::of(&agent)?,
            oracle_pnl: PnlStats::of(&oracle)?,
            mean_abs_action_delta: abs_sum / steps as f64,
            delta_agreement: within as f64 / steps as f64,
        })
    }
}

/// Run-specific facts that are not a function of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub crate_version: String,
    pub started_unix_secs: u64,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub reward_curve: Vec<f64>,
    pub agent_pnl: Vec<f64>,
    pub oracle_pnl: Vec<f64>,
    pub metrics: Metrics,
    pub metadata: RunMetadata,
}

impl RunSummary {
    pub fn new(
        config: &ExperimentConfig,
        reward_curve: Vec<f64>,
        paths: &[EvalPath],
        started: SystemTime,
        wall_clock_secs: f64,
    ) -> Result<Self> {
        Ok(RunSummary {
            format_version: SUMMARY_VERSION,
            config: config.clone(),
            config_hash: config.hash(),
            reward_curve,
            agent_pnl: paths.iter().map(|p| p.agent.terminal_pnl).collect(),
            oracle_pnl: paths.iter().map(|p| p.oracle_pnl).collect(),
            metrics: Metrics::from_paths(paths, &config.env)?,
            metadata: RunMetadata {
                crate_version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix_secs: started
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                wall_clock_secs,
            },
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let summary: RunSummary = serde_json::from_str(&text)?;
        if summary.format_version != SUMMARY_VERSION {
            return Err(Error::Snapshot(format!(
                "summary format_version {} is not {SUMMARY_VERSION}",
                summary.format_version
            )));
        }
        Ok(summary)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Trains, evaluates greedily on the held-out paths and, when an output
/// directory is configured, writes the artifacts there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let (agent, curve) = train(config)?;
    let paths = evaluate(config, &agent)?;
    let summary = RunSummary::new(config, curve, &paths, started, clock.elapsed().as_secs_f64())?;
    if let Some(dir) = &config.output_dir {
        artifacts::write_run(dir, &summary, &paths)?;
    }
    Ok(summary)
}

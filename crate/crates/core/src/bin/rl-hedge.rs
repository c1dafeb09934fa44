use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand};
use rl_hedge::harness::{
    artifacts, compare_runs, evaluate, train, AgentKind, AgentSnapshot, ExperimentConfig,
    RunSummary, TrainedAgent, SNAPSHOT_VERSION,
};
use rl_hedge::market::simulate_paths;
use rl_hedge::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Train and evaluate option-hedging agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write simulated GBM paths to paths.csv.
    Simulate(Common),
    /// Train an agent; writes reward_curve.csv and agent.json.
    Train(Common),
    /// Evaluate the agent in --out (or a fixed policy) on held-out paths.
    Evaluate(Common),
    /// Paired comparison of two evaluated runs (directories or summary files).
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed of the phase being run.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// cmab, dqn, oracle or never_hedge.
    #[arg(long)]
    agent: Option<AgentKind>,
    /// Discount factor for the Q-agent.
    #[arg(long)]
    gamma: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(agent) = self.agent {
            config.agent = agent;
        }
        if let Some(gamma) = self.gamma {
            config.dqn.gamma = gamma;
        }
        if let Some(out) = &self.out {
            config.output_dir = Some(out.clone());
        }
        Ok(config)
    }

    fn out_dir(config: &ExperimentConfig) -> PathBuf {
        config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

fn simulate(args: &Common) -> Result<()> {
    let mut config = args.load()?;
    if let Some(seed) = args.seed {
        config.eval_seed = seed;
    }
    config.env.validate()?;
    let paths = simulate_paths(&config.env.gbm, &config.env.grid, config.eval_seed, config.eval_paths);
    let dir = Common::out_dir(&config);
    artifacts::write_paths(&dir, &paths)?;
    println!("{}", dir.join(artifacts::PATHS).display());
    Ok(())
}

fn train_cmd(args: &Common) -> Result<()> {
    let mut config = args.load()?;
    if let Some(seed) = args.seed {
        config.train_seed = seed;
    }
    let (agent, reward_curve) = train(&config)?;
    let dir = Common::out_dir(&config);
    artifacts::write_reward_curve(&dir, &reward_curve)?;
    let snapshot = AgentSnapshot {
        format_version: SNAPSHOT_VERSION,
        config,
        reward_curve,
        agent,
    };
    let path = dir.join(artifacts::SNAPSHOT);
    snapshot.write(&path)?;
    println!("{}", path.display());
    Ok(())
}

fn evaluate_cmd(args: &Common) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let loaded = args.load()?;
    let dir = Common::out_dir(&loaded);
    let snapshot_path = dir.join(artifacts::SNAPSHOT);
    let (mut config, agent, curve) = if snapshot_path.exists() {
        let s = AgentSnapshot::read(&snapshot_path)?;
        // Training settings come from the snapshot; evaluation settings from the command line.
        let mut config = s.config;
        config.eval_seed = loaded.eval_seed;
        config.eval_paths = loaded.eval_paths;
        config.output_dir = loaded.output_dir;
        (config, s.agent, s.reward_curve)
    } else {
        let agent = match loaded.agent {
            AgentKind::Oracle => TrainedAgent::Oracle,
            AgentKind::NeverHedge => TrainedAgent::NeverHedge,
            kind => {
                return Err(Error::Snapshot(format!(
                    "no {} in {}; run `train --agent {kind}` first",
                    artifacts::SNAPSHOT,
                    dir.display()
                )))
            }
        };
        (loaded, agent, Vec::new())
    };
    if let Some(seed) = args.seed {
        config.eval_seed = seed;
    }
    let paths = evaluate(&config, &agent)?;
    let summary = RunSummary::new(&config, curve, &paths, started, clock.elapsed().as_secs_f64())?;
    artifacts::write_evaluation(&dir, &summary, &paths)?;
    println!("{}", serde_json::to_string_pretty(&summary.metrics)?);
    Ok(())
}

fn read_summary(path: &Path) -> Result<RunSummary> {
    if path.is_dir() {
        RunSummary::read(&path.join(artifacts::SUMMARY))
    } else {
        RunSummary::read(path)
    }
}

fn compare_cmd(a: &Path, b: &Path, out: Option<&Path>) -> Result<()> {
    let comparison = compare_runs(&read_summary(a)?, &read_summary(b)?)?;
    let text = serde_json::to_string_pretty(&comparison)?;
    if let Some(out) = out {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let path = out.join("comparison.json");
        std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
    }
    println!("{text}");
    Ok(())
}

fn fail(message: &str, kind: &str) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": message, "kind": kind }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(e.to_string().trim(), "usage"),
    };
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Train(args) => train_cmd(args),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::Compare { a, b, out } => compare_cmd(a, b, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e.to_string(), e.kind()),
    }
}

//! Trains the deep Q-network hedger and writes the usual artifacts.
//!
//! `cargo run --release --example train_dqn -- [episodes] [gamma] [out_dir]`

use std::path::PathBuf;

use rl_hedge::harness::{run_experiment, AgentKind, ExperimentConfig};

fn main() -> rl_hedge::Result<()> {
    let mut args = std::env::args().skip(1);
    let episodes = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let gamma = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.99);
    let out = args.next().map(PathBuf::from);

    let mut config = ExperimentConfig {
        agent: AgentKind::Dqn,
        episodes,
        output_dir: out.clone(),
        ..ExperimentConfig::default()
    };
    config.dqn.gamma = gamma;
    let summary = run_experiment(&config)?;

    let decile = (episodes / 10).max(1);
    let first = summary.reward_curve[..decile].iter().sum::<f64>() / decile as f64;
    let last = summary.reward_curve[episodes - decile..].iter().sum::<f64>() / decile as f64;
    println!("gamma {gamma}, {episodes} episodes");
    println!("mean accumulated reward: first decile {first:+.3e}, last decile {last:+.3e}");
    println!("mean |level - delta| {:.4}", summary.metrics.mean_abs_action_delta);
    println!("mean |terminal P&L|  {:.4}", summary.metrics.agent_pnl.mean_abs);
    if let Some(dir) = out {
        println!("artifacts in {}", dir.display());
    }
    Ok(())
}

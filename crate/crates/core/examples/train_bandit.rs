//! Trains the neural-linear Thompson-sampling hedger and compares its greedy
//! actions with the Black-Scholes delta on held-out paths.
//!
//! `cargo run --release --example train_bandit -- [episodes] [seed]`

use rl_hedge::harness::{run_experiment, AgentKind, ExperimentConfig};

fn main() -> rl_hedge::Result<()> {
    let mut args = std::env::args().skip(1);
    let episodes = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);
    let config = ExperimentConfig {
        agent: AgentKind::Cmab,
        episodes,
        train_seed: seed,
        ..ExperimentConfig::default()
    };
    let summary = run_experiment(&config)?;

    let curve = &summary.reward_curve;
    for (i, chunk) in curve.chunks((curve.len() / 10).max(1)).enumerate() {
        let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
        println!("episodes {:>4}+  mean accumulated reward {mean:+.3e}", i * chunk.len());
    }
    let m = &summary.metrics;
    println!("mean |level - delta|       {:.4}", m.mean_abs_action_delta);
    println!("within two arm widths      {:.1}%", 100.0 * m.delta_agreement);
    println!("terminal P&L sd  agent {:.4}  oracle {:.4}", m.agent_pnl.std, m.oracle_pnl.std);
    Ok(())
}

//! Q-network hedgers trained with a short and a long discount horizon,
//! evaluated on the same held-out paths.
//!
//! `cargo run --release --example gamma_study -- [episodes] [seeds]`

use rl_hedge::harness::{compare_runs, run_experiment, AgentKind, ExperimentConfig};

fn main() -> rl_hedge::Result<()> {
    let mut args = std::env::args().skip(1);
    let episodes = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let seeds: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);

    println!("seed   mean|P&L| g=0.1   mean|P&L| g=0.99   sign-test p");
    for seed in 0..seeds {
        let run = |gamma: f64| {
            let mut config = ExperimentConfig {
                agent: AgentKind::Dqn,
                episodes,
                train_seed: seed,
                eval_seed: 10_000 + seed,
                ..ExperimentConfig::default()
            };
            config.dqn.gamma = gamma;
            run_experiment(&config)
        };
        let (short, long) = (run(0.1)?, run(0.99)?);
        let cmp = compare_runs(&short, &long)?;
        println!(
            "{seed:>4}   {:.4}            {:.4}             {:.3}",
            short.metrics.agent_pnl.mean_abs, long.metrics.agent_pnl.mean_abs, cmp.sign_test_p_value
        );
    }
    Ok(())
}

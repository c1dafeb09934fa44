//! Bandit, Q-network, delta oracle and no hedge at the same training budget,
//! paired on one evaluation set.
//!
//! `cargo run --release --example compare_agents -- [episodes] [seed]`

use rl_hedge::harness::{compare_runs, run_experiment, AgentKind, ExperimentConfig};

fn main() -> rl_hedge::Result<()> {
    let mut args = std::env::args().skip(1);
    let episodes = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);

    let runs = [AgentKind::Cmab, AgentKind::Dqn, AgentKind::Oracle, AgentKind::NeverHedge]
        .map(|agent| {
            run_experiment(&ExperimentConfig {
                agent,
                episodes,
                train_seed: seed,
                ..ExperimentConfig::default()
            })
        });
    let runs: Vec<_> = runs.into_iter().collect::<rl_hedge::Result<_>>()?;

    println!("agent         mean P&L    sd P&L    mean sq P&L   |level-delta|");
    for r in &runs {
        let m = &r.metrics;
        println!(
            "{:<12}  {:+.5}   {:.5}   {:.3e}     {:.4}",
            r.config.agent.as_str(),
            m.agent_pnl.mean,
            m.agent_pnl.std,
            m.agent_pnl.mean_sq,
            m.mean_abs_action_delta
        );
    }
    let cmp = compare_runs(&runs[0], &runs[1])?;
    println!(
        "\ncmab vs dqn: sd ratio {:.3}, cmab closer to zero on {}/{} paths, sign-test p {:.3}",
        cmp.std_ratio, cmp.a_closer, cmp.n_paths, cmp.sign_test_p_value
    );
    Ok(())
}

//! One hedging episode under the delta oracle, then the P&L spread of the
//! oracle, the variance-minimising oracle and an unhedged short call.

use rl_hedge::env::{oracle_action, reset, run_episode, Context, EnvConfig, OracleMode};
use rl_hedge::rng::{Domain, SeedStream};

fn spread(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn main() -> rl_hedge::Result<()> {
    let config = EnvConfig::default();
    let episode = run_episode(&config, &mut config.oracle_policy(), 11)?;
    println!("step   spot     delta    level   reward");
    for i in (0..config.grid.n_steps).step_by(5) {
        println!(
            "{i:>4}  {:.4}  {:.4}  {:.2}   {:+.3e}",
            episode.spots[i], episode.deltas[i], episode.levels[i], episode.rewards[i]
        );
    }
    println!("terminal P&L {:+.5}\n", episode.terminal_pnl);

    let (state, _) = reset(&config)?;
    let mut rng = SeedStream::new(0, Domain::Oracle, 0).rng();
    let mc = oracle_action(&state, &config, OracleMode::McVarianceMin { inner_samples: 100_000 }, &mut rng)?;
    println!("variance-minimising arm at inception: level {}", config.actions.level(mc));

    let n = 500;
    let mut hedged = Vec::with_capacity(n);
    let mut naked = Vec::with_capacity(n);
    for p in 0..n as u64 {
        let seed = SeedStream::new(5, Domain::EvalPath, p);
        hedged.push(run_episode(&config, &mut config.oracle_policy(), seed)?.terminal_pnl);
        naked.push(run_episode(&config, &mut |_: &Context| 0, seed)?.terminal_pnl);
    }
    let (hm, hs) = spread(&hedged);
    let (nm, ns) = spread(&naked);
    println!("over {n} paths: delta hedge mean {hm:+.4} sd {hs:.4}; unhedged mean {nm:+.4} sd {ns:.4}");
    Ok(())
}

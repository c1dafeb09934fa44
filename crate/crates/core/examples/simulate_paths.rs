//! Seeded GBM paths: reproducibility and terminal moments.
//!
//! `cargo run --example simulate_paths -- [n_paths] [seed]`

use rl_hedge::market::{simulate_gbm_path, simulate_paths, GbmParams, TimeGrid};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);

    let params = GbmParams::default();
    let grid = TimeGrid::default();
    let paths = simulate_paths(&params, &grid, seed, n);

    let terminal: Vec<f64> = paths.iter().map(|p| p.terminal_spot()).collect();
    let mean = terminal.iter().sum::<f64>() / n as f64;
    let logs: Vec<f64> = terminal.iter().map(|s| s.ln()).collect();
    let log_mean = logs.iter().sum::<f64>() / n as f64;
    let log_var = logs.iter().map(|l| (l - log_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let t = grid.maturity();

    println!("{n} paths, {} steps of {}", grid.n_steps, grid.dt);
    println!("mean S_T      {mean:.5}  (expected {:.5})", params.s0 * (params.mu * t).exp());
    println!("var log S_T   {log_var:.5}  (expected {:.5})", params.sigma.powi(2) * t);

    let again = simulate_gbm_path(&params, &grid, 3);
    assert_eq!(again, simulate_gbm_path(&params, &grid, 3));
    let shown: Vec<String> = again.spots.iter().step_by(10).map(|s| format!("{s:.4}")).collect();
    println!("path for seed 3, every 10th step: {}", shown.join(" "));
}

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use rand::Rng;
use rl_hedge::harness::{artifacts, run_experiment, AgentKind, ExperimentConfig, RunSummary};
use rl_hedge::market::{bsm_call_delta, bsm_call_price, mc_price_oracle, GbmParams, OptionContract};
use rl_hedge::rng::SeedStream;

const SEEDS: u64 = 5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn pricing_oracle() -> Outcome {
    let contract = OptionContract::default();
    let params = GbmParams { mu: 0.0, ..GbmParams::default() };
    let analytic = bsm_call_price(1.0, contract.strike, params.sigma, contract.maturity).unwrap();
    let (mean, se) = mc_price_oracle(&contract, &params, 1_000_000, 2024).unwrap();
    let z = (analytic - mean).abs() / se;
    outcome(
        z <= 3.0 && (analytic - 0.13318).abs() < 5e-6,
        format!("bsm {analytic:.6}, mc {mean:.6} +- {se:.2e} ({z:.2} SE)"),
    )
}

fn delta_correctness() -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let spot = 0.7 + 0.06 * i as f64;
            let tau = 0.2 + 0.5 * j as f64;
            let fd = (bsm_call_price(spot + h, 1.0, 0.15, tau).unwrap()
                - bsm_call_price(spot - h, 1.0, 0.15, tau).unwrap())
                / (2.0 * h);
            let delta = bsm_call_delta(spot, 1.0, 0.15, tau).unwrap();
            worst = worst.max((delta - fd).abs() / delta.abs());
        }
    }
    outcome(worst <= 1e-5, format!("max rel err {worst:.2e} on 10x10 grid"))
}

fn gradient_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut rng = SeedStream::from(1000 + seed).rng();
        let layers = rng.random_range(1..=5);
        let sizes: Vec<usize> = (0..=layers).map(|_| rng.random_range(1..=20)).collect();
        worst = worst.max(common::gradient_check(&sizes, seed));
    }
    outcome(worst <= 1e-4, format!("max rel err {worst:.2e} over 20 nets"))
}

fn blr_recovery() -> Outcome {
    let worst = (0..10).map(common::blr_vs_ols).fold(0.0, f64::max);
    outcome(worst <= 0.05, format!("max |m - ols|_inf {worst:.2e} over 10 seeds"))
}

fn tabular_q() -> Outcome {
    let worst = (0..20).map(common::tabular_gap).fold(0.0, f64::max);
    outcome(worst <= 1e-3, format!("max |Q - Q*| {worst:.2e} over 20 MDPs"))
}

fn run(agent: AgentKind, episodes: usize, seed: u64, gamma: Option<f64>) -> RunSummary {
    let mut config = ExperimentConfig {
        agent,
        episodes,
        train_seed: seed,
        eval_seed: 10_000 + seed,
        eval_paths: 100,
        ..ExperimentConfig::default()
    };
    if let Some(g) = gamma {
        config.dqn.gamma = g;
    }
    run_experiment(&config).unwrap()
}

fn delta_convergence(cmab: &[RunSummary]) -> Outcome {
    let n = cmab.len() as f64;
    let mae = cmab.iter().map(|s| s.metrics.mean_abs_action_delta).sum::<f64>() / n;
    let agreement = cmab.iter().map(|s| s.metrics.delta_agreement).sum::<f64>() / n;
    let per_seed: Vec<String> = cmab
        .iter()
        .map(|s| format!("{:.2}", s.metrics.delta_agreement))
        .collect();
    outcome(
        mae <= 0.10 && agreement >= 0.80,
        format!(
            "mean |level - delta| {mae:.4} (<= 0.10), agreement {agreement:.3} (>= 0.80), per seed [{}]",
            per_seed.join(", ")
        ),
    )
}

fn sample_efficiency(cmab: &[RunSummary]) -> Outcome {
    let wins: Vec<(f64, f64)> = (0..SEEDS)
        .map(|seed| {
            let dqn = run(AgentKind::Dqn, 100, seed, None);
            (cmab[seed as usize].metrics.agent_pnl.mean_sq, dqn.metrics.agent_pnl.mean_sq)
        })
        .collect();
    let count = wins.iter().filter(|(c, d)| c <= d).count();
    let pairs: Vec<String> = wins.iter().map(|(c, d)| format!("{c:.2e}/{d:.2e}")).collect();
    outcome(
        count >= 4,
        format!("cmab <= dqn mean sq P&L in {count}/5 seeds [{}]", pairs.join(", ")),
    )
}

fn gamma_study() -> Outcome {
    let pairs: Vec<(f64, f64)> = (0..SEEDS)
        .map(|seed| {
            let low = run(AgentKind::Dqn, 1000, seed, Some(0.1));
            let high = run(AgentKind::Dqn, 1000, seed, Some(0.99));
            (low.metrics.agent_pnl.mean_abs, high.metrics.agent_pnl.mean_abs)
        })
        .collect();
    let count = pairs.iter().filter(|(l, h)| l <= h).count();
    let shown: Vec<String> = pairs.iter().map(|(l, h)| format!("{l:.4}/{h:.4}")).collect();
    outcome(
        count >= 4,
        format!("gamma 0.1 <= 0.99 mean |P&L| in {count}/5 seeds [{}]", shown.join(", ")),
    )
}

fn determinism() -> Outcome {
    let mut identical = true;
    for agent in [AgentKind::Cmab, AgentKind::Dqn] {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for dir in &dirs {
            let config = ExperimentConfig {
                agent,
                episodes: 10,
                train_seed: 7,
                eval_seed: 8,
                eval_paths: 100,
                output_dir: Some(dir.path().to_path_buf()),
                ..ExperimentConfig::default()
            };
            run_experiment(&config).unwrap();
        }
        for name in [artifacts::REWARD_CURVE, artifacts::TERMINAL_PNL, artifacts::ACTIONS] {
            let a = fs::read(dirs[0].path().join(name)).unwrap();
            let b = fs::read(dirs[1].path().join(name)).unwrap();
            identical &= a == b && !a.is_empty();
        }
    }
    outcome(identical, "cmab and dqn CSVs compared byte for byte".into())
}

fn report(failures: &mut Vec<usize>, id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let pass = o.pass && elapsed <= budget;
    if !pass {
        failures.push(id);
    }
    println!(
        "{} {id}. {name}: {} [{:.1}s, budget {}s]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
}

fn main() {
    // Under `cargo test`, libtest flags such as `--nocapture` may be forwarded.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: usize| filter.is_empty() || filter.iter().any(|f| f == &id.to_string());
    let secs = Duration::from_secs;
    let mut failures = Vec::new();

    if wanted(1) {
        report(&mut failures, 1, "pricing oracle", secs(10), pricing_oracle);
    }
    if wanted(2) {
        report(&mut failures, 2, "delta correctness", secs(1), delta_correctness);
    }
    if wanted(3) {
        report(&mut failures, 3, "gradient check", secs(30), gradient_check);
    }
    if wanted(4) {
        report(&mut failures, 4, "BLR recovery", secs(5), blr_recovery);
    }
    if wanted(5) {
        report(&mut failures, 5, "tabular Q-learning", secs(10), tabular_q);
    }
    if wanted(6) || wanted(7) {
        let start = Instant::now();
        let cmab: Vec<RunSummary> = (0..SEEDS).map(|s| run(AgentKind::Cmab, 100, s, None)).collect();
        let shared = start.elapsed();
        if wanted(6) {
            report(&mut failures, 6, "delta convergence", secs(300) - shared, || delta_convergence(&cmab));
        }
        if wanted(7) {
            report(&mut failures, 7, "sample efficiency", secs(900) - shared, || sample_efficiency(&cmab));
        }
    }
    if wanted(8) {
        report(&mut failures, 8, "gamma study", secs(2700), gamma_study);
    }
    if wanted(9) {
        report(&mut failures, 9, "determinism", secs(60), determinism);
    }

    if failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failures:?}");
        std::process::exit(1);
    }
}

//! Black-Scholes price and delta of the benchmark call, checked against Monte-Carlo.

use rl_hedge::env::ActionGrid;
use rl_hedge::market::{bsm_call_delta, bsm_call_price, mc_price_oracle, GbmParams, OptionContract};

fn main() -> rl_hedge::Result<()> {
    let contract = OptionContract::default();
    let sigma = GbmParams::default().sigma;
    let price = bsm_call_price(1.0, contract.strike, sigma, contract.maturity)?;
    let delta = bsm_call_delta(1.0, contract.strike, sigma, contract.maturity)?;
    let risk_neutral = GbmParams { mu: 0.0, ..GbmParams::default() };
    let (mc, se) = mc_price_oracle(&contract, &risk_neutral, 1_000_000, 1)?;
    let grid = ActionGrid::default();

    println!("ATM call, K={} T={} sigma={sigma}", contract.strike, contract.maturity);
    println!("  price  {price:.6}   (Monte-Carlo {mc:.6} +- {se:.6})");
    println!("  delta  {delta:.6}   nearest grid level {}", grid.level(grid.nearest(delta)));

    println!("\n  spot    tau=5     tau=1     tau=0.1");
    for spot in [0.8, 0.9, 1.0, 1.1, 1.2] {
        let row: Vec<String> = [5.0, 1.0, 0.1]
            .iter()
            .map(|&tau| format!("{:.4}", bsm_call_delta(spot, contract.strike, sigma, tau).unwrap()))
            .collect();
        println!("  {spot:.1}    {}", row.join("    "));
    }
    Ok(())
}

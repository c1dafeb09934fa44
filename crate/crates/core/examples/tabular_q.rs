//! The tabular Monte-Carlo, TD and Q-learning updates on a three-state chain.

use rl_hedge::dqn::tabular::{DeterministicMdp, TabularQ};
use rl_hedge::rng::SeedStream;

fn main() {
    let gamma = 0.9;
    let mdp = DeterministicMdp::chain(&[0.0, 0.0, 1.0]);
    let episode: Vec<(usize, usize, f64)> = (0..3).map(|s| (s, 0, mdp.transition(s, 0).0)).collect();

    let mut mc = TabularQ::new(3, 1);
    let mut td = TabularQ::new(3, 1);
    for _ in 0..200 {
        mc.monte_carlo_update(&episode, 0.1, gamma);
        for s in 0..3 {
            let (r, next) = mdp.transition(s, 0);
            td.td_update(s, 0, r, next.map(|n| (n, 0)), 0.1, gamma);
        }
    }
    let q = mdp.q_learning(0.5, gamma, 2_000, &mut SeedStream::from(1).rng());

    println!("state   MC       TD       Q-learning   exact");
    for (s, exact) in [0.81, 0.9, 1.0].iter().enumerate() {
        println!("{s:>5}   {:.4}   {:.4}   {:.4}       {exact}", mc.get(s, 0), td.get(s, 0), q.get(s, 0));
    }
}

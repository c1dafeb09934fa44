//! Tabular action-value updates: Monte-Carlo, TD (on-policy) and Q-learning.
//!
//! Reference implementations for small discrete problems. Rewards are indexed
//! like transitions: the reward stored with `(s, a)` is the one received
//! after taking `a` in `s`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularQ {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl TabularQ {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        TabularQ {
            n_states,
            n_actions,
            values: vec![0.0; n_states * n_actions],
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.n_actions + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.n_actions + action] = value;
    }

    pub fn max_value(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn greedy(&self, state: usize) -> usize {
        crate::bandit::argmax(self.row(state)).expect("n_actions >= 1")
    }

    fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.n_actions..(state + 1) * self.n_actions]
    }

    /// `Q(s,a) += alpha [G - Q(s,a)]` for every step of a finished episode,
    /// `G` being the discounted return from that step on.
    pub fn monte_carlo_update(&mut self, episode: &[(usize, usize, f64)], alpha: f64, gamma: f64) {
        let mut ret = 0.0;
        for &(s, a, r) in episode.iter().rev() {
            ret = r + gamma * ret;
            let q = self.get(s, a);
            self.set(s, a, q + alpha * (ret - q));
        }
    }

    /// `Q(s,a) += alpha [r + gamma Q(s',a') - Q(s,a)]`; `next = None` at termination.
    pub fn td_update(
        &mut self,
        state: usize,
        action: usize,
        reward: f64,
        next: Option<(usize, usize)>,
        alpha: f64,
        gamma: f64,
    ) {
        let bootstrap = next.map_or(0.0, |(s, a)| self.get(s, a));
        let q = self.get(state, action);
        self.set(state, action, q + alpha * (reward + gamma * bootstrap - q));
    }

    /// `Q(s,a) += alpha [r + gamma max_a' Q(s',a') - Q(s,a)]`; `next = None` at termination.
    pub fn q_learning_update(
        &mut self,
        state: usize,
        action: usize,
        reward: f64,
        next: Option<usize>,
        alpha: f64,
        gamma: f64,
    ) {
        let bootstrap = next.map_or(0.0, |s| self.max_value(s));
        let q = self.get(state, action);
        self.set(state, action, q + alpha * (reward + gamma * bootstrap - q));
    }
}

/// Finite MDP with deterministic transitions; `None` marks termination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicMdp {
    pub n_states: usize,
    pub n_actions: usize,
    pub next: Vec<Option<usize>>,
    pub reward: Vec<f64>,
}

impl DeterministicMdp {
    pub fn new(
        n_states: usize,
        n_actions: usize,
        next: Vec<Option<usize>>,
        reward: Vec<f64>,
    ) -> Result<Self> {
        let cells = n_states * n_actions;
        if next.len() != cells || reward.len() != cells {
            return Err(Error::Shape {
                expected: cells,
                actual: next.len().min(reward.len()),
            });
        }
        if next.iter().flatten().any(|&s| s >= n_states) {
            return Err(Error::InvalidConfig("transition to unknown state".into()));
        }
        Ok(DeterministicMdp {
            n_states,
            n_actions,
            next,
            reward,
        })
    }

    /// Single-action chain `0 -> 1 -> ... -> n-1 -> end` with the given rewards.
    pub fn chain(rewards: &[f64]) -> Self {
        let n = rewards.len();
        let next = (0..n).map(|i| if i + 1 < n { Some(i + 1) } else { None }).collect();
        DeterministicMdp {
            n_states: n,
            n_actions: 1,
            next,
            reward: rewards.to_vec(),
        }
    }

    /// Continuing MDP with uniformly random successors and rewards in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(n_states: usize, n_actions: usize, rng: &mut R) -> Self {
        let cells = n_states * n_actions;
        DeterministicMdp {
            n_states,
            n_actions,
            next: (0..cells).map(|_| Some(rng.random_range(0..n_states))).collect(),
            reward: (0..cells).map(|_| rng.random_range(-1.0..1.0)).collect(),
        }
    }

    pub fn transition(&self, state: usize, action: usize) -> (f64, Option<usize>) {
        let i = state * self.n_actions + action;
        (self.reward[i], self.next[i])
    }

    /// Q-learning with uniformly sampled `(state, action)` pairs.
    pub fn q_learning<R: Rng + ?Sized>(
        &self,
        alpha: f64,
        gamma: f64,
        iterations: usize,
        rng: &mut R,
    ) -> TabularQ {
        let mut q = TabularQ::new(self.n_states, self.n_actions);
        for _ in 0..iterations {
            let s = rng.random_range(0..self.n_states);
            let a = rng.random_range(0..self.n_actions);
            let (r, next) = self.transition(s, a);
            q.q_learning_update(s, a, r, next, alpha, gamma);
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    #[test]
    fn printed_q_update_arithmetic() {
        let mut q = TabularQ::new(2, 2);
        q.set(1, 0, 2.0);
        q.set(1, 1, -1.0);
        q.q_learning_update(0, 0, 1.0, Some(1), 0.5, 0.9);
        assert!((q.get(0, 0) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn terminal_updates_do_not_bootstrap() {
        let mut q = TabularQ::new(2, 1);
        q.set(1, 0, 100.0);
        q.q_learning_update(0, 0, 1.0, None, 1.0, 0.9);
        assert_eq!(q.get(0, 0), 1.0);
        q.td_update(1, 0, 2.0, None, 1.0, 0.9);
        assert_eq!(q.get(1, 0), 2.0);
    }

    #[test]
    fn full_step_monte_carlo_stores_returns() {
        let mut q = TabularQ::new(3, 2);
        let episode = [(0, 1, 0.5), (2, 0, -1.0), (1, 1, 2.0)];
        q.monte_carlo_update(&episode, 1.0, 0.9);
        assert!((q.get(1, 1) - 2.0).abs() < 1e-15);
        assert!((q.get(2, 0) - (-1.0 + 0.9 * 2.0)).abs() < 1e-15);
        assert!((q.get(0, 1) - (0.5 + 0.9 * (-1.0 + 0.9 * 2.0))).abs() < 1e-15);
    }

    #[test]
    fn myopic_td_equals_monte_carlo_on_one_step_episodes() {
        let mut rng = SeedStream::from(1).rng();
        let mut td = TabularQ::new(3, 2);
        let mut mc = TabularQ::new(3, 2);
        for _ in 0..200 {
            let (s, a) = (rng.random_range(0..3), rng.random_range(0..2));
            let r = rng.random_range(-1.0..1.0);
            td.td_update(s, a, r, Some((rng.random_range(0..3), 0)), 0.3, 0.0);
            mc.monte_carlo_update(&[(s, a, r)], 0.3, 0.0);
        }
        assert_eq!(td, mc);
    }

    #[test]
    fn chain_values() {
        let mdp = DeterministicMdp::chain(&[0.0, 0.0, 1.0]);
        let q = mdp.q_learning(0.5, 0.9, 2_000, &mut SeedStream::from(2).rng());
        for (s, want) in [(0, 0.81), (1, 0.9), (2, 1.0)] {
            assert!((q.get(s, 0) - want).abs() < 1e-3, "state {s}: {}", q.get(s, 0));
        }
    }

    #[test]
    fn rejects_malformed_mdp() {
        assert!(DeterministicMdp::new(2, 1, vec![Some(0)], vec![0.0, 0.0]).is_err());
        assert!(DeterministicMdp::new(2, 1, vec![Some(0), Some(2)], vec![0.0, 0.0]).is_err());
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::replay::ReplayBuffer;
use crate::bandit::{argmax, default_reward_scale};
use crate::env::{run_episode, Context, EnvConfig, Policy, Transition};
use crate::neural::{Adam, Cache, Gradients, Mlp};
use crate::rng::{Domain, SeedStream, StreamRng};
use crate::{Error, Result};

/// Linear decay from `start` to `end` over `decay_steps` environment steps, flat afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: u64,
}

impl EpsilonSchedule {
    pub fn constant(epsilon: f64) -> Self {
        EpsilonSchedule {
            start: epsilon,
            end: epsilon,
            decay_steps: 0,
        }
    }

    pub fn value(&self, step: u64) -> f64 {
        if step >= self.decay_steps {
            return self.end;
        }
        let frac = step as f64 / self.decay_steps as f64;
        self.start + (self.end - self.start) * frac
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub capacity: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Gradient updates between copies of the online network into the target.
    pub target_sync: u64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of all training environment steps over which epsilon decays.
    pub epsilon_decay_fraction: f64,
    /// See [`crate::bandit::BanditConfig::reward_scale`].
    pub reward_scale: Option<f64>,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            hidden: vec![20; 4],
            capacity: 10_000,
            batch_size: 64,
            learning_rate: 1e-3,
            target_sync: 500,
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_fraction: 0.3,
            reward_scale: None,
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma must be in [0,1], got {}", self.gamma)));
        }
        for eps in [self.epsilon_start, self.epsilon_end, self.epsilon_decay_fraction] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::InvalidConfig(format!(
                    "epsilon settings must be in [0,1], got {eps}"
                )));
            }
        }
        if self.batch_size == 0 || self.target_sync == 0 || self.capacity == 0 {
            return Err(Error::InvalidConfig(
                "batch_size, target_sync and capacity must be >= 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if let Some(s) = self.reward_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidConfig(format!("reward_scale must be > 0, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAgentState {
    online: Mlp,
    target: Mlp,
    optimizer: Adam,
    replay: ReplayBuffer<Transition>,
    epsilon: EpsilonSchedule,
    gamma: f64,
    target_sync: u64,
    batch_size: usize,
    reward_scale: f64,
    updates: u64,
    env_steps: u64,
}

impl QAgentState {
    /// `total_env_steps` sets the epsilon decay horizon.
    pub fn new<R: Rng + ?Sized>(
        input_dim: usize,
        n_actions: usize,
        config: &DqnConfig,
        total_env_steps: u64,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        let mut sizes = vec![input_dim];
        sizes.extend(&config.hidden);
        sizes.push(n_actions);
        let online = Mlp::new(&sizes, rng)?;
        Ok(QAgentState {
            target: online.clone(),
            optimizer: Adam::new(&online, config.learning_rate),
            online,
            replay: ReplayBuffer::new(config.capacity)?,
            epsilon: EpsilonSchedule {
                start: config.epsilon_start,
                end: config.epsilon_end,
                decay_steps: (config.epsilon_decay_fraction * total_env_steps as f64).round() as u64,
            },
            gamma: config.gamma,
            target_sync: config.target_sync,
            batch_size: config.batch_size,
            reward_scale: config.reward_scale.unwrap_or(1.0),
            updates: 0,
            env_steps: 0,
        })
    }

    pub fn online(&self) -> &Mlp {
        &self.online
    }

    pub fn target(&self) -> &Mlp {
        &self.target
    }

    pub fn replay(&self) -> &ReplayBuffer<Transition> {
        &self.replay
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn set_epsilon(&mut self, schedule: EpsilonSchedule) {
        self.epsilon = schedule;
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.value(self.env_steps)
    }

    pub fn q_values(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.online.predict(features)
    }

    pub fn greedy_action(&self, features: &[f64]) -> Result<usize> {
        Ok(argmax(&self.q_values(features)?).expect("at least one action"))
    }

    /// Uniform random arm with probability epsilon, greedy otherwise.
    pub fn epsilon_greedy_select<R: Rng + ?Sized>(&self, features: &[f64], rng: &mut R) -> Result<usize> {
        let greedy = self.greedy_action(features)?;
        if rng.random::<f64>() < self.epsilon() {
            Ok(rng.random_range(0..self.online.output_dim()))
        } else {
            Ok(greedy)
        }
    }

    /// One gradient step on the mean squared TD error of `batch`, with
    /// bootstrap targets from the target network. Returns the batch loss.
    pub fn q_learning_step(&mut self, batch: &[&Transition]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Empty);
        }
        let n_actions = self.online.output_dim();
        let mut cache = Cache::default();
        let mut grads = Gradients::zeros_like(&self.online);
        let mut d_out = vec![0.0; n_actions];
        let inv = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for t in batch {
            if t.action >= n_actions {
                return Err(Error::Domain(format!("action {} out of range", t.action)));
            }
            let mut y = t.reward * self.reward_scale;
            if !t.terminal && self.gamma > 0.0 {
                let next = self.target.forward_into(t.after.as_slice(), &mut cache)?;
                y += self.gamma * next.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            }
            let q = self.online.forward_into(t.before.as_slice(), &mut cache)?;
            let err = q[t.action] - y;
            loss += err * err * inv;
            d_out.fill(0.0);
            d_out[t.action] = 2.0 * err * inv;
            self.online.accumulate_gradients(&cache, &d_out, &mut grads)?;
        }
        self.optimizer.step(&mut self.online, &grads);
        self.updates += 1;
        if self.updates % self.target_sync == 0 {
            self.target = self.online.clone();
        }
        Ok(loss)
    }

    /// Stores `transition` and performs one minibatch update.
    pub fn record<R: Rng + ?Sized>(&mut self, transition: Transition, rng: &mut R) -> Result<()> {
        self.env_steps += 1;
        self.replay.push(transition);
        let batch: Vec<Transition> = self
            .replay
            .sample(self.batch_size, rng)?
            .into_iter()
            .copied()
            .collect();
        let refs: Vec<&Transition> = batch.iter().collect();
        self.q_learning_step(&refs)?;
        Ok(())
    }
}

struct Learner<'a> {
    agent: &'a mut QAgentState,
    rng: &'a mut StreamRng,
    error: Option<Error>,
}

impl Policy for Learner<'_> {
    fn act(&mut self, context: &Context) -> usize {
        match self.agent.epsilon_greedy_select(context.as_slice(), self.rng) {
            Ok(a) => a,
            Err(e) => {
                self.error.get_or_insert(e);
                0
            }
        }
    }

    fn observe(&mut self, t: &Transition) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = self.agent.record(*t, self.rng) {
            self.error = Some(e);
        }
    }
}

/// Trains a fresh Q-agent for `episodes` hedging episodes, returning it with
/// the accumulated (unscaled) reward per episode.
pub fn train_dqn(
    env: &EnvConfig,
    config: &DqnConfig,
    episodes: usize,
    seed: u64,
) -> Result<(QAgentState, Vec<f64>)> {
    env.validate()?;
    let mut config = config.clone();
    config.reward_scale.get_or_insert_with(|| default_reward_scale(env));
    let mut rng = SeedStream::new(seed, Domain::Agent, 0).rng();
    let total = (episodes * env.grid.n_steps) as u64;
    let mut agent = QAgentState::new(Context::DIM, env.actions.k(), &config, total, &mut rng)?;
    let mut curve = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let mut learner = Learner {
            agent: &mut agent,
            rng: &mut rng,
            error: None,
        };
        let result = run_episode(
            env,
            &mut learner,
            SeedStream::new(seed, Domain::TrainPath, episode as u64),
        )?;
        if let Some(e) = learner.error {
            return Err(e);
        }
        curve.push(result.accumulated_reward());
    }
    Ok((agent, curve))
}

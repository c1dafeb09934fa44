//! Risk-averse contextual k-armed bandit hedger.
//!
//! A shared MLP (one regression head per arm) learns a representation of the
//! context. Its last hidden layer, with an intercept appended, feeds one
//! Normal-Inverse-Gamma linear regression per arm. Actions are picked by
//! Thompson sampling: draw weights from each arm's posterior and take the
//! arm with the largest predicted reward. The network is retrained on the
//! whole data store every `retrain_period` observations, after which the arm
//! posteriors are rebuilt from the prior on the new features.
//!
//! Risk aversion enters through the environment's reward, so the bandit
//! itself maximises expected (risk-adjusted) reward. [`ArmStats`] and
//! [`empirical_mean_variance`] provide the context-free mean-variance
//! statistics.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{run_episode, Context, EnvConfig, Policy, Transition};
use crate::neural::{linalg::dot, Adam, BlrPosterior, Cache, Gradients, Mlp, NigPrior};
use crate::rng::{Domain, SeedStream, StreamRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanVariance {
    pub mean: f64,
    /// Mean squared deviation from the sample mean.
    pub dispersion: f64,
    /// `mean - kappa * dispersion`.
    pub mv: f64,
}

/// `mu = sum(x) / t`, `sigma = sum((x - mu)^2) / t`, `MV = mu - kappa * sigma`.
pub fn empirical_mean_variance(samples: &[f64], kappa: f64) -> Result<MeanVariance> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let t = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / t;
    let dispersion = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t;
    Ok(MeanVariance {
        mean,
        dispersion,
        mv: mean - kappa * dispersion,
    })
}

/// Running per-arm statistics (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl ArmStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.m2 = self.m2.max(0.0);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn dispersion(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2 / self.count as f64
        }
    }

    pub fn mean_variance(&self, kappa: f64) -> Result<MeanVariance> {
        if self.count == 0 {
            return Err(Error::Empty);
        }
        let dispersion = self.dispersion();
        Ok(MeanVariance {
            mean: self.mean,
            dispersion,
            mv: self.mean - kappa * dispersion,
        })
    }
}

/// Arm with the largest empirical mean-variance; ties to the lower index.
pub fn best_arm_by_mean_variance(arms: &[ArmStats], kappa: f64) -> Result<usize> {
    let scores = arms
        .iter()
        .map(|a| a.mean_variance(kappa).map(|mv| mv.mv))
        .collect::<Result<Vec<_>>>()?;
    argmax(&scores).ok_or(Error::Empty)
}

/// First index of the maximum.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BanditConfig {
    pub hidden: Vec<usize>,
    pub retrain_period: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub prior: NigPrior,
    /// Multiplier applied to rewards before learning. `None` picks
    /// `1 / ((sigma S_0)^2 dt)` when training on a hedging environment.
    pub reward_scale: Option<f64>,
}

impl Default for BanditConfig {
    fn default() -> Self {
        BanditConfig {
            hidden: vec![20; 4],
            retrain_period: 50,
            epochs: 1,
            batch_size: 64,
            learning_rate: 1e-3,
            prior: NigPrior::default(),
            reward_scale: None,
        }
    }
}

impl BanditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.retrain_period == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "retrain_period and batch_size must be >= 1".into(),
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
        self.prior.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub context: Vec<f64>,
    pub arm: usize,
    /// Unscaled reward as produced by the environment.
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuralLinearState {
    config: BanditConfig,
    reward_scale: f64,
    mlp: Mlp,
    optimizer: Adam,
    posteriors: Vec<BlrPosterior>,
    store: Vec<Observation>,
}

impl NeuralLinearState {
    pub fn new<R: Rng + ?Sized>(
        input_dim: usize,
        n_arms: usize,
        config: BanditConfig,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        if n_arms < 2 {
            return Err(Error::InvalidConfig(format!("need >= 2 arms, got {n_arms}")));
        }
        let mut sizes = vec![input_dim];
        sizes.extend(&config.hidden);
        sizes.push(n_arms);
        let mlp = Mlp::new(&sizes, rng)?;
        let optimizer = Adam::new(&mlp, config.learning_rate);
        let dim = mlp.feature_dim() + 1;
        let posteriors = vec![BlrPosterior::from_prior(dim, &config.prior); n_arms];
        Ok(NeuralLinearState {
            reward_scale: config.reward_scale.unwrap_or(1.0),
            config,
            mlp,
            optimizer,
            posteriors,
            store: Vec::new(),
        })
    }

    pub fn n_arms(&self) -> usize {
        self.posteriors.len()
    }

    pub fn config(&self) -> &BanditConfig {
        &self.config
    }

    pub fn reward_scale(&self) -> f64 {
        self.reward_scale
    }

    pub fn mlp(&self) -> &Mlp {
        &self.mlp
    }

    pub fn posteriors(&self) -> &[BlrPosterior] {
        &self.posteriors
    }

    pub fn store(&self) -> &[Observation] {
        &self.store
    }

    /// Last-hidden-layer representation of `context` with a trailing intercept.
    pub fn features(&self, context: &[f64]) -> Result<Vec<f64>> {
        let mut cache = Cache::default();
        self.mlp.forward_into(context, &mut cache)?;
        let mut z = cache.last_hidden().to_vec();
        z.push(1.0);
        Ok(z)
    }

    /// Thompson-sampling choice.
    pub fn select_action<R: Rng + ?Sized>(&self, context: &[f64], rng: &mut R) -> Result<usize> {
        let z = self.features(context)?;
        thompson_argmax(&self.posteriors, &z, rng)
    }

    /// Arm with the best posterior-mean prediction; used for evaluation.
    pub fn greedy_action(&self, context: &[f64]) -> Result<usize> {
        let z = self.features(context)?;
        let scores: Vec<f64> = self.posteriors.iter().map(|p| p.predict_mean(&z)).collect();
        Ok(argmax(&scores).expect("at least two arms"))
    }

    pub fn observe<R: Rng + ?Sized>(
        &mut self,
        context: &[f64],
        arm: usize,
        reward: f64,
        rng: &mut R,
    ) -> Result<()> {
        if arm >= self.n_arms() {
            return Err(Error::Domain(format!("arm {arm} out of range")));
        }
        if context.len() != self.mlp.input_dim() {
            return Err(Error::Shape {
                expected: self.mlp.input_dim(),
                actual: context.len(),
            });
        }
        self.store.push(Observation {
            context: context.to_vec(),
            arm,
            reward,
        });
        let z = self.features(context)?;
        self.posteriors[arm].update(&z, reward * self.reward_scale)?;
        if self.store.len() % self.config.retrain_period == 0 {
            self.retrain(rng)?;
            self.rebuild_posteriors()?;
        }
        Ok(())
    }

    /// Fits the network to the data store: per-arm squared error on the
    /// observed arm only.
    pub fn retrain<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let n = self.store.len();
        if n == 0 {
            return Ok(());
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut cache = Cache::default();
        let mut grads = Gradients::zeros_like(&self.mlp);
        let mut d_out = vec![0.0; self.n_arms()];
        for _ in 0..self.config.epochs {
            order.shuffle(rng);
            for batch in order.chunks(self.config.batch_size) {
                grads.clear();
                let inv = 1.0 / batch.len() as f64;
                for &i in batch {
                    let obs = &self.store[i];
                    let out = self.mlp.forward_into(&obs.context, &mut cache)?;
                    let err = out[obs.arm] - obs.reward * self.reward_scale;
                    d_out.fill(0.0);
                    d_out[obs.arm] = 2.0 * err * inv;
                    self.mlp.accumulate_gradients(&cache, &d_out, &mut grads)?;
                }
                self.optimizer.step(&mut self.mlp, &grads);
            }
        }
        Ok(())
    }

    /// Recomputes every arm's posterior from the prior using the current features.
    pub fn rebuild_posteriors(&mut self) -> Result<()> {
        let dim = self.mlp.feature_dim() + 1;
        let mut features: Vec<Vec<(Vec<f64>, f64)>> = vec![Vec::new(); self.n_arms()];
        for obs in &self.store {
            features[obs.arm].push((self.features(&obs.context)?, obs.reward * self.reward_scale));
        }
        for (posterior, obs) in self.posteriors.iter_mut().zip(&features) {
            let mut rebuilt = BlrPosterior::from_prior(dim, &self.config.prior);
            rebuilt.absorb(obs.iter().map(|(z, y)| (z.as_slice(), *y)))?;
            *posterior = rebuilt;
        }
        Ok(())
    }
}

/// Samples weights from each posterior and returns the arm with the largest
/// `z^T w`; ties go to the lower index.
pub fn thompson_argmax<R: Rng + ?Sized>(
    posteriors: &[BlrPosterior],
    z: &[f64],
    rng: &mut R,
) -> Result<usize> {
    let mut scores = Vec::with_capacity(posteriors.len());
    for p in posteriors {
        if z.len() != p.dim() {
            return Err(Error::Shape {
                expected: p.dim(),
                actual: z.len(),
            });
        }
        scores.push(dot(&p.sample(rng)?, z));
    }
    argmax(&scores).ok_or(Error::Empty)
}

/// Reward multiplier used when none is configured.
pub fn default_reward_scale(env: &EnvConfig) -> f64 {
    1.0 / env.squared_move_scale()
}

struct Learner<'a> {
    state: &'a mut NeuralLinearState,
    rng: &'a mut StreamRng,
    error: Option<Error>,
}

impl Policy for Learner<'_> {
    fn act(&mut self, context: &Context) -> usize {
        match self.state.select_action(context.as_slice(), self.rng) {
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
        if let Err(e) = self.state.observe(t.before.as_slice(), t.action, t.reward, self.rng) {
            self.error = Some(e);
        }
    }
}

/// Trains a fresh agent for `episodes` hedging episodes and returns it with
/// the accumulated (unscaled) reward of every episode.
pub fn train_agent(
    env: &EnvConfig,
    config: &BanditConfig,
    episodes: usize,
    seed: u64,
) -> Result<(NeuralLinearState, Vec<f64>)> {
    env.validate()?;
    let mut config = config.clone();
    config.reward_scale.get_or_insert_with(|| default_reward_scale(env));
    let mut rng = SeedStream::new(seed, Domain::Agent, 0).rng();
    let mut state = NeuralLinearState::new(Context::DIM, env.actions.k(), config, &mut rng)?;
    let mut curve = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let mut learner = Learner {
            state: &mut state,
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
    Ok((state, curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_variance_examples() {
        let mv = empirical_mean_variance(&[1.0, 3.0], 1.0).unwrap();
        assert_eq!((mv.mean, mv.dispersion, mv.mv), (2.0, 1.0, 1.0));
        let flat = empirical_mean_variance(&[0.4; 5], 3.0).unwrap();
        assert_eq!(flat.dispersion, 0.0);
        assert_eq!(flat.mv, flat.mean);
        let neutral = empirical_mean_variance(&[1.0, -2.0, 7.0], 0.0).unwrap();
        assert_eq!(neutral.mv, neutral.mean);
        assert!(matches!(empirical_mean_variance(&[], 1.0), Err(Error::Empty)));
    }

    #[test]
    fn running_stats_match_batch_formula() {
        let xs = [0.3, -1.2, 4.4, 0.0, 2.5, 2.5];
        let mut s = ArmStats::default();
        xs.iter().for_each(|&x| s.push(x));
        let batch = empirical_mean_variance(&xs, 0.7).unwrap();
        let run = s.mean_variance(0.7).unwrap();
        assert!((batch.mean - run.mean).abs() < 1e-12);
        assert!((batch.dispersion - run.dispersion).abs() < 1e-12);
        assert!((batch.mv - run.mv).abs() < 1e-12);
        assert!(ArmStats::default().mean_variance(1.0).is_err());
    }

    #[test]
    fn mean_variance_arm_choice_trades_mean_for_risk() {
        let mut safe = ArmStats::default();
        let mut risky = ArmStats::default();
        for i in 0..100 {
            safe.push(1.0);
            risky.push(if i % 2 == 0 { -1.0 } else { 3.2 });
        }
        assert_eq!(best_arm_by_mean_variance(&[safe, risky], 0.0).unwrap(), 1);
        assert_eq!(best_arm_by_mean_variance(&[safe, risky], 1.0).unwrap(), 0);
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn zero_episodes_leave_prior() {
        let env = EnvConfig::default();
        let (state, curve) = train_agent(&env, &BanditConfig::default(), 0, 3).unwrap();
        assert!(curve.is_empty());
        assert!(state.store().is_empty());
        let prior = BlrPosterior::from_prior(21, &NigPrior::default());
        assert!(state.posteriors().iter().all(|p| *p == prior));
    }

    #[test]
    fn observation_touches_only_its_arm() {
        let mut rng = SeedStream::from(1).rng();
        let mut state = NeuralLinearState::new(3, 5, BanditConfig::default(), &mut rng).unwrap();
        let before = state.posteriors().to_vec();
        state.observe(&[1.0, 5.0, 0.0], 2, -0.3, &mut rng).unwrap();
        for (i, (a, b)) in before.iter().zip(state.posteriors()).enumerate() {
            assert_eq!(a == b, i != 2, "arm {i}");
        }
        assert_eq!(state.store().len(), 1);
        assert!(state.observe(&[1.0, 5.0, 0.0], 5, 0.0, &mut rng).is_err());
        assert!(state.observe(&[1.0], 0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn rebuild_reproduces_incremental_posteriors() {
        let config = BanditConfig { retrain_period: 1_000, ..BanditConfig::default() };
        let mut rng = SeedStream::from(2).rng();
        let mut state = NeuralLinearState::new(3, 4, config, &mut rng).unwrap();
        for i in 0..200 {
            let x = i as f64 / 200.0;
            state.observe(&[x, 1.0 - x, 0.5], i % 4, -x * x, &mut rng).unwrap();
        }
        let incremental = state.posteriors().to_vec();
        state.rebuild_posteriors().unwrap();
        for (a, b) in incremental.iter().zip(state.posteriors()) {
            for (x, y) in a.mean().iter().zip(b.mean()) {
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
            }
            for (x, y) in a.precision().iter().zip(b.precision()) {
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
            assert_eq!(a.shape(), b.shape());
            assert!((a.scale() - b.scale()).abs() <= 1e-9 * a.scale());
        }
    }

    #[test]
    fn selection_is_deterministic_per_seed() {
        let mut rng = SeedStream::from(3).rng();
        let state = NeuralLinearState::new(3, 21, BanditConfig::default(), &mut rng).unwrap();
        let ctx = [1.0, 5.0, 0.0];
        let a = state.select_action(&ctx, &mut SeedStream::from(4).rng()).unwrap();
        let b = state.select_action(&ctx, &mut SeedStream::from(4).rng()).unwrap();
        assert_eq!(a, b);
        assert!(a < 21);
    }
}

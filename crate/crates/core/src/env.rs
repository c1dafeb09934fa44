//! Hedging episodes in the P&L formulation.
//!
//! The agent is short one call whose value `C_t = -BS(S_t, tau_t)` is known at
//! every step. At each grid point it picks a hedge ratio from an [`ActionGrid`],
//! trades into it through a self-financing bank account, and is rewarded from
//! the one-step P&L `A * dS + dC - cost`. The last step settles the option at
//! its payoff so expiry is exact.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::market::{
    bsm_call_delta, bsm_call_price, draw_shock, terminal_payoff, GbmParams, OptionContract,
    TimeGrid,
};
use crate::rng::SeedStream;
use crate::{Error, Result};

/// `k` hedge ratios spaced uniformly on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ActionGridSpec", into = "ActionGridSpec")]
pub struct ActionGrid {
    levels: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ActionGridSpec {
    k: usize,
}

impl TryFrom<ActionGridSpec> for ActionGrid {
    type Error = Error;
    fn try_from(spec: ActionGridSpec) -> Result<Self> {
        ActionGrid::uniform(spec.k)
    }
}

impl From<ActionGrid> for ActionGridSpec {
    fn from(grid: ActionGrid) -> Self {
        ActionGridSpec { k: grid.k() }
    }
}

impl ActionGrid {
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConfig(format!("action grid needs k >= 2, got {k}")));
        }
        let last = (k - 1) as f64;
        let levels = (0..k).map(|i| i as f64 / last).collect();
        Ok(ActionGrid { levels })
    }

    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> f64 {
        self.levels[index]
    }

    /// Spacing between neighbouring levels.
    pub fn width(&self) -> f64 {
        1.0 / (self.k() - 1) as f64
    }

    /// Index of the level closest to `x`; ties go to the lower level.
    pub fn nearest(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, &level) in self.levels.iter().enumerate() {
            let dist = (level - x).abs();
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
        }
        best
    }
}

impl Default for ActionGrid {
    fn default() -> Self {
        ActionGrid::uniform(21).expect("21 >= 2")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    /// `-(A dS + dC)^2 - cost`: per-sample surrogate for the negative conditional variance.
    NegSquaredError,
    /// `dw - lambda dw^2`.
    MeanVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub contract: OptionContract,
    pub gbm: GbmParams,
    pub grid: TimeGrid,
    pub actions: ActionGrid,
    /// Proportional cost as a fraction of traded notional.
    pub cost_rate: f64,
    pub risk_aversion: f64,
    pub reward_kind: RewardKind,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            contract: OptionContract::default(),
            gbm: GbmParams::default(),
            grid: TimeGrid::default(),
            actions: ActionGrid::default(),
            cost_rate: 0.0,
            risk_aversion: 0.0,
            reward_kind: RewardKind::NegSquaredError,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.contract.validate()?;
        self.gbm.validate()?;
        self.grid.validate()?;
        let (t, grid_t) = (self.contract.maturity, self.grid.maturity());
        if (grid_t - t).abs() > 1e-12 * t {
            return Err(Error::InvalidConfig(format!(
                "time grid spans {grid_t}, contract matures at {t}"
            )));
        }
        if !(self.cost_rate.is_finite() && self.cost_rate >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cost_rate must be >= 0, got {}",
                self.cost_rate
            )));
        }
        if !(self.risk_aversion.is_finite() && self.risk_aversion >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "risk_aversion must be >= 0, got {}",
                self.risk_aversion
            )));
        }
        Ok(())
    }

    /// Value of the short option at grid index `i` for spot `spot`.
    pub fn option_value(&self, spot: f64, i: usize) -> Result<f64> {
        if i >= self.grid.n_steps {
            Ok(terminal_payoff(spot, self.contract.strike))
        } else {
            let tau = self.grid.time_to_maturity(i);
            Ok(-bsm_call_price(spot, self.contract.strike, self.gbm.sigma, tau)?)
        }
    }

    /// Black-Scholes delta of the (long) call at grid index `i < n_steps`.
    pub fn delta(&self, spot: f64, i: usize) -> Result<f64> {
        bsm_call_delta(
            spot,
            self.contract.strike,
            self.gbm.sigma,
            self.grid.time_to_maturity(i),
        )
    }

    /// Typical size of a one-step squared price move, `(sigma S_0)^2 dt`.
    /// Falls back to `S_0^2 dt` for a deterministic underlying.
    pub fn squared_move_scale(&self) -> f64 {
        let vol = if self.gbm.sigma > 0.0 { self.gbm.sigma } else { 1.0 };
        (vol * self.gbm.s0).powi(2) * self.grid.dt
    }

    pub fn oracle_policy(&self) -> DeltaProjection<'_> {
        DeltaProjection { config: self }
    }
}

/// Agent-visible features: moneyness `S/K`, time to maturity, current holding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Context {
    pub features: [f64; 3],
}

impl Context {
    pub const DIM: usize = 3;

    pub fn moneyness(&self) -> f64 {
        self.features[0]
    }

    pub fn tau(&self) -> f64 {
        self.features[1]
    }

    pub fn holding(&self) -> f64 {
        self.features[2]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.features
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub step_index: usize,
    pub spot: f64,
    /// Value of the short option, `-BS` before expiry and `-(S-K)^+` at expiry.
    pub option_value: f64,
    /// Hedge ratio carried into this step.
    pub holding: f64,
    pub bank: f64,
    /// Accumulated P&L since inception.
    pub wealth: f64,
}

impl EnvState {
    pub fn is_terminal(&self, config: &EnvConfig) -> bool {
        self.step_index >= config.grid.n_steps
    }

    pub fn context(&self, config: &EnvConfig) -> Context {
        Context {
            features: [
                self.spot / config.contract.strike,
                config.grid.time_to_maturity(self.step_index),
                self.holding,
            ],
        }
    }
}

/// One-step P&L split into the hedged position's move and the trading cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Increment {
    /// `A dS + dC`.
    pub hedge: f64,
    pub cost: f64,
}

impl Increment {
    pub fn total(&self) -> f64 {
        self.hedge - self.cost
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub before: Context,
    pub action: usize,
    pub reward: f64,
    pub after: Context,
    pub terminal: bool,
    pub pnl: Increment,
}

pub fn reset(config: &EnvConfig) -> Result<(EnvState, Context)> {
    config.validate()?;
    let state = EnvState {
        step_index: 0,
        spot: config.gbm.s0,
        option_value: config.option_value(config.gbm.s0, 0)?,
        holding: 0.0,
        bank: 0.0,
        wealth: 0.0,
    };
    Ok((state, state.context(config)))
}

pub fn reward_from_increment(increment: &Increment, config: &EnvConfig) -> f64 {
    match config.reward_kind {
        RewardKind::NegSquaredError => -increment.hedge * increment.hedge - increment.cost,
        RewardKind::MeanVariance => {
            let dw = increment.total();
            dw - config.risk_aversion * dw * dw
        }
    }
}

/// Advances one grid step with hedge ratio `actions[action]`, drawing the
/// price shock from `rng`.
pub fn step<R: Rng + ?Sized>(
    config: &EnvConfig,
    state: &EnvState,
    action: usize,
    rng: &mut R,
) -> Result<(Transition, EnvState, Context)> {
    let n_steps = config.grid.n_steps;
    if state.is_terminal(config) {
        return Err(Error::TerminalStep {
            step: state.step_index,
            n_steps,
        });
    }
    if action >= config.actions.k() {
        return Err(Error::Domain(format!(
            "action {action} outside grid of {} arms",
            config.actions.k()
        )));
    }
    let before = state.context(config);
    let level = config.actions.level(action);
    let cost = config.cost_rate * (level - state.holding).abs() * state.spot;

    let next_index = state.step_index + 1;
    let next_spot = config.gbm.step(state.spot, config.grid.dt, draw_shock(rng));
    let next_value = config.option_value(next_spot, next_index)?;

    let increment = Increment {
        hedge: level * (next_spot - state.spot) + (next_value - state.option_value),
        cost,
    };
    let reward = reward_from_increment(&increment, config);
    let next = EnvState {
        step_index: next_index,
        spot: next_spot,
        option_value: next_value,
        holding: level,
        bank: state.bank - (level - state.holding) * state.spot - cost,
        wealth: state.wealth + increment.total(),
    };
    let after = next.context(config);
    let transition = Transition {
        before,
        action,
        reward,
        after,
        terminal: next.is_terminal(config),
        pnl: increment,
    };
    Ok((transition, next, after))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OracleMode {
    /// Grid level nearest to the Black-Scholes delta.
    DeltaProjection,
    /// Arm minimising a Monte-Carlo estimate of `E[(A dS + dC)^2 | S_t]`.
    McVarianceMin { inner_samples: usize },
}

pub fn oracle_action<R: Rng + ?Sized>(
    state: &EnvState,
    config: &EnvConfig,
    mode: OracleMode,
    rng: &mut R,
) -> Result<usize> {
    if state.is_terminal(config) {
        return Err(Error::TerminalStep {
            step: state.step_index,
            n_steps: config.grid.n_steps,
        });
    }
    match mode {
        OracleMode::DeltaProjection => {
            let delta = config.delta(state.spot, state.step_index)?;
            Ok(config.actions.nearest(delta))
        }
        OracleMode::McVarianceMin { inner_samples } => {
            if inner_samples == 0 {
                return Err(Error::Empty);
            }
            // E[(A dS + dC)^2] = A^2 E[dS^2] + 2A E[dS dC] + E[dC^2]; the same
            // draws score every arm.
            let (mut ss, mut sc, mut cc) = (0.0, 0.0, 0.0);
            for _ in 0..inner_samples {
                let next = config.gbm.step(state.spot, config.grid.dt, draw_shock(rng));
                let d_s = next - state.spot;
                let d_c = config.option_value(next, state.step_index + 1)? - state.option_value;
                ss += d_s * d_s;
                sc += d_s * d_c;
                cc += d_c * d_c;
            }
            let n = inner_samples as f64;
            let (ss, sc, cc) = (ss / n, sc / n, cc / n);
            let mut best = 0;
            let mut best_score = f64::INFINITY;
            for (i, &a) in config.actions.levels().iter().enumerate() {
                let score = a * a * ss + 2.0 * a * sc + cc;
                if score < best_score {
                    best = i;
                    best_score = score;
                }
            }
            Ok(best)
        }
    }
}

/// Something that picks an arm from a context, optionally learning from the
/// transitions it causes.
pub trait Policy {
    fn act(&mut self, context: &Context) -> usize;

    fn observe(&mut self, _transition: &Transition) {}
}

impl<F: FnMut(&Context) -> usize> Policy for F {
    fn act(&mut self, context: &Context) -> usize {
        self(context)
    }
}

/// Delta-projection oracle as a [`Policy`].
#[derive(Debug, Clone, Copy)]
pub struct DeltaProjection<'a> {
    config: &'a EnvConfig,
}

impl Policy for DeltaProjection<'_> {
    fn act(&mut self, context: &Context) -> usize {
        let c = self.config;
        let spot = context.moneyness() * c.contract.strike;
        let delta = bsm_call_delta(spot, c.contract.strike, c.gbm.sigma, context.tau())
            .expect("non-terminal context has tau > 0");
        c.actions.nearest(delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    /// `n_steps + 1` spots.
    pub spots: Vec<f64>,
    /// Black-Scholes delta at each decision.
    pub deltas: Vec<f64>,
    pub actions: Vec<usize>,
    pub levels: Vec<f64>,
    pub rewards: Vec<f64>,
    /// Per-step P&L `dw` including costs.
    pub pnl: Vec<f64>,
    pub terminal_pnl: f64,
}

impl EpisodeResult {
    pub fn accumulated_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// Runs one full episode. The market consumes only the stream given by
/// `seed`, so every policy sees the same path for the same seed.
pub fn run_episode<P: Policy + ?Sized>(
    config: &EnvConfig,
    policy: &mut P,
    seed: impl Into<SeedStream>,
) -> Result<EpisodeResult> {
    let (mut state, mut context) = reset(config)?;
    let mut rng = seed.into().rng();
    let n = config.grid.n_steps;
    let mut result = EpisodeResult {
        spots: Vec::with_capacity(n + 1),
        deltas: Vec::with_capacity(n),
        actions: Vec::with_capacity(n),
        levels: Vec::with_capacity(n),
        rewards: Vec::with_capacity(n),
        pnl: Vec::with_capacity(n),
        terminal_pnl: 0.0,
    };
    result.spots.push(state.spot);
    while !state.is_terminal(config) {
        result.deltas.push(config.delta(state.spot, state.step_index)?);
        let action = policy.act(&context);
        let (transition, next, next_context) = step(config, &state, action, &mut rng)?;
        policy.observe(&transition);
        result.actions.push(action);
        result.levels.push(config.actions.level(action));
        result.rewards.push(transition.reward);
        result.pnl.push(transition.pnl.total());
        result.spots.push(next.spot);
        state = next;
        context = next_context;
    }
    result.terminal_pnl = state.wealth;
    Ok(result)
}

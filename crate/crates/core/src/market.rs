//! Geometric Brownian motion and zero-rate Black-Scholes pricing of a European call.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::{Domain, SeedStream};
use crate::{Error, Result};

/// Drift, volatility and initial spot of the underlying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbmParams {
    pub mu: f64,
    pub sigma: f64,
    pub s0: f64,
}

impl GbmParams {
    /// `sigma == 0` is accepted and gives a deterministic path.
    pub fn new(mu: f64, sigma: f64, s0: f64) -> Result<Self> {
        let params = GbmParams { mu, sigma, s0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::InvalidConfig(format!("mu must be finite, got {}", self.mu)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if !(self.s0.is_finite() && self.s0 > 0.0) {
            return Err(Error::InvalidConfig(format!("s0 must be > 0, got {}", self.s0)));
        }
        Ok(())
    }

    /// One exact lognormal step of length `dt` driven by the standard normal `z`.
    #[inline]
    pub fn step(&self, spot: f64, dt: f64, z: f64) -> f64 {
        spot * ((self.mu - 0.5 * self.sigma * self.sigma) * dt + self.sigma * dt.sqrt() * z).exp()
    }
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            mu: 0.01,
            sigma: 0.15,
            s0: 1.0,
        }
    }
}

/// A short European call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptionContract {
    pub strike: f64,
    pub maturity: f64,
}

impl OptionContract {
    pub fn new(strike: f64, maturity: f64) -> Result<Self> {
        let contract = OptionContract { strike, maturity };
        contract.validate()?;
        Ok(contract)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike.is_finite() && self.strike > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "strike must be > 0, got {}",
                self.strike
            )));
        }
        if !(self.maturity.is_finite() && self.maturity > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "maturity must be > 0, got {}",
                self.maturity
            )));
        }
        Ok(())
    }
}

impl Default for OptionContract {
    fn default() -> Self {
        OptionContract {
            strike: 1.0,
            maturity: 5.0,
        }
    }
}

/// Uniform hedging grid `0, dt, ..., n_steps * dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeGrid {
    pub n_steps: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(n_steps: usize, maturity: f64) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be >= 1".into()));
        }
        let grid = TimeGrid {
            n_steps,
            dt: maturity / n_steps as f64,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be >= 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn maturity(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    /// Time to maturity at grid index `i`, exactly zero at the last index.
    pub fn time_to_maturity(&self, i: usize) -> f64 {
        self.n_steps.saturating_sub(i) as f64 * self.dt
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { n_steps: 50, dt: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketPath {
    pub spots: Vec<f64>,
    pub grid: TimeGrid,
}

impl MarketPath {
    pub fn terminal_spot(&self) -> f64 {
        *self.spots.last().expect("path has n_steps + 1 points")
    }
}

/// Draws the normal shock for one GBM step. Shared by path simulation and the
/// hedging environment so both consume a stream in the same order.
#[inline]
pub fn draw_shock<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn simulate_gbm_path(
    params: &GbmParams,
    grid: &TimeGrid,
    seed: impl Into<SeedStream>,
) -> MarketPath {
    let mut rng = seed.into().rng();
    let mut spots = Vec::with_capacity(grid.n_steps + 1);
    let mut spot = params.s0;
    spots.push(spot);
    for _ in 0..grid.n_steps {
        spot = params.step(spot, grid.dt, draw_shock(&mut rng));
        spots.push(spot);
    }
    MarketPath { spots, grid: *grid }
}

/// `n_paths` paths, path `i` on its own stream of `seed`.
pub fn simulate_paths(
    params: &GbmParams,
    grid: &TimeGrid,
    seed: u64,
    n_paths: usize,
) -> Vec<MarketPath> {
    (0..n_paths)
        .map(|i| simulate_gbm_path(params, grid, SeedStream::new(seed, Domain::Simulate, i as u64)))
        .collect()
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF.
///
/// Hart's double-precision rational approximation (as arranged by West);
/// absolute error is at the level of f64 rounding over the whole real line.
pub fn norm_cdf(x: f64) -> f64 {
    let a = x.abs();
    let tail = if a > 37.0 {
        0.0
    } else {
        let e = (-0.5 * a * a).exp();
        if a < 7.071_067_811_865_47 {
            let mut num = 3.526_249_659_989_11e-2 * a + 0.700_383_064_443_688;
            num = num * a + 6.373_962_203_531_65;
            num = num * a + 33.912_866_078_383;
            num = num * a + 112.079_291_497_871;
            num = num * a + 221.213_596_169_931;
            num = num * a + 220.206_867_912_376;
            let mut den = 8.838_834_764_831_84e-2 * a + 1.755_667_163_182_64;
            den = den * a + 16.064_177_579_207;
            den = den * a + 86.780_732_202_946_1;
            den = den * a + 296.564_248_779_674;
            den = den * a + 637.333_633_378_831;
            den = den * a + 793.826_512_519_948;
            den = den * a + 440.413_735_824_752;
            e * num / den
        } else {
            let mut c = a + 0.65;
            c = a + 4.0 / c;
            c = a + 3.0 / c;
            c = a + 2.0 / c;
            c = a + 1.0 / c;
            e / c / 2.506_628_274_631
        }
    };
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

fn check_spot_strike(spot: f64, strike: f64) -> Result<()> {
    if !(spot.is_finite() && spot > 0.0) {
        return Err(Error::Domain(format!("spot must be > 0, got {spot}")));
    }
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::Domain(format!("strike must be > 0, got {strike}")));
    }
    Ok(())
}

/// Zero-rate Black-Scholes value of a long call.
///
/// When `sigma * sqrt(tau)` is zero (expiry, or a deterministic underlying) the
/// value is the intrinsic `(spot - strike)^+`.
pub fn bsm_call_price(spot: f64, strike: f64, sigma: f64, tau: f64) -> Result<f64> {
    check_spot_strike(spot, strike)?;
    if !(sigma >= 0.0 && tau >= 0.0) {
        return Err(Error::Domain(format!(
            "sigma and tau must be >= 0, got sigma={sigma} tau={tau}"
        )));
    }
    let vol = sigma * tau.sqrt();
    if vol == 0.0 {
        return Ok((spot - strike).max(0.0));
    }
    let d1 = ((spot / strike).ln() + 0.5 * vol * vol) / vol;
    let d2 = d1 - vol;
    let price = spot * norm_cdf(d1) - strike * norm_cdf(d2);
    // Rounding can leave the value a hair outside its no-arbitrage bounds.
    Ok(price.clamp((spot - strike).max(0.0), spot))
}

/// `N(d1)`. Requires `tau > 0`; at expiry callers use the payoff slope.
/// With `sigma == 0` the delta is the step `1{spot > strike}` (one half at the money).
pub fn bsm_call_delta(spot: f64, strike: f64, sigma: f64, tau: f64) -> Result<f64> {
    check_spot_strike(spot, strike)?;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("delta needs tau > 0, got {tau}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(if spot > strike {
            1.0
        } else if spot < strike {
            0.0
        } else {
            0.5
        });
    }
    let vol = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + 0.5 * vol * vol) / vol;
    Ok(norm_cdf(d1))
}

/// Value of the short call at expiry: `-(S_T - K)^+`.
#[inline]
pub fn terminal_payoff(spot: f64, strike: f64) -> f64 {
    -(spot - strike).max(0.0)
}

/// Sample mean and standard error of `(S_T - K)^+` under zero drift, sampling
/// `S_T` in one exact lognormal step. Test oracle for [`bsm_call_price`].
pub fn mc_price_oracle(
    contract: &OptionContract,
    params: &GbmParams,
    n_paths: usize,
    seed: impl Into<SeedStream>,
) -> Result<(f64, f64)> {
    if n_paths < 10_000 {
        return Err(Error::InvalidConfig(format!(
            "n_paths must be >= 10^4, got {n_paths}"
        )));
    }
    if params.mu != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "pricing oracle runs under zero drift, got mu={}",
            params.mu
        )));
    }
    params.validate()?;
    let driftless = GbmParams { mu: 0.0, ..*params };
    let mut rng = seed.into().rng();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_paths {
        let s_t = driftless.step(params.s0, contract.maturity, draw_shock(&mut rng));
        let payoff = (s_t - contract.strike).max(0.0);
        sum += payoff;
        sum_sq += payoff * payoff;
    }
    let n = n_paths as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

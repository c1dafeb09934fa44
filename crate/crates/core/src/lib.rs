//! Discrete-time hedging of a short European call with reinforcement learning.
//!
//! The crate simulates a Black-Scholes economy (geometric Brownian motion
//! underlying, flat zero rates), runs hedging episodes in the P&L
//! formulation and trains two kinds of hedgers on them:
//!
//! - [`bandit`]: a risk-averse contextual k-armed bandit with a neural-linear
//!   model and Thompson sampling,
//! - [`dqn`]: a deep Q-network with experience replay and a periodically
//!   synchronised target network.
//!
//! Both are benchmarked against an oracle that projects the Black-Scholes delta
//! onto the action grid. [`harness`] wires training, evaluation and the CSV/JSON
//! artifacts together.
//!
//! ```
//! use rl_hedge::env::{run_episode, EnvConfig};
//!
//! let config = EnvConfig::default();
//! let result = run_episode(&config, &mut config.oracle_policy(), 7).unwrap();
//! assert_eq!(result.actions.len(), config.grid.n_steps);
//! println!("terminal P&L {:.6}", result.terminal_pnl);
//! ```

pub mod bandit;
pub mod dqn;
pub mod env;
mod error;
pub mod harness;
pub mod market;
pub mod neural;
pub mod rng;

pub use error::{Error, Result};

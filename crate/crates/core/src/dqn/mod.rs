//! Deep Q-network hedger with experience replay and a periodically
//! synchronised target network, plus tabular reference updates.

mod agent;
mod replay;
pub mod tabular;

pub use agent::{train_dqn, DqnConfig, EpsilonSchedule, QAgentState};
pub use replay::ReplayBuffer;

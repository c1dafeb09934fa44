//! Dense networks trained by hand-written backprop, and conjugate Bayesian
//! linear regression for the bandit's output heads.

mod adam;
mod blr;
pub(crate) mod linalg;
mod mlp;

pub use adam::Adam;
pub use blr::{BlrPosterior, NigPrior};
pub use mlp::{Cache, Gradients, Layer, Mlp};

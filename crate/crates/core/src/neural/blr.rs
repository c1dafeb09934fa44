//! Conjugate Normal-Inverse-Gamma Bayesian linear regression.
//!
//! Model: `y = w^T z + e`, `e ~ N(0, s2)`, with `s2 ~ InvGamma(a, b)` and
//! `w | s2 ~ N(m, s2 Lambda^-1)`. The posterior keeps the precision `Lambda`
//! rather than a covariance; every solve goes through a Cholesky factor.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::linalg::{cholesky, cholesky_solve, dot, mat_vec, solve_lower_transpose};
use crate::{Error, Result};

/// Isotropic prior: `Lambda_0 = precision * I`, `m_0 = 0`, `a_0 = shape`, `b_0 = scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NigPrior {
    pub precision: f64,
    pub shape: f64,
    pub scale: f64,
}

impl Default for NigPrior {
    fn default() -> Self {
        NigPrior {
            precision: 0.25,
            shape: 3.0,
            scale: 3.0,
        }
    }
}

impl NigPrior {
    pub fn validate(&self) -> Result<()> {
        if !(self.precision > 0.0 && self.shape > 1.0 && self.scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "NIG prior needs precision > 0, shape > 1, scale > 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlrPosterior {
    dim: usize,
    /// Row-major `dim x dim`.
    precision: Vec<f64>,
    mean: Vec<f64>,
    shape: f64,
    scale: f64,
}

impl BlrPosterior {
    pub fn from_prior(dim: usize, prior: &NigPrior) -> Self {
        let mut precision = vec![0.0; dim * dim];
        for i in 0..dim {
            precision[i * dim + i] = prior.precision;
        }
        BlrPosterior {
            dim,
            precision,
            mean: vec![0.0; dim],
            shape: prior.shape,
            scale: prior.scale,
        }
    }

    /// Posterior from explicit parameters; `precision` is row-major and must be
    /// symmetric positive definite.
    pub fn from_parts(precision: Vec<f64>, mean: Vec<f64>, shape: f64, scale: f64) -> Result<Self> {
        let dim = mean.len();
        if precision.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                actual: precision.len(),
            });
        }
        cholesky(&precision, dim)?;
        if !(shape > 0.0 && scale > 0.0) {
            return Err(Error::Domain(format!(
                "inverse-gamma needs shape > 0 and scale > 0, got {shape}, {scale}"
            )));
        }
        Ok(BlrPosterior {
            dim,
            precision,
            mean,
            shape,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision(&self) -> &[f64] {
        &self.precision
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Posterior mean of `w^T z`.
    pub fn predict_mean(&self, z: &[f64]) -> f64 {
        dot(&self.mean, z)
    }

    fn check_dim(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                actual: z.len(),
            });
        }
        Ok(())
    }

    /// Single-observation update.
    pub fn update(&mut self, z: &[f64], y: f64) -> Result<()> {
        self.check_dim(z)?;
        self.absorb([(z, y)])
    }

    /// Absorbs a batch of observations at once. Equivalent to calling
    /// [`update`](Self::update) for each, in any order.
    pub fn absorb<'a, I>(&mut self, observations: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let d = self.dim;
        // rhs = Lambda m + sum z y; quad_old = m^T Lambda m.
        let mut rhs = mat_vec(&self.precision, d, &self.mean);
        let quad_old = dot(&self.mean, &rhs);
        let mut precision = self.precision.clone();
        let (mut count, mut sum_y2) = (0usize, 0.0);
        for (z, y) in observations {
            self.check_dim(z)?;
            for i in 0..d {
                let zi = z[i];
                if zi == 0.0 {
                    continue;
                }
                rhs[i] += zi * y;
                let row = &mut precision[i * d..(i + 1) * d];
                for (p, zj) in row.iter_mut().zip(z) {
                    *p += zi * zj;
                }
            }
            sum_y2 += y * y;
            count += 1;
        }
        if count == 0 {
            return Ok(());
        }
        let chol = cholesky(&precision, d)?;
        let mut mean = rhs.clone();
        cholesky_solve(&chol, d, &mut mean);
        let quad_new = dot(&mean, &rhs);
        self.precision = precision;
        self.mean = mean;
        self.shape += 0.5 * count as f64;
        self.scale += 0.5 * (sum_y2 + quad_old - quad_new);
        if !(self.scale > 0.0) {
            // Only reachable through cancellation; the exact value is >= the prior scale.
            self.scale = f64::MIN_POSITIVE;
        }
        Ok(())
    }

    /// Thompson draw: `s2 ~ InvGamma(a, b)`, then `w ~ N(m, s2 Lambda^-1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let d = self.dim;
        let chol = cholesky(&self.precision, d)?;
        let gamma = Gamma::new(self.shape, 1.0 / self.scale)
            .map_err(|e| Error::Domain(format!("invalid inverse-gamma parameters: {e}")))?;
        let noise_var = 1.0 / gamma.sample(rng);
        // Lambda = L L^T, so L^-T eps has covariance Lambda^-1.
        let mut eps: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        solve_lower_transpose(&chol, d, &mut eps);
        let sd = noise_var.sqrt();
        Ok(self
            .mean
            .iter()
            .zip(&eps)
            .map(|(m, e)| m + sd * e)
            .collect())
    }

    /// Draws only the noise variance.
    pub fn sample_noise_variance<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let gamma = Gamma::new(self.shape, 1.0 / self.scale)
            .map_err(|e| Error::Domain(format!("invalid inverse-gamma parameters: {e}")))?;
        Ok(1.0 / gamma.sample(rng))
    }
}

mod common;

use nalgebra::{DMatrix, DVector};
use rl_hedge::neural::{BlrPosterior, NigPrior};

#[test]
fn posterior_mean_matches_least_squares() {
    for seed in 0..3 {
        let gap = common::blr_vs_ols(seed);
        assert!(gap <= 0.05, "seed {seed}: |m - ols|_inf = {gap}");
    }
}

#[test]
fn posterior_mean_recovers_true_weights() {
    let (zs, ys, beta) = common::linear_data(11, 1000, 4);
    let mut post = BlrPosterior::from_prior(4, &NigPrior::default());
    post.absorb(zs.iter().map(|z| z.as_slice()).zip(ys.iter().copied())).unwrap();
    for (m, b) in post.mean().iter().zip(&beta) {
        assert!((m - b).abs() <= 0.05, "{m} vs {b}");
    }
}

#[test]
fn conjugate_update_matches_dense_closed_form() {
    let (zs, ys, _) = common::linear_data(12, 300, 5);
    let prior = NigPrior::default();
    let mut post = BlrPosterior::from_prior(5, &prior);
    for (z, y) in zs.iter().zip(&ys) {
        post.update(z, *y).unwrap();
    }
    let x = DMatrix::from_fn(zs.len(), 5, |i, j| zs[i][j]);
    let y = DVector::from_column_slice(&ys);
    let precision = DMatrix::identity(5, 5) * prior.precision + x.transpose() * &x;
    let mean = precision.clone().cholesky().unwrap().solve(&(x.transpose() * &y));
    let scale = prior.scale + 0.5 * (y.dot(&y) - mean.dot(&(&precision * &mean)));
    for (a, b) in post.mean().iter().zip(mean.iter()) {
        assert!((a - b).abs() < 1e-10);
    }
    for (a, b) in post.precision().iter().zip(precision.transpose().iter()) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(post.shape(), prior.shape + 150.0);
    assert!((post.scale() - scale).abs() < 1e-9 * scale);
}

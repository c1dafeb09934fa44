//! Independent oracles shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rl_hedge::dqn::tabular::DeterministicMdp;
use rl_hedge::neural::{BlrPosterior, Mlp, NigPrior};
use rl_hedge::rng::SeedStream;

/// Max relative error between backprop and central differences (h = 1e-5)
/// for loss `0.5 |out - target|^2` on a random net of the given shape.
pub fn gradient_check(sizes: &[usize], seed: u64) -> f64 {
    let mut rng = SeedStream::from(seed).rng();
    let mut mlp = Mlp::new(sizes, &mut rng).unwrap();
    // Zero biases put units fed by dead ReLUs exactly on the kink, where the
    // loss is not differentiable; move every bias off zero.
    for layer in mlp.layers_mut() {
        for b in layer.biases_mut() {
            *b = rng.random_range(-0.5..0.5);
        }
    }
    let input: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
    let target: Vec<f64> = (0..*sizes.last().unwrap()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let loss = |m: &Mlp| -> f64 {
        let out = m.predict(&input).unwrap();
        0.5 * out.iter().zip(&target).map(|(o, t)| (o - t).powi(2)).sum::<f64>()
    };
    let (out, cache) = mlp.forward(&input).unwrap();
    let d_out: Vec<f64> = out.iter().zip(&target).map(|(o, t)| o - t).collect();
    let analytic = mlp.backward(&cache, &d_out).unwrap().flatten();

    let params = mlp.flat_params();
    let h = 1e-5;
    let mut probe = mlp.clone();
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let mut p = params.clone();
        p[i] = params[i] + h;
        probe.set_flat_params(&p).unwrap();
        let up = loss(&probe);
        p[i] = params[i] - h;
        probe.set_flat_params(&p).unwrap();
        let down = loss(&probe);
        let numeric = (up - down) / (2.0 * h);
        let scale = analytic[i].abs().max(numeric.abs());
        // Absolute floor for parameters whose gradient is zero or round-off sized.
        let rel = (analytic[i] - numeric).abs() / scale.max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

/// Synthetic regression data `y = beta^T z + N(0, 0.01)` with an intercept column.
pub fn linear_data(seed: u64, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut rng = SeedStream::from(seed).rng();
    let beta: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut zs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let mut z: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        z.push(1.0);
        ys.push(z.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + noise.sample(&mut rng));
        zs.push(z);
    }
    (zs, ys, beta)
}

/// Ordinary least squares through nalgebra's SVD.
pub fn ols(zs: &[Vec<f64>], ys: &[f64]) -> Vec<f64> {
    let d = zs[0].len();
    let x = DMatrix::from_fn(zs.len(), d, |i, j| zs[i][j]);
    let y = DVector::from_column_slice(ys);
    let fit = x.svd(true, true).solve(&y, 1e-12).unwrap();
    fit.iter().copied().collect()
}

/// Infinity-norm distance between the BLR posterior mean and OLS on the same data.
pub fn blr_vs_ols(seed: u64) -> f64 {
    let (zs, ys, _) = linear_data(seed, 1000, 6);
    let mut post = BlrPosterior::from_prior(6, &NigPrior::default());
    for (z, y) in zs.iter().zip(&ys) {
        post.update(z, *y).unwrap();
    }
    let reference = ols(&zs, &ys);
    post.mean()
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Optimal action values by value iteration to a 1e-14 fixed point.
pub fn value_iteration(mdp: &DeterministicMdp, gamma: f64) -> Vec<f64> {
    let (ns, na) = (mdp.n_states, mdp.n_actions);
    let mut q = vec![0.0; ns * na];
    loop {
        let v: Vec<f64> = (0..ns)
            .map(|s| q[s * na..(s + 1) * na].iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let next: Vec<f64> = (0..ns * na)
            .map(|i| mdp.reward[i] + mdp.next[i].map_or(0.0, |s| gamma * v[s]))
            .collect();
        let change = next.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        q = next;
        if change < 1e-14 {
            return q;
        }
    }
}

/// Largest gap between tabular Q-learning and value iteration on a random
/// 4-state, 2-action MDP.
pub fn tabular_gap(seed: u64) -> f64 {
    let mut rng = SeedStream::from(seed).rng();
    let mdp = DeterministicMdp::random(4, 2, &mut rng);
    let gamma = 0.9;
    let q = mdp.q_learning(0.5, gamma, 20_000, &mut rng);
    let exact = value_iteration(&mdp, gamma);
    (0..4)
        .flat_map(|s| (0..2).map(move |a| (s, a)))
        .map(|(s, a)| (q.get(s, a) - exact[s * 2 + a]).abs())
        .fold(0.0, f64::max)
}

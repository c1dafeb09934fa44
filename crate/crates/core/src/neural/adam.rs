use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, Mlp};

/// Bias-corrected adaptive-moment optimizer over the flattened network parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl Adam {
    pub fn new(mlp: &Mlp, learning_rate: f64) -> Self {
        let n = mlp.param_count();
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: vec![0.0; n],
            second: vec![0.0; n],
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Descends along `grads` (gradients of the loss to minimise).
    pub fn step(&mut self, mlp: &mut Mlp, grads: &Gradients) {
        assert_eq!(self.first.len(), mlp.param_count(), "optimizer built for another network");
        self.step += 1;
        let t = self.step as i32;
        let correct1 = 1.0 - self.beta1.powi(t);
        let correct2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
        let mut k = 0;
        for (layer, g) in mlp.layers_mut().iter_mut().zip(grads.layers()) {
            for (p, &gv) in layer.weights_mut().iter_mut().zip(g.weights()) {
                Self::update(&mut self.first[k], &mut self.second[k], p, gv, b1, b2, lr, eps, correct1, correct2);
                k += 1;
            }
            for (p, &gv) in layer.biases_mut().iter_mut().zip(g.biases()) {
                Self::update(&mut self.first[k], &mut self.second[k], p, gv, b1, b2, lr, eps, correct1, correct2);
                k += 1;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn update(
        m: &mut f64,
        v: &mut f64,
        p: &mut f64,
        g: f64,
        b1: f64,
        b2: f64,
        lr: f64,
        eps: f64,
        correct1: f64,
        correct2: f64,
    ) {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / correct1;
        let v_hat = *v / correct2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::Layer;

    fn scalar_net(w: f64, b: f64) -> Mlp {
        let mut l = Layer::zeros(1, 1);
        l.weights_mut()[0] = w;
        l.biases_mut()[0] = b;
        Mlp::from_layers(vec![l]).unwrap()
    }

    fn grads_of(mlp: &Mlp, gw: f64, gb: f64) -> Gradients {
        Gradients::from_flat(mlp, &[gw, gb]).unwrap()
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut mlp = scalar_net(0.3, -0.2);
        let mut adam = Adam::new(&mlp, 1e-2);
        let g = Gradients::zeros_like(&mlp);
        for _ in 0..5 {
            adam.step(&mut mlp, &g);
        }
        assert_eq!(mlp.flat_params(), vec![0.3, -0.2]);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut mlp = scalar_net(0.0, 0.0);
        let mut adam = Adam::new(&mlp, 1e-3);
        let g = grads_of(&mlp, 3.7, -0.02);
        adam.step(&mut mlp, &g);
        let p = mlp.flat_params();
        assert!((p[0] + 1e-3).abs() < 1e-9);
        assert!((p[1] - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn converges_on_quadratic_bowl() {
        // L = (w - 1.5)^2 + 2 (b + 0.7)^2, minimiser (1.5, -0.7).
        let mut mlp = scalar_net(0.0, 0.0);
        let mut adam = Adam::new(&mlp, 1e-2);
        for _ in 0..500 {
            let p = mlp.flat_params();
            let g = grads_of(&mlp, 2.0 * (p[0] - 1.5), 4.0 * (p[1] + 0.7));
            adam.step(&mut mlp, &g);
        }
        let p = mlp.flat_params();
        assert!((p[0] - 1.5).abs() < 1e-3, "w={}", p[0]);
        assert!((p[1] + 0.7).abs() < 1e-3, "b={}", p[1]);
    }
}

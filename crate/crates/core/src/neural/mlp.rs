//! Fully connected ReLU network with a linear output layer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense layer, weights stored row-major as `out_dim x in_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Layer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    /// Uniform on `+-sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn glorot<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let mut layer = Layer::zeros(in_dim, out_dim);
        for w in &mut layer.weights {
            *w = rng.random_range(-limit..limit);
        }
        layer
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    fn affine_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = self.biases[o];
            for (w, x) in row.iter().zip(input) {
                acc += w * x;
            }
            out.push(acc);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
}

/// Activations from a forward pass: the input followed by each layer's output.
#[derive(Debug, Clone, Default)]
pub struct Cache {
    activations: Vec<Vec<f64>>,
}

impl Cache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("cache is filled by forward")
    }

    /// Output of the last hidden layer (the input for a network without hidden layers).
    pub fn last_hidden(&self) -> &[f64] {
        &self.activations[self.activations.len() - 2]
    }
}

/// Parameter gradients, same layout as the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Gradients {
            layers: mlp
                .layers
                .iter()
                .map(|l| Layer::zeros(l.in_dim, l.out_dim))
                .collect(),
        }
    }

    /// Builds gradients from a flat vector in [`Mlp::flat_params`] order.
    pub fn from_flat(mlp: &Mlp, flat: &[f64]) -> Result<Self> {
        let mut shaped = mlp.clone();
        shaped.set_flat_params(flat)?;
        Ok(Gradients {
            layers: shaped.layers,
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn clear(&mut self) {
        for l in &mut self.layers {
            l.weights.fill(0.0);
            l.biases.fill(0.0);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|g| *g *= factor);
            l.biases.iter_mut().for_each(|g| *g *= factor);
        }
    }

    /// Flattened in the order of [`Mlp::flat_params`].
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }
}

impl Mlp {
    /// `sizes` lists the input width, each hidden width, then the output width.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let layers = sizes
            .windows(2)
            .map(|w| Layer::glorot(w[0], w[1], rng))
            .collect();
        Ok(Mlp { layers })
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        Self::check_sizes(sizes)?;
        Ok(Mlp {
            layers: sizes.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Shape {
                    expected: pair[0].out_dim,
                    actual: pair[1].in_dim,
                });
            }
        }
        for l in &layers {
            if l.weights.len() != l.in_dim * l.out_dim || l.biases.len() != l.out_dim {
                return Err(Error::Shape {
                    expected: l.in_dim * l.out_dim,
                    actual: l.weights.len(),
                });
            }
        }
        Ok(Mlp { layers })
    }

    fn check_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "network sizes must have >= 2 nonzero entries, got {sizes:?}"
            )));
        }
        Ok(())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    /// Width of the last hidden layer (input width when there is none).
    pub fn feature_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].in_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::Shape {
                expected: self.param_count(),
                actual: params.len(),
            });
        }
        let mut it = params.iter();
        for l in &mut self.layers {
            for p in l.weights.iter_mut().chain(l.biases.iter_mut()) {
                *p = *it.next().expect("length checked");
            }
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, Cache)> {
        let mut cache = Cache::default();
        self.forward_into(input, &mut cache)?;
        Ok((cache.output().to_vec(), cache))
    }

    /// Forward pass reusing the buffers in `cache`.
    pub fn forward_into<'c>(&self, input: &[f64], cache: &'c mut Cache) -> Result<&'c [f64]> {
        if input.len() != self.input_dim() {
            return Err(Error::Shape {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        let n = self.layers.len();
        cache.activations.resize_with(n + 1, Vec::new);
        cache.activations[0].clear();
        cache.activations[0].extend_from_slice(input);
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = cache.activations.split_at_mut(i + 1);
            let out = &mut rest[0];
            layer.affine_into(&done[i], out);
            if i + 1 < n {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        Ok(cache.output())
    }

    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(input)?.0)
    }

    pub fn backward(&self, cache: &Cache, output_gradient: &[f64]) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.accumulate_gradients(cache, output_gradient, &mut grads)?;
        Ok(grads)
    }

    /// Adds the gradient of the loss whose output gradient is `output_gradient`
    /// to `grads`. Summing over a batch is repeated accumulation.
    pub fn accumulate_gradients(
        &self,
        cache: &Cache,
        output_gradient: &[f64],
        grads: &mut Gradients,
    ) -> Result<()> {
        if output_gradient.len() != self.output_dim() {
            return Err(Error::Shape {
                expected: self.output_dim(),
                actual: output_gradient.len(),
            });
        }
        if cache.activations.len() != self.layers.len() + 1 {
            return Err(Error::Shape {
                expected: self.layers.len() + 1,
                actual: cache.activations.len(),
            });
        }
        let mut delta = output_gradient.to_vec();
        let mut next_delta = Vec::new();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = &cache.activations[i];
            let g = &mut grads.layers[i];
            for o in 0..layer.out_dim {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                g.biases[o] += d;
                let row = &mut g.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (gw, x) in row.iter_mut().zip(input) {
                    *gw += d * x;
                }
            }
            if i == 0 {
                break;
            }
            next_delta.clear();
            next_delta.resize(layer.in_dim, 0.0);
            for o in 0..layer.out_dim {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (nd, w) in next_delta.iter_mut().zip(row) {
                    *nd += w * d;
                }
            }
            // ReLU: zero where the unit was inactive.
            for (nd, &a) in next_delta.iter_mut().zip(input) {
                if a <= 0.0 {
                    *nd = 0.0;
                }
            }
            std::mem::swap(&mut delta, &mut next_delta);
        }
        Ok(())
    }
}

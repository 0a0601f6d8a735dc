use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden-layer nonlinearity. The output neuron is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Tanh,
    Logistic,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Logistic => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative expressed through the activation's own output.
    fn slope(self, out: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - out * out,
            Activation::Logistic => out * (1.0 - out),
        }
    }
}

/// One normalized training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: f64,
}

/// Feed-forward network with one hidden layer and a single linear output.
///
/// Parameters are stored flat: hidden weights row by row (one row per
/// hidden neuron), then hidden biases, output weights, output bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    inputs: usize,
    hidden: usize,
    activation: Activation,
    params: Vec<f64>,
}

impl Network {
    pub fn param_count(inputs: usize, hidden: usize) -> usize {
        hidden * inputs + 2 * hidden + 1
    }

    pub fn zeros(inputs: usize, hidden: usize, activation: Activation) -> Self {
        Self {
            inputs,
            hidden,
            activation,
            params: vec![0.0; Self::param_count(inputs, hidden)],
        }
    }

    /// Parameters drawn uniformly from `[-0.5, 0.5]`.
    pub fn random(inputs: usize, hidden: usize, activation: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Self::zeros(inputs, hidden, activation);
        for p in &mut net.params {
            *p = rng.random_range(-0.5..=0.5);
        }
        net
    }

    pub fn from_params(inputs: usize, hidden: usize, activation: Activation, params: Vec<f64>) -> Result<Self> {
        if params.len() != Self::param_count(inputs, hidden) {
            return Err(Error::invalid(
                "",
                "network",
                format!(
                    "{inputs}-{hidden}-1 needs {} parameters, got {}",
                    Self::param_count(inputs, hidden),
                    params.len()
                ),
            ));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Numeric("network parameters must be finite".into()));
        }
        Ok(Self {
            inputs,
            hidden,
            activation,
            params,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn bias_offset(&self) -> usize {
        self.hidden * self.inputs
    }

    fn out_offset(&self) -> usize {
        self.bias_offset() + self.hidden
    }

    pub fn hidden_weights(&self, neuron: usize) -> &[f64] {
        &self.params[neuron * self.inputs..(neuron + 1) * self.inputs]
    }

    pub fn hidden_biases(&self) -> &[f64] {
        &self.params[self.bias_offset()..self.out_offset()]
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.params[self.out_offset()..self.out_offset() + self.hidden]
    }

    pub fn output_bias(&self) -> f64 {
        self.params[self.params.len() - 1]
    }

    fn hidden_outputs(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.inputs, "input width mismatch");
        let biases = self.hidden_biases();
        (0..self.hidden)
            .map(|j| {
                let z: f64 = self.hidden_weights(j).iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + biases[j];
                self.activation.apply(z)
            })
            .collect()
    }

    pub(crate) fn output(&self, x: &[f64]) -> f64 {
        let h = self.hidden_outputs(x);
        self.output_bias() + self.output_weights().iter().zip(&h).map(|(v, hj)| v * hj).sum::<f64>()
    }

    /// Network output for a normalized input.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.inputs {
            return Err(Error::invalid(
                "",
                "input",
                format!("expected {} features, got {}", self.inputs, x.len()),
            ));
        }
        let y = self.output(x);
        if !y.is_finite() {
            return Err(Error::Numeric(format!("non-finite network output {y}")));
        }
        Ok(y)
    }

    /// Output and its derivative with respect to every parameter.
    pub(crate) fn output_and_jacobian(&self, x: &[f64], row: &mut [f64]) -> f64 {
        let h = self.hidden_outputs(x);
        let v = self.output_weights().to_vec();
        let (bias_at, out_at) = (self.bias_offset(), self.out_offset());
        for j in 0..self.hidden {
            let delta = v[j] * self.activation.slope(h[j]);
            for (i, xi) in x.iter().enumerate() {
                row[j * self.inputs + i] = delta * xi;
            }
            row[bias_at + j] = delta;
            row[out_at + j] = h[j];
        }
        row[out_at + self.hidden] = 1.0;
        self.output_bias() + v.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn sse(&self, samples: &[Sample]) -> f64 {
        samples
            .iter()
            .map(|s| {
                let r = self.output(&s.input) - s.target;
                r * r
            })
            .sum()
    }

    /// Analytic gradient of the sum of squared errors.
    pub fn sse_gradient(&self, samples: &[Sample]) -> Vec<f64> {
        let mut grad = vec![0.0; self.params.len()];
        let mut row = vec![0.0; self.params.len()];
        for s in samples {
            let r = self.output_and_jacobian(&s.input, &mut row) - s.target;
            for (g, d) in grad.iter_mut().zip(&row) {
                *g += 2.0 * r * d;
            }
        }
        grad
    }
}

/// Central-difference step used by [`gradient_check`].
pub const GRADIENT_CHECK_STEP: f64 = 1e-5;

/// Gradients smaller than this on both sides count as agreeing.
const GRADIENT_ABS_FLOOR: f64 = 1e-7;

/// Largest relative disagreement between the analytic SSE gradient and
/// central finite differences.
pub fn gradient_check(net: &Network, samples: &[Sample]) -> f64 {
    gradient_check_with(net, samples, Network::sse_gradient)
}

/// [`gradient_check`] against an arbitrary analytic gradient.
pub fn gradient_check_with<F>(net: &Network, samples: &[Sample], analytic: F) -> f64
where
    F: Fn(&Network, &[Sample]) -> Vec<f64>,
{
    let grad = analytic(net, samples);
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (p, a) in grad.iter().enumerate() {
        let base = probe.params[p];
        probe.params[p] = base + GRADIENT_CHECK_STEP;
        let up = probe.sse(samples);
        probe.params[p] = base - GRADIENT_CHECK_STEP;
        let down = probe.sse(samples);
        probe.params[p] = base;
        let numeric = (up - down) / (2.0 * GRADIENT_CHECK_STEP);
        let scale = a.abs().max(numeric.abs());
        if scale < GRADIENT_ABS_FLOOR {
            continue;
        }
        worst = worst.max((a - numeric).abs() / scale);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_outputs_zero() {
        let net = Network::zeros(13, 20, Activation::Tanh);
        assert_eq!(net.forward(&[1.0; 13]).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_single_path() {
        // One hidden neuron wired to input 3 with weight 0.5, bias 0.1;
        // output weight 2, output bias -0.3.
        let mut params = vec![0.0; Network::param_count(13, 2)];
        params[3] = 0.5;
        params[2 * 13] = 0.1;
        params[2 * 13 + 2] = 2.0;
        params[2 * 13 + 4] = -0.3;
        let net = Network::from_params(13, 2, Activation::Tanh, params).unwrap();
        let mut x = [0.0; 13];
        x[3] = 1.0;
        let expected = -0.3 + 2.0 * 0.6_f64.tanh();
        assert!((net.forward(&x).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn hidden_permutation_is_invisible() {
        let net = Network::random(13, 5, Activation::Tanh, 11);
        let order = [3, 0, 4, 1, 2];
        let mut params = Vec::new();
        for &j in &order {
            params.extend_from_slice(net.hidden_weights(j));
        }
        params.extend(order.iter().map(|&j| net.hidden_biases()[j]));
        params.extend(order.iter().map(|&j| net.output_weights()[j]));
        params.push(net.output_bias());
        let permuted = Network::from_params(13, 5, Activation::Tanh, params).unwrap();
        let x: Vec<f64> = (0..13).map(|i| i as f64 / 13.0).collect();
        assert_eq!(net.forward(&x).unwrap(), permuted.forward(&x).unwrap());
    }

    #[test]
    fn wrong_shapes_rejected() {
        assert!(Network::from_params(13, 20, Activation::Tanh, vec![0.0; 10]).is_err());
        let net = Network::zeros(13, 20, Activation::Tanh);
        assert!(net.forward(&[0.0; 12]).is_err());
        let mut bad = vec![0.0; Network::param_count(2, 2)];
        bad[0] = f64::NAN;
        assert!(Network::from_params(2, 2, Activation::Tanh, bad).is_err());
    }

    #[test]
    fn logistic_gradient_agrees() {
        let net = Network::random(13, 20, Activation::Logistic, 5);
        let s = Sample {
            input: (0..13).map(|i| (i % 4) as f64 / 3.0).collect(),
            target: 0.4,
        };
        assert!(gradient_check(&net, &[s]) < 1e-4);
    }

    #[test]
    fn stationary_point_reports_zero() {
        let net = Network::zeros(13, 20, Activation::Tanh);
        let s = Sample {
            input: vec![0.5; 13],
            target: 0.0,
        };
        assert_eq!(gradient_check(&net, &[s]), 0.0);
    }
}

//! Small fully connected regression networks with hand-written backprop.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Softplus,
    Relu,
    Tanh,
    Sigmoid,
    Identity,
}

pub(crate) fn softplus(x: f64) -> f64 {
    // Stable for large |x|.
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => softplus(x),
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// Derivative at pre-activation `x`.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => sigmoid(x),
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - x.tanh().powi(2),
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Softplus => "softplus",
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "softplus" => Activation::Softplus,
            "relu" => Activation::Relu,
            "tanh" => Activation::Tanh,
            "sigmoid" | "logistic" => Activation::Sigmoid,
            "identity" | "linear" => Activation::Identity,
            _ => return Err(Error::Config(format!("unknown activation `{s}`"))),
        })
    }
}

/// `f64` vectors stored as base64 of their little-endian bytes, so weights
/// survive a save/load cycle bit for bit.
mod blob {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
        s.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = STANDARD.decode(text.as_bytes()).map_err(de::Error::custom)?;
        if bytes.len() % 8 != 0 {
            return Err(de::Error::custom("weight blob length is not a multiple of 8"));
        }
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    /// Row-major `outputs × inputs`.
    #[serde(with = "blob")]
    pub weights: Vec<f64>,
    #[serde(with = "blob")]
    pub bias: Vec<f64>,
}

impl Layer {
    fn glorot(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        Layer {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| rng.random_range(-limit..limit)).collect(),
            bias: vec![0.0; outputs],
        }
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (row, b) in self.weights.chunks_exact(self.inputs).zip(&self.bias) {
            out.push(b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>());
        }
    }
}

/// Single-output network; the hidden activation applies to every layer but the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub activation: Activation,
    pub layers: Vec<Layer>,
}

/// Gradient buffers shaped like a network's layers.
pub(crate) struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Network {
    /// `depth` hidden layers of `width` units; `depth = 0` is a linear model.
    pub fn new(inputs: usize, depth: usize, width: usize, activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        let mut sizes = vec![inputs];
        sizes.extend(std::iter::repeat_n(width, depth));
        sizes.push(1);
        Network {
            activation,
            layers: sizes.windows(2).map(|w| Layer::glorot(w[0], w[1], rng)).collect(),
        }
    }

    pub fn inputs(&self) -> usize {
        self.layers.first().map_or(0, |l| l.inputs)
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Raw (pre-transform) output.
    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine(&a, &mut z);
            if i < last {
                for v in z.iter_mut() {
                    *v = self.activation.apply(*v);
                }
            }
            std::mem::swap(&mut a, &mut z);
        }
        a[0]
    }

    pub(crate) fn zero_gradients(&self) -> Gradients {
        Gradients {
            weights: self.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: self.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    /// Forward pass for one sample, then adds `dloss/dparams` to `grads` given
    /// `dloss_dout(raw_output)`. Returns the raw output.
    pub(crate) fn backprop(&self, x: &[f64], grads: &mut Gradients, dloss_dout: impl Fn(f64) -> f64) -> f64 {
        let last = self.layers.len() - 1;
        // Layer inputs (post-activation) and pre-activations.
        let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        let mut pres: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        let mut a = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.affine(&a, &mut z);
            let next = if i < last {
                z.iter().map(|v| self.activation.apply(*v)).collect()
            } else {
                z.clone()
            };
            inputs.push(std::mem::replace(&mut a, next));
            pres.push(z);
        }
        let out = a[0];
        let mut delta = vec![dloss_dout(out)];
        for i in (0..=last).rev() {
            let layer = &self.layers[i];
            if i < last {
                for (d, z) in delta.iter_mut().zip(&pres[i]) {
                    *d *= self.activation.derivative(*z);
                }
            }
            let input = &inputs[i];
            for (o, d) in delta.iter().enumerate() {
                grads.bias[i][o] += d;
                let row = &mut grads.weights[i][o * layer.inputs..(o + 1) * layer.inputs];
                for (g, v) in row.iter_mut().zip(input) {
                    *g += d * v;
                }
            }
            if i > 0 {
                let mut prev = vec![0.0; layer.inputs];
                for (o, d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += d * w;
                    }
                }
                delta = prev;
            }
        }
        out
    }

    pub(crate) fn params_mut(&mut self) -> impl Iterator<Item = (&mut Vec<f64>, &mut Vec<f64>)> {
        self.layers.iter_mut().map(|l| (&mut l.weights, &mut l.bias))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for act in [Activation::Softplus, Activation::Tanh, Activation::Sigmoid, Activation::Identity] {
            let net = Network::new(3, 2, 5, act, &mut rng);
            let x = [0.3, -1.2, 0.7];
            let mut g = net.zero_gradients();
            // loss = out², so dloss/dout = 2 out.
            net.backprop(&x, &mut g, |o| 2.0 * o);
            let h = 1e-6;
            for (li, layer) in net.layers.iter().enumerate() {
                for k in 0..layer.weights.len() {
                    let mut plus = net.clone();
                    plus.layers[li].weights[k] += h;
                    let mut minus = net.clone();
                    minus.layers[li].weights[k] -= h;
                    let fd = (plus.forward(&x).powi(2) - minus.forward(&x).powi(2)) / (2.0 * h);
                    assert!((fd - g.weights[li][k]).abs() < 1e-6, "{act} layer {li} weight {k}");
                }
            }
        }
    }

    #[test]
    fn depth_zero_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Network::new(2, 0, 48, Activation::Softplus, &mut rng);
        assert_eq!(net.layers.len(), 1);
        let f = |x: &[f64]| net.forward(x);
        let mid = f(&[0.5, 0.5]);
        assert!((mid - 0.5 * (f(&[0.0, 0.0]) + f(&[1.0, 1.0]))).abs() < 1e-12);
    }

    #[test]
    fn activations_are_stable() {
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!("Linear".parse::<Activation>().unwrap(), Activation::Identity);
    }

    #[test]
    fn weights_serialize_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = Network::new(4, 3, 7, Activation::Relu, &mut rng);
        let back: Network = serde_json::from_str(&serde_json::to_string(&net).unwrap()).unwrap();
        assert_eq!(back, net);
    }
}

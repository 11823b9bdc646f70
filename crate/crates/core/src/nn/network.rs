use std::hash::{DefaultHasher, Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::activation::ActivationKind;
use super::adam::AdamState;
use crate::{Error, Result};

pub const NETWORK_FORMAT_VERSION: u32 = 1;

/// Fully connected feed-forward network.
///
/// `weights[l]` is stored row-major with shape `layer_sizes[l + 1] x layer_sizes[l]`.
/// Hidden layers use `hidden_activations[l]`, the last layer `output_activation`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NetworkDocument", into = "NetworkDocument")]
pub struct DenseNetwork {
    layer_sizes: Vec<usize>,
    hidden_activations: Vec<ActivationKind>,
    output_activation: ActivationKind,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    generation: u64,
}

impl PartialEq for DenseNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.layer_sizes == other.layer_sizes
            && self.hidden_activations == other.hidden_activations
            && self.output_activation == other.output_activation
            && self.weights == other.weights
            && self.biases == other.biases
    }
}

/// On-disk form of a [`DenseNetwork`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub hidden_activations: Vec<ActivationKind>,
    pub output_activation: ActivationKind,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl From<DenseNetwork> for NetworkDocument {
    fn from(net: DenseNetwork) -> Self {
        NetworkDocument {
            version: NETWORK_FORMAT_VERSION,
            layer_sizes: net.layer_sizes,
            hidden_activations: net.hidden_activations,
            output_activation: net.output_activation,
            weights: net.weights,
            biases: net.biases,
        }
    }
}

impl TryFrom<NetworkDocument> for DenseNetwork {
    type Error = Error;

    fn try_from(doc: NetworkDocument) -> Result<Self> {
        if doc.version != NETWORK_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported network format version {}",
                doc.version
            )));
        }
        DenseNetwork::from_parts(
            doc.layer_sizes,
            doc.hidden_activations,
            doc.output_activation,
            doc.weights,
            doc.biases,
        )
    }
}

/// Values recorded by [`DenseNetwork::forward`] for the reverse pass.
#[derive(Debug, Clone)]
pub struct Tape {
    generation: u64,
    layer_sizes: Vec<usize>,
    /// `activations[0]` is the input, `activations[l + 1]` the output of layer `l`.
    activations: Vec<Vec<f64>>,
    pre_activations: Vec<Vec<f64>>,
}

impl Tape {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("tape has at least the input")
    }

    pub fn input(&self) -> &[f64] {
        &self.activations[0]
    }
}

/// Parameter gradients, shaped like the network they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNetwork) -> Self {
        Gradients {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Blocks in parameter order: weights of layer 0, biases of layer 0, weights of layer 1, ...
    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            v.iter_mut().for_each(|g| *g *= factor);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks()
            .flat_map(|b| b.iter())
            .fold(0.0, |m, g| m.max(g.abs()))
    }
}

pub(crate) fn block_name(index: usize) -> String {
    let kind = if index.is_multiple_of(2) { "weights" } else { "biases" };
    format!("layer {} {}", index / 2, kind)
}

impl DenseNetwork {
    /// Builds a network with scaled-uniform weights,
    /// `U(-sqrt(6 / (fan_in + fan_out)), +sqrt(6 / (fan_in + fan_out)))`, and zero biases.
    pub fn new<R: Rng + ?Sized>(
        layer_sizes: &[usize],
        hidden_activations: &[ActivationKind],
        output_activation: ActivationKind,
        rng: &mut R,
    ) -> Result<Self> {
        check_architecture(layer_sizes, hidden_activations, output_activation)?;
        let weights = layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                (0..fan_in * fan_out)
                    .map(|_| rng.random_range(-limit..=limit))
                    .collect()
            })
            .collect();
        let biases = layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(DenseNetwork {
            layer_sizes: layer_sizes.to_vec(),
            hidden_activations: hidden_activations.to_vec(),
            output_activation,
            weights,
            biases,
            generation: 0,
        })
    }

    pub fn from_parts(
        layer_sizes: Vec<usize>,
        hidden_activations: Vec<ActivationKind>,
        output_activation: ActivationKind,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_architecture(&layer_sizes, &hidden_activations, output_activation)?;
        let layers = layer_sizes.len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(Error::Shape(format!(
                "expected {layers} weight and bias blocks, got {} and {}",
                weights.len(),
                biases.len()
            )));
        }
        for l in 0..layers {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            if weights[l].len() != fan_in * fan_out {
                return Err(Error::Shape(format!(
                    "layer {l} weights: expected {fan_out}x{fan_in}, got {} values",
                    weights[l].len()
                )));
            }
            if biases[l].len() != fan_out {
                return Err(Error::Shape(format!(
                    "layer {l} biases: expected {fan_out}, got {}",
                    biases[l].len()
                )));
            }
        }
        Ok(DenseNetwork {
            layer_sizes,
            hidden_activations,
            output_activation,
            weights,
            biases,
            generation: 0,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn hidden_activations(&self) -> &[ActivationKind] {
        &self.hidden_activations
    }

    pub fn output_activation(&self) -> ActivationKind {
        self.output_activation
    }

    pub fn activation(&self, layer: usize) -> ActivationKind {
        if layer + 1 == self.num_layers() {
            self.output_activation
        } else {
            self.hidden_activations[layer]
        }
    }

    pub fn weights(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        self.generation += 1;
        &mut self.weights[layer]
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut [f64] {
        self.generation += 1;
        &mut self.biases[layer]
    }

    pub fn num_params(&self) -> usize {
        self.parameters().map(<[f64]>::len).sum()
    }

    /// Blocks in the same order as [`Gradients::blocks`].
    pub fn parameters(&self) -> impl Iterator<Item = &[f64]> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
    }

    /// Hash over the exact bit patterns of every parameter.
    pub fn checksum(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.layer_sizes.hash(&mut h);
        for block in self.parameters() {
            for v in block {
                v.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    /// Evaluates the network and records the tape needed by [`backward`](Self::backward).
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Tape)> {
        if x.len() != self.input_width() {
            return Err(Error::Shape(format!(
                "network input has width {}, got {}",
                self.input_width(),
                x.len()
            )));
        }
        let mut activations = Vec::with_capacity(self.num_layers() + 1);
        let mut pre_activations = Vec::with_capacity(self.num_layers());
        activations.push(x.to_vec());
        for l in 0..self.num_layers() {
            let input = &activations[l];
            let z = self.affine(l, input);
            let mut a = vec![0.0; z.len()];
            self.activation(l).apply_into(&z, &mut a)?;
            pre_activations.push(z);
            activations.push(a);
        }
        let output = activations.last().unwrap().clone();
        Ok((
            output,
            Tape {
                generation: self.generation,
                layer_sizes: self.layer_sizes.clone(),
                activations,
                pre_activations,
            },
        ))
    }

    /// Evaluation without a tape.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_width() {
            return Err(Error::Shape(format!(
                "network input has width {}, got {}",
                self.input_width(),
                x.len()
            )));
        }
        let mut a = x.to_vec();
        for l in 0..self.num_layers() {
            let z = self.affine(l, &a);
            a = vec![0.0; z.len()];
            self.activation(l).apply_into(&z, &mut a)?;
        }
        Ok(a)
    }

    fn affine(&self, layer: usize, input: &[f64]) -> Vec<f64> {
        let fan_in = self.layer_sizes[layer];
        self.weights[layer]
            .chunks_exact(fan_in)
            .zip(&self.biases[layer])
            .map(|(row, b)| b + row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>())
            .collect()
    }

    /// Parameter gradients of the scalar loss whose gradient w.r.t. the
    /// network output is `upstream`.
    pub fn gradient(&self, tape: &Tape, upstream: &[f64]) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.backward_into(tape, upstream, &mut grads)?;
        Ok(grads)
    }

    /// Accumulates parameter gradients into `grads` and returns the gradient
    /// w.r.t. the network input.
    pub fn backward_into(
        &self,
        tape: &Tape,
        upstream: &[f64],
        grads: &mut Gradients,
    ) -> Result<Vec<f64>> {
        if tape.generation != self.generation || tape.layer_sizes != self.layer_sizes {
            return Err(Error::StaleTape);
        }
        if upstream.len() != self.output_width() {
            return Err(Error::Shape(format!(
                "upstream gradient has width {}, network output is {}",
                upstream.len(),
                self.output_width()
            )));
        }
        if grads.weights.len() != self.num_layers() {
            return Err(Error::Shape("gradient buffer does not match network".into()));
        }
        let mut delta_out = upstream.to_vec();
        for l in (0..self.num_layers()).rev() {
            let fan_in = self.layer_sizes[l];
            let mut delta = vec![0.0; delta_out.len()];
            self.activation(l).backprop(
                &tape.pre_activations[l],
                &tape.activations[l + 1],
                &delta_out,
                &mut delta,
            );
            let input = &tape.activations[l];
            for (i, &d) in delta.iter().enumerate() {
                grads.biases[l][i] += d;
                let row = &mut grads.weights[l][i * fan_in..(i + 1) * fan_in];
                for (g, &a) in row.iter_mut().zip(input) {
                    *g += d * a;
                }
            }
            let mut delta_in = vec![0.0; fan_in];
            for (row, &d) in self.weights[l].chunks_exact(fan_in).zip(&delta) {
                for (acc, &w) in delta_in.iter_mut().zip(row) {
                    *acc += w * d;
                }
            }
            delta_out = delta_in;
        }
        Ok(delta_out)
    }

    /// Convenience wrapper around [`backward_into`](Self::backward_into).
    pub fn backward(&self, tape: &Tape, upstream: &[f64]) -> Result<(Gradients, Vec<f64>)> {
        let mut grads = Gradients::zeros_like(self);
        let input_grad = self.backward_into(tape, upstream, &mut grads)?;
        Ok((grads, input_grad))
    }

    /// One Adam update of every parameter. Nothing is modified if any
    /// gradient entry is non-finite.
    pub fn adam_step(&mut self, grads: &Gradients, state: &mut AdamState, lr: f64) -> Result<()> {
        if grads.weights.len() != self.num_layers() || grads.biases.len() != self.num_layers() {
            return Err(Error::Shape("gradient buffer does not match network".into()));
        }
        let mut params: Vec<&mut [f64]> = self
            .weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| [w.as_mut_slice(), b.as_mut_slice()])
            .collect();
        let grad_blocks: Vec<&[f64]> = grads.blocks().collect();
        state.step_named(&mut params, &grad_blocks, lr, block_name)?;
        self.generation += 1;
        Ok(())
    }
}

fn check_architecture(
    layer_sizes: &[usize],
    hidden_activations: &[ActivationKind],
    output_activation: ActivationKind,
) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::Shape(
            "a network needs at least an input and an output width".into(),
        ));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::Shape(format!(
            "layer widths must be positive: {layer_sizes:?}"
        )));
    }
    if hidden_activations.len() != layer_sizes.len() - 2 {
        return Err(Error::Shape(format!(
            "{} hidden layers but {} hidden activations",
            layer_sizes.len() - 2,
            hidden_activations.len()
        )));
    }
    for a in hidden_activations.iter().chain([&output_activation]) {
        a.validate()?;
    }
    Ok(())
}

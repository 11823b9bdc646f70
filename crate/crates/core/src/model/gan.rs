use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Architecture, TrainingConfig};
use crate::data::{MultiFidelityDataset, Normalizer, NormalizerKind, Sample};
use crate::nn::{ActivationKind, DenseNetwork, Gradients, Tape};
use crate::rng::{stream, stream_rng};
use crate::{Error, Result};

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// Generator (frozen LF block feeding an HF block) plus discriminator.
///
/// Networks operate in normalized coordinates: inputs pass through
/// `input_norm`, the LF block is trained on `lf_output_norm`-scaled LF
/// responses, and the HF block and discriminator work on `hf_output_norm`-scaled
/// HF responses.
#[derive(Debug, Clone, PartialEq)]
pub struct GanMdfModel {
    d1: usize,
    d2: usize,
    lf_block: DenseNetwork,
    hf_block: DenseNetwork,
    discriminator: DenseNetwork,
    pub(crate) input_norm: Normalizer,
    pub(crate) lf_output_norm: Normalizer,
    pub(crate) hf_output_norm: Normalizer,
    lf_frozen: bool,
}

/// Result of one generator evaluation kept for backpropagation into the HF block.
pub(crate) struct GeneratorPass {
    pub output: Vec<f64>,
    pub hf_tape: Tape,
}

impl GanMdfModel {
    /// Fresh model with seeded random weights and identity normalizers.
    pub fn new(d1: usize, d2: usize, arch: &Architecture, seed: u64) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::Shape("input and output widths must be positive".into()));
        }
        arch.validate()?;
        let sizes = |input: usize, hidden: &[usize], output: usize| {
            std::iter::once(input)
                .chain(hidden.iter().copied())
                .chain(std::iter::once(output))
                .collect::<Vec<_>>()
        };
        let lf_block = DenseNetwork::new(
            &sizes(d1, &arch.lf_hidden, d2),
            &arch.lf_activations,
            ActivationKind::Identity,
            &mut stream_rng(seed, stream::INIT_LF),
        )?;
        let hf_block = DenseNetwork::new(
            &sizes(d1 + d2, &arch.hf_hidden, d2),
            &arch.hf_activations,
            ActivationKind::Identity,
            &mut stream_rng(seed, stream::INIT_HF),
        )?;
        let discriminator = DenseNetwork::new(
            &sizes(d2, &arch.disc_hidden, 1),
            &arch.disc_activations,
            ActivationKind::Sigmoid,
            &mut stream_rng(seed, stream::INIT_DISC),
        )?;
        Self::from_networks(lf_block, hf_block, discriminator)
    }

    /// Assembles a model from existing networks, checking that their widths
    /// line up: LF `d1 -> d2`, HF `d1 + d2 -> d2`, discriminator `d2 -> 1`.
    pub fn from_networks(
        lf_block: DenseNetwork,
        hf_block: DenseNetwork,
        discriminator: DenseNetwork,
    ) -> Result<Self> {
        let d1 = lf_block.input_width();
        let d2 = lf_block.output_width();
        if hf_block.input_width() != d1 + d2 || hf_block.output_width() != d2 {
            return Err(Error::Shape(format!(
                "HF block must map {} -> {d2}, got {} -> {}",
                d1 + d2,
                hf_block.input_width(),
                hf_block.output_width()
            )));
        }
        if discriminator.input_width() != d2 || discriminator.output_width() != 1 {
            return Err(Error::Shape(format!(
                "discriminator must map {d2} -> 1, got {} -> {}",
                discriminator.input_width(),
                discriminator.output_width()
            )));
        }
        if discriminator.output_activation() != ActivationKind::Sigmoid {
            return Err(Error::Shape("discriminator head must be a sigmoid".into()));
        }
        Ok(GanMdfModel {
            d1,
            d2,
            lf_block,
            hf_block,
            discriminator,
            input_norm: Normalizer::identity(d1),
            lf_output_norm: Normalizer::identity(d2),
            hf_output_norm: Normalizer::identity(d2),
            lf_frozen: false,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.d1
    }

    pub fn output_dim(&self) -> usize {
        self.d2
    }

    pub fn lf_block(&self) -> &DenseNetwork {
        &self.lf_block
    }

    pub fn hf_block(&self) -> &DenseNetwork {
        &self.hf_block
    }

    pub fn discriminator(&self) -> &DenseNetwork {
        &self.discriminator
    }

    /// Mutable access to the LF block; refused once it has been frozen.
    pub fn lf_block_mut(&mut self) -> Result<&mut DenseNetwork> {
        if self.lf_frozen {
            return Err(Error::Contract("the LF block is frozen".into()));
        }
        Ok(&mut self.lf_block)
    }

    pub(crate) fn hf_block_mut(&mut self) -> &mut DenseNetwork {
        &mut self.hf_block
    }

    pub(crate) fn discriminator_mut(&mut self) -> &mut DenseNetwork {
        &mut self.discriminator
    }

    pub fn freeze_lf(&mut self) {
        self.lf_frozen = true;
    }

    pub fn is_lf_frozen(&self) -> bool {
        self.lf_frozen
    }

    pub fn lf_checksum(&self) -> u64 {
        self.lf_block.checksum()
    }

    pub fn normalizers(&self) -> (&Normalizer, &Normalizer, &Normalizer) {
        (&self.input_norm, &self.lf_output_norm, &self.hf_output_norm)
    }

    /// Fits the input normalizer on LF inputs and one output normalizer per fidelity.
    pub fn fit_normalizers(&mut self, data: &MultiFidelityDataset, kind: NormalizerKind) -> Result<()> {
        if data.d1 != self.d1 || data.d2 != self.d2 {
            return Err(Error::Shape(format!(
                "dataset is {}->{}, model is {}->{}",
                data.d1, data.d2, self.d1, self.d2
            )));
        }
        let lf_x: Vec<Vec<f64>> = data.lf.iter().map(|s| s.x.clone()).collect();
        let lf_y: Vec<Vec<f64>> = data.lf.iter().map(|s| s.y.clone()).collect();
        let hf_y: Vec<Vec<f64>> = data.hf.iter().map(|s| s.y.clone()).collect();
        self.input_norm = fit_or_identity(kind, &lf_x)?;
        self.lf_output_norm = fit_or_identity(kind, &lf_y)?;
        self.hf_output_norm = fit_or_identity(kind, &hf_y)?;
        Ok(())
    }

    /// `cant(x, q)`: the input followed by the LF-block features.
    pub fn concat_input(x: &[f64], q: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(x.len() + q.len());
        v.extend_from_slice(x);
        v.extend_from_slice(q);
        v
    }

    /// HF-block input for a normalized `x`.
    pub fn hf_input(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let q = self.lf_block.eval(x)?;
        Ok(Self::concat_input(x, &q))
    }

    /// `G[x]` for a normalized input.
    pub fn generator_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.hf_block.eval(&self.hf_input(x)?)
    }

    pub(crate) fn generator_pass(&self, x: &[f64]) -> Result<GeneratorPass> {
        let (output, hf_tape) = self.hf_block.forward(&self.hf_input(x)?)?;
        Ok(GeneratorPass { output, hf_tape })
    }

    /// `D[y]` for a normalized response.
    pub fn discriminate(&self, y: &[f64]) -> Result<f64> {
        Ok(self.discriminator.eval(y)?[0])
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d1 {
            return Err(Error::Shape(format!(
                "model input has width {}, got {}",
                self.d1,
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model input".into()));
        }
        Ok(())
    }

    /// Mean over the batch of `||G[x] - y||^2` (normalized coordinates).
    pub fn supervised_loss(&self, batch: &[Sample]) -> Result<f64> {
        non_empty(batch.len())?;
        let mut total = 0.0;
        for s in batch {
            total += squared_distance(&self.generator_forward(&s.x)?, &s.y)?;
        }
        Ok(total / batch.len() as f64)
    }

    /// Mean over the batch of `1 - D[G[x]]`.
    pub fn generative_loss(&self, inputs: &[Vec<f64>]) -> Result<f64> {
        non_empty(inputs.len())?;
        let mut total = 0.0;
        for x in inputs {
            total += 1.0 - self.discriminate(&self.generator_forward(x)?)?;
        }
        Ok(total / inputs.len() as f64)
    }

    /// Mean of `1 - D[y]` plus mean of `D[G[x]]` over the batch.
    pub fn discriminative_loss(&self, batch: &[Sample]) -> Result<f64> {
        non_empty(batch.len())?;
        let n = batch.len() as f64;
        let mut real = 0.0;
        let mut fake = 0.0;
        for s in batch {
            real += 1.0 - self.discriminate(&s.y)?;
            fake += self.discriminate(&self.generator_forward(&s.x)?)?;
        }
        Ok(real / n + fake / n)
    }

    /// `L_S` and its gradient w.r.t. the HF block.
    pub(crate) fn supervised_gradient(&self, batch: &[Sample]) -> Result<(f64, Gradients)> {
        non_empty(batch.len())?;
        let n = batch.len() as f64;
        let mut grads = Gradients::zeros_like(&self.hf_block);
        let mut loss = 0.0;
        for s in batch {
            let pass = self.generator_pass(&s.x)?;
            loss += squared_distance(&pass.output, &s.y)?;
            let upstream: Vec<f64> = pass
                .output
                .iter()
                .zip(&s.y)
                .map(|(g, y)| 2.0 * (g - y) / n)
                .collect();
            self.hf_block.backward_into(&pass.hf_tape, &upstream, &mut grads)?;
        }
        Ok((loss / n, grads))
    }

    /// `L_D` with gradients w.r.t. the HF block and the discriminator.
    pub(crate) fn discriminative_gradient(
        &self,
        batch: &[Sample],
    ) -> Result<(f64, Gradients, Gradients)> {
        non_empty(batch.len())?;
        let n = batch.len() as f64;
        let mut hf_grads = Gradients::zeros_like(&self.hf_block);
        let mut d_grads = Gradients::zeros_like(&self.discriminator);
        let mut loss = 0.0;
        for s in batch {
            let (d_real, tape) = self.discriminator.forward(&s.y)?;
            loss += (1.0 - d_real[0]) / n;
            self.discriminator.backward_into(&tape, &[-1.0 / n], &mut d_grads)?;

            let pass = self.generator_pass(&s.x)?;
            let (d_fake, tape) = self.discriminator.forward(&pass.output)?;
            loss += d_fake[0] / n;
            let into_g = self.discriminator.backward_into(&tape, &[1.0 / n], &mut d_grads)?;
            self.hf_block.backward_into(&pass.hf_tape, &into_g, &mut hf_grads)?;
        }
        Ok((loss, hf_grads, d_grads))
    }

    /// `L_G` with gradients w.r.t. the HF block and the discriminator.
    pub(crate) fn generative_gradient(
        &self,
        inputs: &[&[f64]],
    ) -> Result<(f64, Gradients, Gradients)> {
        non_empty(inputs.len())?;
        let n = inputs.len() as f64;
        let mut hf_grads = Gradients::zeros_like(&self.hf_block);
        let mut d_grads = Gradients::zeros_like(&self.discriminator);
        let mut loss = 0.0;
        for x in inputs {
            let pass = self.generator_pass(x)?;
            let (d_fake, tape) = self.discriminator.forward(&pass.output)?;
            loss += (1.0 - d_fake[0]) / n;
            let into_g = self.discriminator.backward_into(&tape, &[-1.0 / n], &mut d_grads)?;
            self.hf_block.backward_into(&pass.hf_tape, &into_g, &mut hf_grads)?;
        }
        Ok((loss, hf_grads, d_grads))
    }

    /// HF-response predictions in original units.
    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        inputs
            .iter()
            .map(|x| {
                self.check_input(x)?;
                let z = self.input_norm.transform(x)?;
                let g = self.generator_forward(&z)?;
                self.hf_output_norm.inverse_transform(&g)
            })
            .collect()
    }

    pub fn to_checkpoint(&self, config: &TrainingConfig) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_FORMAT_VERSION,
            d1: self.d1,
            d2: self.d2,
            lf_block: self.lf_block.clone(),
            hf_block: self.hf_block.clone(),
            discriminator: self.discriminator.clone(),
            input_normalizer: self.input_norm.clone(),
            lf_output_normalizer: self.lf_output_norm.clone(),
            hf_output_normalizer: self.hf_output_norm.clone(),
            lf_frozen: self.lf_frozen,
            seed: config.seed,
            config: config.clone(),
        }
    }

    pub fn from_checkpoint(ckpt: Checkpoint) -> Result<(Self, TrainingConfig)> {
        if ckpt.version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported checkpoint version {}",
                ckpt.version
            )));
        }
        let mut model = Self::from_networks(ckpt.lf_block, ckpt.hf_block, ckpt.discriminator)?;
        if model.d1 != ckpt.d1 || model.d2 != ckpt.d2 {
            return Err(Error::Shape("checkpoint widths disagree with its networks".into()));
        }
        for (norm, width) in [
            (&ckpt.input_normalizer, model.d1),
            (&ckpt.lf_output_normalizer, model.d2),
            (&ckpt.hf_output_normalizer, model.d2),
        ] {
            if norm.width() != width {
                return Err(Error::Shape("checkpoint normalizer width mismatch".into()));
            }
        }
        model.input_norm = ckpt.input_normalizer;
        model.lf_output_norm = ckpt.lf_output_normalizer;
        model.hf_output_norm = ckpt.hf_output_normalizer;
        model.lf_frozen = ckpt.lf_frozen;
        Ok((model, ckpt.config))
    }
}

/// Everything needed to restore a trained model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub d1: usize,
    pub d2: usize,
    pub lf_block: DenseNetwork,
    pub hf_block: DenseNetwork,
    pub discriminator: DenseNetwork,
    pub input_normalizer: Normalizer,
    pub lf_output_normalizer: Normalizer,
    pub hf_output_normalizer: Normalizer,
    pub lf_frozen: bool,
    pub config: TrainingConfig,
    pub seed: u64,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        crate::data::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound {
                path: path.to_path_buf(),
            },
            _ => Error::Io(e),
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn fit_or_identity(kind: NormalizerKind, rows: &[Vec<f64>]) -> Result<Normalizer> {
    // A standard normalizer needs two rows; a single HF sample is left unscaled.
    if kind == NormalizerKind::Standard && rows.len() < 2 {
        log::warn!("only {} row(s); skipping standard normalization", rows.len());
        return Ok(Normalizer::identity(rows.first().map_or(0, Vec::len)));
    }
    Normalizer::fit(kind, rows)
}

fn non_empty(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("loss needs a non-empty batch".into()));
    }
    Ok(())
}

fn squared_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "response has width {}, target has {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{TrainingConfig, TrainingMode};
use super::gan::GanMdfModel;
use crate::data::{MultiFidelityDataset, Sample};
use crate::nn::{AdamState, DenseNetwork, Gradients};
use crate::rng::{stream, stream_rng};
use crate::{Error, Result};

/// Losses observed during one adversarial iteration, each measured just
/// before the stage that minimizes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub iteration: usize,
    pub supervised: f64,
    pub generative: f64,
    pub discriminative: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossTrace(pub Vec<LossRecord>);

impl LossTrace {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iteration", "L_S", "L_G", "L_D"])?;
        for r in &self.0 {
            w.write_record([
                r.iteration.to_string(),
                crate::data::format_float(r.supervised),
                crate::data::format_float(r.generative),
                crate::data::format_float(r.discriminative),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&LossRecord> {
        self.0.last()
    }
}

/// One Adam state per (parameter block, loss) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialOptimizers {
    pub hf_supervised: AdamState,
    pub hf_discriminative: AdamState,
    pub hf_generative: AdamState,
    pub disc_discriminative: AdamState,
    pub disc_generative: AdamState,
}

impl AdversarialOptimizers {
    pub fn new(model: &GanMdfModel) -> Self {
        let hf = AdamState::for_network(model.hf_block());
        let d = AdamState::for_network(model.discriminator());
        AdversarialOptimizers {
            hf_supervised: hf.clone(),
            hf_discriminative: hf.clone(),
            hf_generative: hf,
            disc_discriminative: d.clone(),
            disc_generative: d,
        }
    }
}

/// Summary of a full training run.
#[derive(Debug, Clone)]
pub struct TrainingReport {
    pub lf_mse: f64,
    pub trace: LossTrace,
    pub lf_checksum_before: u64,
    pub lf_checksum_after: u64,
}

fn diverged(phase: &'static str, step: String, loss: &'static str) -> Error {
    Error::Diverged { phase, step, loss }
}

fn ensure_finite(value: f64, iteration: usize, loss: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(diverged("adversarial training", format!("iteration {iteration}"), loss))
    }
}

/// Minibatch mean-squared-error fit of a regression network with Adam.
/// Returns the final MSE over all samples.
pub(crate) fn fit_regression(
    net: &mut DenseNetwork,
    samples: &[Sample],
    lr: f64,
    epochs: usize,
    batch_cap: usize,
    shuffle_seed: u64,
    phase: &'static str,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(format!("{phase}: no training samples")));
    }
    let batch = batch_cap.min(samples.len()).max(1);
    let mut state = AdamState::for_network(net);
    let mut rng = stream_rng(shuffle_seed, stream::SHUFFLE_LF);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    for epoch in 0..epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let n = chunk.len() as f64;
            let mut grads = Gradients::zeros_like(net);
            for &i in chunk {
                let s = &samples[i];
                let (out, tape) = net.forward(&s.x)?;
                let upstream: Vec<f64> = out
                    .iter()
                    .zip(&s.y)
                    .map(|(o, y)| {
                        epoch_loss += (o - y) * (o - y);
                        2.0 * (o - y) / n
                    })
                    .collect();
                net.backward_into(&tape, &upstream, &mut grads)?;
            }
            if !epoch_loss.is_finite() {
                return Err(diverged(phase, format!("epoch {epoch}"), "MSE"));
            }
            net.adam_step(&grads, &mut state, lr)
                .map_err(|_| diverged(phase, format!("epoch {epoch}"), "MSE gradient"))?;
        }
    }
    let mut total = 0.0;
    for s in samples {
        let out = net.eval(&s.x)?;
        total += out.iter().zip(&s.y).map(|(o, y)| (o - y) * (o - y)).sum::<f64>();
    }
    let mse = total / samples.len() as f64;
    if !mse.is_finite() {
        return Err(diverged(phase, format!("epoch {epochs}"), "MSE"));
    }
    Ok(mse)
}

impl GanMdfModel {
    /// Fits the LF block to the LF samples (original units) and freezes it.
    /// Returns the final mean squared error in normalized units.
    pub fn pretrain_lf(&mut self, lf: &[Sample], config: &TrainingConfig) -> Result<f64> {
        if lf.is_empty() {
            return Err(Error::InvalidArgument("LF sample set is empty".into()));
        }
        let normalized = lf
            .iter()
            .map(|s| {
                Ok(Sample {
                    x: self.input_norm.transform(&s.x)?,
                    y: self.lf_output_norm.transform(&s.y)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (lr, epochs, cap, seed) = (
            config.eta_lf,
            config.epochs_lf,
            config.lf_batch_cap,
            config.seed,
        );
        let mse = fit_regression(
            self.lf_block_mut()?,
            &normalized,
            lr,
            epochs,
            cap,
            seed,
            "LF pretraining",
        )?;
        self.freeze_lf();
        Ok(mse)
    }

    /// Normalizes HF samples into training coordinates.
    pub fn normalize_hf(&self, hf: &[Sample]) -> Result<Vec<Sample>> {
        hf.iter()
            .map(|s| {
                Ok(Sample {
                    x: self.input_norm.transform(&s.x)?,
                    y: self.hf_output_norm.transform(&s.y)?,
                })
            })
            .collect()
    }

    /// Adversarial phase on HF samples given in original units.
    ///
    /// Each epoch shuffles the HF set and cuts it into batches of
    /// `min(hf_batch_cap, I_H)`; every batch is one iteration of
    /// [`adversarial_iteration`](Self::adversarial_iteration).
    pub fn train_adversarial(&mut self, hf: &[Sample], config: &TrainingConfig) -> Result<LossTrace> {
        config.validate()?;
        if !self.is_lf_frozen() {
            return Err(Error::Contract(
                "the LF block must be pretrained and frozen before adversarial training".into(),
            ));
        }
        if hf.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "adversarial training needs at least 2 HF samples, got {}",
                hf.len()
            )));
        }
        let samples = self.normalize_hf(hf)?;
        let checksum = self.lf_checksum();
        let mut optimizers = AdversarialOptimizers::new(self);
        let mut rng = stream_rng(config.seed, stream::SHUFFLE_HF);
        let batch_size = config.hf_batch_size(samples.len());
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut trace = Vec::new();
        let mut batch = Vec::with_capacity(batch_size);
        for _ in 0..config.epochs_hf {
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch_size) {
                batch.clear();
                batch.extend(chunk.iter().map(|&i| samples[i].clone()));
                let k = trace.len() + 1;
                trace.push(self.adversarial_iteration(&batch, k, config, &mut optimizers)?);
            }
        }
        if self.lf_checksum() != checksum {
            return Err(Error::Contract("LF block changed during adversarial training".into()));
        }
        Ok(LossTrace(trace))
    }

    /// One pass of the five-stage schedule on a normalized batch:
    ///
    /// 1. supervised step on the HF block (`eta_s`)
    /// 2. discriminative step (`eta_d`)
    /// 3. supervised step on the HF block
    /// 4. generative step (`eta_g`)
    /// 5. supervised step on the HF block
    ///
    /// Supervised stages are skipped when `config.supervised` is off. Which
    /// networks stages 2 and 4 touch depends on `config.mode`.
    pub fn adversarial_iteration(
        &mut self,
        batch: &[Sample],
        iteration: usize,
        config: &TrainingConfig,
        opt: &mut AdversarialOptimizers,
    ) -> Result<LossRecord> {
        if !self.is_lf_frozen() {
            return Err(Error::Contract("adversarial update with an unfrozen LF block".into()));
        }
        let supervised = if config.supervised {
            self.supervised_stage(batch, iteration, config.eta_s, &mut opt.hf_supervised)?
        } else {
            ensure_finite(self.supervised_loss(batch)?, iteration, "L_S")?
        };

        let (l_d, g_hf, g_d) = self.discriminative_gradient(batch)?;
        ensure_finite(l_d, iteration, "L_D")?;
        if config.mode == TrainingMode::PaperFaithful {
            self.hf_block_mut()
                .adam_step(&g_hf, &mut opt.hf_discriminative, config.eta_d)?;
        }
        self.discriminator_mut()
            .adam_step(&g_d, &mut opt.disc_discriminative, config.eta_d)?;

        if config.supervised {
            self.supervised_stage(batch, iteration, config.eta_s, &mut opt.hf_supervised)?;
        }

        let inputs: Vec<&[f64]> = batch.iter().map(|s| s.x.as_slice()).collect();
        let (l_g, g_hf, g_d) = self.generative_gradient(&inputs)?;
        ensure_finite(l_g, iteration, "L_G")?;
        self.hf_block_mut()
            .adam_step(&g_hf, &mut opt.hf_generative, config.eta_g)?;
        if config.mode == TrainingMode::PaperFaithful {
            self.discriminator_mut()
                .adam_step(&g_d, &mut opt.disc_generative, config.eta_g)?;
        }

        if config.supervised {
            self.supervised_stage(batch, iteration, config.eta_s, &mut opt.hf_supervised)?;
        }

        Ok(LossRecord {
            iteration,
            supervised,
            generative: l_g,
            discriminative: l_d,
        })
    }

    fn supervised_stage(
        &mut self,
        batch: &[Sample],
        iteration: usize,
        lr: f64,
        state: &mut AdamState,
    ) -> Result<f64> {
        let (loss, grads) = self.supervised_gradient(batch)?;
        ensure_finite(loss, iteration, "L_S")?;
        self.hf_block_mut().adam_step(&grads, state, lr)?;
        Ok(loss)
    }
}

/// Builds, normalizes, pretrains and adversarially trains a model on `data`.
pub fn train(data: &MultiFidelityDataset, config: &TrainingConfig) -> Result<(GanMdfModel, TrainingReport)> {
    config.validate()?;
    let mut model = GanMdfModel::new(data.d1, data.d2, &config.architecture, config.seed)?;
    model.fit_normalizers(data, config.normalizer)?;
    let lf_mse = model.pretrain_lf(&data.lf, config)?;
    let before = model.lf_checksum();
    let trace = model.train_adversarial(&data.hf, config)?;
    let after = model.lf_checksum();
    Ok((
        model,
        TrainingReport {
            lf_mse,
            trace,
            lf_checksum_before: before,
            lf_checksum_after: after,
        },
    ))
}

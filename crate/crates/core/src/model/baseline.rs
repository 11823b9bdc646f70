use super::config::TrainingConfig;
use super::train::fit_regression;
use crate::data::{MultiFidelityDataset, Normalizer, NormalizerKind, Sample};
use crate::nn::{ActivationKind, DenseNetwork};
use crate::rng::{derive_seed, stream, stream_rng};
use crate::Result;

/// Plain regression network fitted to the HF samples alone.
///
/// Uses the HF block's hidden layout (without the LF features) and the
/// LF-pretraining learning rate and epoch budget.
#[derive(Debug, Clone)]
pub struct HfOnlyModel {
    net: DenseNetwork,
    input_norm: Normalizer,
    output_norm: Normalizer,
}

impl HfOnlyModel {
    pub fn fit(data: &MultiFidelityDataset, config: &TrainingConfig) -> Result<Self> {
        config.validate()?;
        let arch = &config.architecture;
        let sizes: Vec<usize> = std::iter::once(data.d1)
            .chain(arch.hf_hidden.iter().copied())
            .chain(std::iter::once(data.d2))
            .collect();
        let mut net = DenseNetwork::new(
            &sizes,
            &arch.hf_activations,
            ActivationKind::Identity,
            &mut stream_rng(config.seed, stream::BASELINE),
        )?;
        let lf_x: Vec<Vec<f64>> = data.lf_inputs();
        let hf_y: Vec<Vec<f64>> = data.hf.iter().map(|s| s.y.clone()).collect();
        let input_norm = Normalizer::fit(config.normalizer, &lf_x)?;
        let output_norm = if config.normalizer == NormalizerKind::Standard && hf_y.len() < 2 {
            Normalizer::identity(data.d2)
        } else {
            Normalizer::fit(config.normalizer, &hf_y)?
        };
        let samples = data
            .hf
            .iter()
            .map(|s| {
                Ok(Sample {
                    x: input_norm.transform(&s.x)?,
                    y: output_norm.transform(&s.y)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        fit_regression(
            &mut net,
            &samples,
            config.eta_lf,
            config.epochs_lf,
            config.hf_batch_cap,
            derive_seed(config.seed, stream::BASELINE),
            "HF-only fit",
        )?;
        Ok(HfOnlyModel {
            net,
            input_norm,
            output_norm,
        })
    }

    pub fn network(&self) -> &DenseNetwork {
        &self.net
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        inputs
            .iter()
            .map(|x| {
                let z = self.input_norm.transform(x)?;
                self.output_norm.inverse_transform(&self.net.eval(&z)?)
            })
            .collect()
    }
}

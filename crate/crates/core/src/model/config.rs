use serde::{Deserialize, Serialize};

use crate::data::NormalizerKind;
use crate::nn::ActivationKind;
use crate::{Error, Result};

/// Which parameter blocks the adversarial losses update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingMode {
    /// Minimizing `L_D` steps both the HF block and the discriminator, and so
    /// does minimizing `L_G`, in the order of the five-stage schedule.
    #[default]
    PaperFaithful,
    /// `L_D` updates only the discriminator, `L_G` only the HF block.
    StandardGan,
}

impl std::str::FromStr for TrainingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-faithful" | "paper" => Ok(TrainingMode::PaperFaithful),
            "standard-gan" | "standard" => Ok(TrainingMode::StandardGan),
            other => Err(Error::InvalidArgument(format!("unknown training mode `{other}`"))),
        }
    }
}

/// Hidden layer widths and activations for the three networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Architecture {
    pub lf_hidden: Vec<usize>,
    pub lf_activations: Vec<ActivationKind>,
    pub hf_hidden: Vec<usize>,
    pub hf_activations: Vec<ActivationKind>,
    pub disc_hidden: Vec<usize>,
    pub disc_activations: Vec<ActivationKind>,
}

impl Default for Architecture {
    fn default() -> Self {
        Self::uniform(&[ActivationKind::Sigmoid, ActivationKind::Sigmoid])
    }
}

impl Architecture {
    /// Width-32 hidden layers, one per activation, shared by all three networks.
    pub fn uniform(activations: &[ActivationKind]) -> Self {
        let hidden = vec![32; activations.len()];
        Architecture {
            lf_hidden: hidden.clone(),
            lf_activations: activations.to_vec(),
            hf_hidden: hidden.clone(),
            hf_activations: activations.to_vec(),
            disc_hidden: hidden,
            disc_activations: activations.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, hidden, acts) in [
            ("lf", &self.lf_hidden, &self.lf_activations),
            ("hf", &self.hf_hidden, &self.hf_activations),
            ("disc", &self.disc_hidden, &self.disc_activations),
        ] {
            if hidden.len() != acts.len() {
                return Err(Error::Config(format!(
                    "{name} block has {} hidden layers but {} activations",
                    hidden.len(),
                    acts.len()
                )));
            }
            if hidden.contains(&0) {
                return Err(Error::Config(format!("{name} block has a zero-width layer")));
            }
            for a in acts.iter() {
                a.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Learning rates, schedule lengths and switches for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    /// Adam rate for LF-block pretraining.
    pub eta_lf: f64,
    /// Adam rate for the discriminative loss.
    pub eta_d: f64,
    /// Adam rate for the generative loss.
    pub eta_g: f64,
    /// Adam rate for the supervised refinement steps.
    pub eta_s: f64,
    pub epochs_lf: usize,
    /// Full passes over the HF set; one pass is one adversarial iteration
    /// while the HF set fits in a single batch.
    pub epochs_hf: usize,
    pub lf_batch_cap: usize,
    pub hf_batch_cap: usize,
    pub mode: TrainingMode,
    /// Interleave the supervised steps. Off gives the pure adversarial ablation.
    pub supervised: bool,
    pub normalizer: NormalizerKind,
    pub architecture: Architecture,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            eta_lf: 0.03,
            eta_d: 0.002,
            eta_g: 0.001,
            eta_s: 0.05,
            epochs_lf: 4000,
            epochs_hf: 350,
            lf_batch_cap: 32,
            hf_batch_cap: 32,
            mode: TrainingMode::PaperFaithful,
            supervised: true,
            normalizer: NormalizerKind::None,
            architecture: Architecture::default(),
            seed: 0,
        }
    }
}

/// One row of the reference settings table.
struct ReferenceRow {
    eta_lf: f64,
    eta_d: f64,
    eta_g: f64,
    eta_s: f64,
    epochs_lf: usize,
    epochs_hf: usize,
    activations: &'static [ActivationKind],
    normalizer: NormalizerKind,
}

const SIG: ActivationKind = ActivationKind::Sigmoid;
const LEAKY: ActivationKind = ActivationKind::LeakyRelu {
    alpha: crate::nn::DEFAULT_LEAKY_SLOPE,
};

#[rustfmt::skip]
const REFERENCE_ROWS: [ReferenceRow; 10] = [
    ReferenceRow { eta_lf: 0.03, eta_d: 0.002, eta_g: 0.001, eta_s: 0.05, epochs_lf: 4000, epochs_hf: 350, activations: &[SIG, SIG], normalizer: NormalizerKind::None },
    ReferenceRow { eta_lf: 0.1, eta_d: 0.002, eta_g: 0.001, eta_s: 0.05, epochs_lf: 4000, epochs_hf: 1500, activations: &[SIG, ActivationKind::Dft], normalizer: NormalizerKind::MinMax },
    ReferenceRow { eta_lf: 0.1, eta_d: 0.002, eta_g: 0.001, eta_s: 0.05, epochs_lf: 3300, epochs_hf: 1500, activations: &[SIG, SIG], normalizer: NormalizerKind::Standard },
    ReferenceRow { eta_lf: 0.04, eta_d: 0.002, eta_g: 0.001, eta_s: 0.05, epochs_lf: 5000, epochs_hf: 2000, activations: &[SIG, LEAKY, ActivationKind::InverseMultiquadratic], normalizer: NormalizerKind::MinMax },
    ReferenceRow { eta_lf: 0.03, eta_d: 0.002, eta_g: 0.001, eta_s: 0.03, epochs_lf: 4000, epochs_hf: 1100, activations: &[SIG, SIG], normalizer: NormalizerKind::MinMax },
    ReferenceRow { eta_lf: 0.03, eta_d: 0.001, eta_g: 0.0005, eta_s: 0.003, epochs_lf: 1200, epochs_hf: 1100, activations: &[SIG, SIG], normalizer: NormalizerKind::Standard },
    ReferenceRow { eta_lf: 0.005, eta_d: 0.002, eta_g: 0.001, eta_s: 0.01, epochs_lf: 1000, epochs_hf: 1000, activations: &[SIG, SIG], normalizer: NormalizerKind::None },
    ReferenceRow { eta_lf: 0.01, eta_d: 0.002, eta_g: 0.001, eta_s: 0.05, epochs_lf: 500, epochs_hf: 900, activations: &[SIG, SIG], normalizer: NormalizerKind::MinMax },
    ReferenceRow { eta_lf: 0.01, eta_d: 0.002, eta_g: 0.001, eta_s: 0.05, epochs_lf: 1500, epochs_hf: 1500, activations: &[SIG, ActivationKind::Ricker], normalizer: NormalizerKind::MinMax },
    ReferenceRow { eta_lf: 0.05, eta_d: 0.002, eta_g: 0.001, eta_s: 0.03, epochs_lf: 4000, epochs_hf: 1000, activations: &[SIG, SIG], normalizer: NormalizerKind::MinMax },
];

impl TrainingConfig {
    /// Reference settings for problem `problem` (1..=10): learning
    /// rates, epoch counts, hidden activations and normalizer.
    pub fn reference(problem: usize) -> Result<Self> {
        let row = problem
            .checked_sub(1)
            .and_then(|i| REFERENCE_ROWS.get(i))
            .ok_or_else(|| Error::Config(format!("no reference settings for problem {problem}")))?;
        Ok(TrainingConfig {
            eta_lf: row.eta_lf,
            eta_d: row.eta_d,
            eta_g: row.eta_g,
            eta_s: row.eta_s,
            epochs_lf: row.epochs_lf,
            epochs_hf: row.epochs_hf,
            normalizer: row.normalizer,
            architecture: Architecture::uniform(row.activations),
            ..TrainingConfig::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta_lf", self.eta_lf), ("eta_s", self.eta_s)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        // Zero adversarial rates are accepted; they switch those stages off.
        for (name, v) in [("eta_d", self.eta_d), ("eta_g", self.eta_g)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.lf_batch_cap == 0 || self.hf_batch_cap == 0 {
            return Err(Error::Config("batch caps must be at least 1".into()));
        }
        self.architecture.validate()?;
        if self.eta_d > 0.0 && self.eta_g > 0.0 && self.eta_d <= self.eta_g {
            log::warn!(
                "eta_d ({}) is not larger than eta_g ({}); adversarial training may be unstable",
                self.eta_d,
                self.eta_g
            );
        }
        Ok(())
    }

    /// HF mini-batch size, `min(hf_batch_cap, hf_count)`.
    pub fn hf_batch_size(&self, hf_count: usize) -> usize {
        self.hf_batch_cap.min(hf_count).max(1)
    }
}

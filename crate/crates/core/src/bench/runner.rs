use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions::BenchmarkPair;
use super::metric::nrmse;
use crate::data::{format_float, lhs_sample, write_json, write_rows, MultiFidelityDataset};
use crate::model::{train, HfOnlyModel, TrainingConfig};
use crate::rng::{stream, stream_rng};
use crate::{Error, Result};

pub const DEFAULT_TEST_SIZE: usize = 1000;
pub const DEFAULT_REPEATS: usize = 10;

/// Repetition settings shared by every runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub repeats: usize,
    pub test_size: usize,
    /// Repeat `r` uses seed `base_seed + r`.
    pub base_seed: u64,
    pub nested: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            repeats: DEFAULT_REPEATS,
            test_size: DEFAULT_TEST_SIZE,
            base_seed: 0,
            nested: false,
        }
    }
}

impl Protocol {
    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("at least one repeat is required".into()));
        }
        if self.test_size == 0 {
            return Err(Error::InvalidArgument("test set size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(|r| self.base_seed.wrapping_add(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    GanMdf,
    /// Supervised refinement disabled.
    PureGan,
    HfOnly,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::GanMdf => "gan-mdf",
            Variant::PureGan => "pgan",
            Variant::HfOnly => "hf-only",
        }
    }
}

/// Outcome of one training/evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub nrmse: Option<f64>,
    pub error: Option<String>,
    /// LF-block checksum identical before and after the adversarial phase.
    /// Always true for variants without an LF block.
    pub lf_frozen: bool,
    #[serde(skip)]
    pub wall_ms: f64,
}

/// Per-seed records for one `(benchmark, variant, I_L, I_H)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub benchmark: String,
    pub variant: Variant,
    pub lf_count: usize,
    pub hf_count: usize,
    pub runs: Vec<RunRecord>,
    /// Mean over successful runs; NaN when none succeeded.
    pub mean_nrmse: f64,
    /// Some repeats failed and are excluded from the mean.
    pub partial: bool,
}

impl ExperimentResult {
    fn aggregate(
        pair: &BenchmarkPair,
        variant: Variant,
        lf_count: usize,
        hf_count: usize,
        runs: Vec<RunRecord>,
    ) -> Self {
        let ok: Vec<f64> = runs.iter().filter_map(|r| r.nrmse).collect();
        let mean = if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().sum::<f64>() / ok.len() as f64
        };
        ExperimentResult {
            benchmark: pair.name.to_string(),
            variant,
            lf_count,
            hf_count,
            partial: ok.len() != runs.len(),
            runs,
            mean_nrmse: mean,
        }
    }

    pub fn nrmse_values(&self) -> Vec<f64> {
        self.runs.iter().filter_map(|r| r.nrmse).collect()
    }

    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.nrmse.is_none()).count()
    }

    pub fn all_lf_frozen(&self) -> bool {
        self.runs.iter().all(|r| r.lf_frozen)
    }
}

/// Mean-NRMSE triple from [`run_baselines`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub gan_mdf: ExperimentResult,
    pub pgan: ExperimentResult,
    pub hf_only: ExperimentResult,
}

impl Comparison {
    pub fn results(&self) -> [&ExperimentResult; 3] {
        [&self.gan_mdf, &self.pgan, &self.hf_only]
    }
}

struct Trial {
    data: MultiFidelityDataset,
    test_x: Vec<Vec<f64>>,
    test_y: Vec<Vec<f64>>,
    config: TrainingConfig,
}

impl Trial {
    fn new(
        pair: &BenchmarkPair,
        lf_count: usize,
        hf_count: usize,
        config: &TrainingConfig,
        protocol: &Protocol,
        seed: u64,
    ) -> Result<Self> {
        let data = MultiFidelityDataset::from_pair(pair, lf_count, hf_count, seed, protocol.nested)?;
        let test_x = lhs_sample(
            protocol.test_size,
            &pair.bounds,
            &mut stream_rng(seed, stream::TEST_DESIGN),
        )?;
        let test_y = test_x.iter().map(|x| vec![pair.hf(x)]).collect();
        Ok(Trial {
            data,
            test_x,
            test_y,
            config: TrainingConfig {
                seed,
                ..config.clone()
            },
        })
    }

    fn run(&self, variant: Variant) -> RunRecord {
        let start = Instant::now();
        let outcome = self.evaluate(variant);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok((value, lf_frozen)) => RunRecord {
                seed: self.config.seed,
                nrmse: Some(value),
                error: None,
                lf_frozen,
                wall_ms,
            },
            Err(e) => {
                log::warn!("{} seed {} failed: {e}", variant.label(), self.config.seed);
                RunRecord {
                    seed: self.config.seed,
                    nrmse: None,
                    error: Some(e.to_string()),
                    lf_frozen: true,
                    wall_ms,
                }
            }
        }
    }

    fn evaluate(&self, variant: Variant) -> Result<(f64, bool)> {
        match variant {
            Variant::GanMdf | Variant::PureGan => {
                let config = TrainingConfig {
                    supervised: variant == Variant::GanMdf,
                    ..self.config.clone()
                };
                let (model, report) = train(&self.data, &config)?;
                let pred = model.predict(&self.test_x)?;
                let frozen = report.lf_checksum_before == report.lf_checksum_after;
                Ok((nrmse(&self.test_y, &pred)?, frozen))
            }
            Variant::HfOnly => {
                let model = HfOnlyModel::fit(&self.data, &self.config)?;
                Ok((nrmse(&self.test_y, &model.predict(&self.test_x)?)?, true))
            }
        }
    }
}

fn run_variants(
    pair: &BenchmarkPair,
    lf_count: usize,
    hf_count: usize,
    config: &TrainingConfig,
    protocol: &Protocol,
    variants: &[Variant],
) -> Result<Vec<ExperimentResult>> {
    protocol.validate()?;
    config.validate()?;
    let seeds: Vec<u64> = protocol.seeds().collect();
    // Repeats are independent; collect keeps seed order regardless of scheduling.
    let per_seed: Vec<Vec<RunRecord>> = seeds
        .par_iter()
        .map(|&seed| {
            let trial = Trial::new(pair, lf_count, hf_count, config, protocol, seed)?;
            Ok(variants.iter().map(|&v| trial.run(v)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(variants
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let runs = per_seed.iter().map(|r| r[i].clone()).collect();
            ExperimentResult::aggregate(pair, v, lf_count, hf_count, runs)
        })
        .collect())
}

/// Trains and scores GAN-MDF once per repeat.
pub fn run_experiment(
    pair: &BenchmarkPair,
    lf_count: usize,
    hf_count: usize,
    config: &TrainingConfig,
    protocol: &Protocol,
) -> Result<ExperimentResult> {
    let mut r = run_variants(pair, lf_count, hf_count, config, protocol, &[Variant::GanMdf])?;
    Ok(r.remove(0))
}

/// Fixed `I_L`, varying `I_H`.
pub fn run_hf_sweep(
    pair: &BenchmarkPair,
    lf_count: usize,
    hf_grid: &[usize],
    config: &TrainingConfig,
    protocol: &Protocol,
) -> Result<Vec<ExperimentResult>> {
    hf_grid
        .iter()
        .map(|&h| run_experiment(pair, lf_count, h, config, protocol))
        .collect()
}

/// Default LF grid: `100d, 80d, 60d, 40d, 20d`.
pub fn default_lf_grid(d1: usize) -> Vec<usize> {
    [100, 80, 60, 40, 20].iter().map(|m| m * d1).collect()
}

/// Fixed `I_H`, varying `I_L`.
pub fn run_lf_sweep(
    pair: &BenchmarkPair,
    lf_grid: &[usize],
    hf_count: usize,
    config: &TrainingConfig,
    protocol: &Protocol,
) -> Result<Vec<ExperimentResult>> {
    lf_grid
        .iter()
        .map(|&l| run_experiment(pair, l, hf_count, config, protocol))
        .collect()
}

/// GAN-MDF, the unsupervised ablation and an HF-only network, each trained on
/// the same per-seed datasets and scored on the same test points.
pub fn run_baselines(
    pair: &BenchmarkPair,
    lf_count: usize,
    hf_count: usize,
    config: &TrainingConfig,
    protocol: &Protocol,
) -> Result<Comparison> {
    let mut r = run_variants(
        pair,
        lf_count,
        hf_count,
        config,
        protocol,
        &[Variant::GanMdf, Variant::PureGan, Variant::HfOnly],
    )?;
    let hf_only = r.pop().unwrap();
    let pgan = r.pop().unwrap();
    let gan_mdf = r.pop().unwrap();
    Ok(Comparison {
        gan_mdf,
        pgan,
        hf_only,
    })
}

/// Paired `(y_lf, y_hf)` responses on a Latin hypercube design.
pub fn emit_correlation_scatter(pair: &BenchmarkPair, n_points: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let xs = lhs_sample(n_points, &pair.bounds, &mut stream_rng(seed, stream::SCATTER))?;
    Ok(xs.iter().map(|x| (pair.lf(x), pair.hf(x))).collect())
}

pub fn write_scatter_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let rows: Vec<Vec<f64>> = points.iter().map(|&(l, h)| vec![l, h]).collect();
    write_rows(path, &["y_lf", "y_hf"], &rows)
}

fn nrmse_field(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), format_float)
}

/// Per-seed rows: `benchmark,I_L,I_H,seed,nrmse,wall_ms`, with a leading
/// `variant` column when `with_variant` is set.
pub fn write_runs_csv(path: &Path, results: &[&ExperimentResult], with_variant: bool) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["benchmark", "I_L", "I_H", "seed", "nrmse", "wall_ms"];
    if with_variant {
        header.insert(0, "variant");
    }
    w.write_record(&header)?;
    for res in results {
        for run in &res.runs {
            let mut row = vec![
                res.benchmark.clone(),
                res.lf_count.to_string(),
                res.hf_count.to_string(),
                run.seed.to_string(),
                nrmse_field(run.nrmse),
                format!("{:.3}", run.wall_ms),
            ];
            if with_variant {
                row.insert(0, res.variant.label().to_string());
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per cell: `variant,benchmark,I_L,I_H,mean_nrmse,runs,failed`.
pub fn write_summary_csv(path: &Path, results: &[&ExperimentResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["variant", "benchmark", "I_L", "I_H", "mean_nrmse", "runs", "failed"])?;
    for res in results {
        w.write_record([
            res.variant.label().to_string(),
            res.benchmark.clone(),
            res.lf_count.to_string(),
            res.hf_count.to_string(),
            format_float(res.mean_nrmse),
            res.runs.len().to_string(),
            res.failures().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    variant: Variant,
    lf_count: usize,
    hf_count: usize,
    mean_nrmse: Option<f64>,
    partial: bool,
    runs: &'a [RunRecord],
}

#[derive(Serialize)]
struct Summary<'a> {
    benchmark: &'a str,
    protocol: &'a Protocol,
    rows: Vec<SummaryRow<'a>>,
}

/// JSON summary with one row per `(variant, I_L, I_H)` cell, excluding wall-clock times.
pub fn write_summary_json(
    path: &Path,
    benchmark: &str,
    protocol: &Protocol,
    results: &[&ExperimentResult],
) -> Result<()> {
    let rows = results
        .iter()
        .map(|r| SummaryRow {
            variant: r.variant,
            lf_count: r.lf_count,
            hf_count: r.hf_count,
            mean_nrmse: r.mean_nrmse.is_finite().then_some(r.mean_nrmse),
            partial: r.partial,
            runs: &r.runs,
        })
        .collect();
    write_json(
        path,
        &Summary {
            benchmark,
            protocol,
            rows,
        },
    )
}

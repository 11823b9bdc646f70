//! `gan-mdf` command-line front end.
//!
//! Training settings are layered: the benchmark's defaults, then `--preset`,
//! then the TOML file given by `--config`, then individual flags.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchmarkPair, ExperimentResult, Protocol};
use crate::data::{
    format_float, lhs_sample, load_csv, read_numeric_rows, write_rows, MultiFidelityDataset,
    NormalizerKind,
};
use crate::model::{train, Architecture, Checkpoint, GanMdfModel, TrainingConfig, TrainingMode};
use crate::nn::ActivationKind;
use crate::rng::{stream, stream_rng};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "gan-mdf", version, about = "Multi-fidelity surrogate modeling with GAN-MDF")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model and write its checkpoint and loss trace.
    Train(TrainArgs),
    /// Predict HF responses for the inputs in a CSV file.
    Predict(PredictArgs),
    /// Repeated runs over a grid of HF sample counts.
    SweepHf(SweepHfArgs),
    /// Repeated runs over a grid of LF sample counts.
    SweepLf(SweepLfArgs),
    /// GAN-MDF against the unsupervised ablation and an HF-only network.
    Baselines(BaselineArgs),
    /// Paired LF/HF responses on a Latin hypercube design.
    Scatter(ScatterArgs),
    /// Registered benchmark pairs and their dimensions.
    ListBenchmarks,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Registered benchmark pair.
    #[arg(long, conflicts_with_all = ["csv_lf", "csv_hf"], required_unless_present = "csv_lf")]
    pub benchmark: Option<String>,
    /// LF samples, one `x..,y..` row each.
    #[arg(long, requires = "csv_hf")]
    pub csv_lf: Option<PathBuf>,
    /// HF samples, one `x..,y..` row each.
    #[arg(long, requires = "csv_lf")]
    pub csv_hf: Option<PathBuf>,
    /// Input width of the CSV rows.
    #[arg(long, default_value_t = 1)]
    pub d1: usize,
    /// Output width of the CSV rows.
    #[arg(long, default_value_t = 1)]
    pub d2: usize,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Base seed; repeat `r` uses `seed + r`.
    #[arg(long, env = "MDFGAN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output directory for all artifacts.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct TrainingArgs {
    /// TOML file with training settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start from built-in reference settings 1..=10.
    #[arg(long)]
    pub preset: Option<usize>,
    #[arg(long)]
    pub eta_lf: Option<f64>,
    #[arg(long)]
    pub eta_d: Option<f64>,
    #[arg(long)]
    pub eta_g: Option<f64>,
    #[arg(long)]
    pub eta_s: Option<f64>,
    #[arg(long)]
    pub epochs_lf: Option<usize>,
    #[arg(long)]
    pub epochs_hf: Option<usize>,
    #[arg(long)]
    pub lf_batch_cap: Option<usize>,
    #[arg(long)]
    pub hf_batch_cap: Option<usize>,
    /// `paper-faithful` or `standard-gan`.
    #[arg(long)]
    pub mode: Option<TrainingMode>,
    /// Disable the interleaved supervised steps (pure adversarial ablation).
    #[arg(long)]
    pub no_supervised: bool,
    /// `none`, `min-max` or `standard`.
    #[arg(long)]
    pub normalizer: Option<NormalizerKind>,
    /// Hidden activations for all three networks, e.g. `sigmoid,dft` or `leaky-relu:0.1`.
    #[arg(long, value_delimiter = ',')]
    pub activations: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
    pub repeats: usize,
    /// Number of fresh HF test points per repeat.
    #[arg(long, default_value_t = bench::DEFAULT_TEST_SIZE)]
    pub test_size: usize,
    /// Draw HF inputs from the LF inputs.
    #[arg(long)]
    pub nested: bool,
    /// Worker threads for repeats (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
    /// LF sample count (default: 100 per input dimension, or every CSV row).
    #[arg(long)]
    pub il: Option<usize>,
    /// HF sample count (default: 5, or every CSV row).
    #[arg(long)]
    pub ih: Option<usize>,
    #[arg(long)]
    pub nested: bool,
    #[arg(long, default_value_t = bench::DEFAULT_TEST_SIZE)]
    pub test_size: usize,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// CSV of model inputs, one row of `d1` numbers each.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepHfArgs {
    #[arg(long)]
    pub benchmark: String,
    #[arg(long)]
    pub il: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [20, 15, 10, 5])]
    pub ih: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct SweepLfArgs {
    #[arg(long)]
    pub benchmark: String,
    /// LF counts (default: 100d, 80d, 60d, 40d, 20d).
    #[arg(long, value_delimiter = ',')]
    pub il: Option<Vec<usize>>,
    #[arg(long, default_value_t = 5)]
    pub ih: usize,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub benchmark: String,
    #[arg(long)]
    pub il: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub ih: usize,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long)]
    pub benchmark: String,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Where training data comes from; exactly one source per run.
#[derive(Debug, Clone)]
pub enum DataSource {
    Benchmark(Box<BenchmarkPair>),
    Csv {
        lf: PathBuf,
        hf: PathBuf,
        d1: usize,
        d2: usize,
    },
}

impl SourceArgs {
    pub fn resolve(&self) -> Result<DataSource> {
        match (&self.benchmark, &self.csv_lf, &self.csv_hf) {
            (Some(name), None, None) => Ok(DataSource::Benchmark(Box::new(bench::find(name)?))),
            (None, Some(lf), Some(hf)) => Ok(DataSource::Csv {
                lf: lf.clone(),
                hf: hf.clone(),
                d1: self.d1,
                d2: self.d2,
            }),
            _ => Err(Error::Config(
                "give either --benchmark or both --csv-lf and --csv-hf".into(),
            )),
        }
    }
}

fn parse_activation(s: &str) -> Result<ActivationKind> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let kind = match name.trim() {
        "sigmoid" => ActivationKind::Sigmoid,
        "leaky-relu" | "leaky_relu" => ActivationKind::LeakyRelu {
            alpha: match arg {
                Some(a) => a
                    .parse()
                    .map_err(|_| Error::Config(format!("bad leaky relu slope `{a}`")))?,
                None => crate::nn::DEFAULT_LEAKY_SLOPE,
            },
        },
        "ricker" => ActivationKind::Ricker,
        "dft" => ActivationKind::Dft,
        "imq" | "inverse-multiquadratic" => ActivationKind::InverseMultiquadratic,
        "identity" => ActivationKind::Identity,
        other => return Err(Error::Config(format!("unknown activation `{other}`"))),
    };
    kind.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(kind)
}

fn merge_toml(base: &mut toml::Value, overlay: toml::Value) {
    match (base, overlay) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_toml(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl TrainingArgs {
    /// Applies preset, config file and flags on top of `base`.
    pub fn resolve(&self, base: TrainingConfig) -> Result<TrainingConfig> {
        let mut config = match self.preset {
            Some(p) => TrainingConfig::reference(p)?,
            None => base,
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => Error::FileNotFound { path: path.clone() },
                _ => Error::Io(e),
            })?;
            let overlay: toml::Value = toml::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let mut merged = toml::Value::try_from(&config)
                .map_err(|e| Error::Config(e.to_string()))?;
            merge_toml(&mut merged, overlay);
            config = merged
                .try_into()
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() { config.$field = v; }
            )*};
        }
        set!(eta_lf, eta_d, eta_g, eta_s, epochs_lf, epochs_hf, lf_batch_cap, hf_batch_cap, mode, normalizer);
        if self.no_supervised {
            config.supervised = false;
        }
        if let Some(names) = &self.activations {
            let acts = names
                .iter()
                .map(|s| parse_activation(s))
                .collect::<Result<Vec<_>>>()?;
            config.architecture = Architecture::uniform(&acts);
        }
        config.validate()?;
        Ok(config)
    }
}

impl ProtocolArgs {
    fn protocol(&self, seed: u64) -> Protocol {
        Protocol {
            repeats: self.repeats,
            test_size: self.test_size,
            base_seed: seed,
            nested: self.nested,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            if j == 0 {
                return Err(Error::Config("--jobs must be at least 1".into()));
            }
            builder = builder.num_threads(j);
        }
        builder
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_list() -> Result<()> {
    for b in bench::registry() {
        println!("{:<14} d1={:<3} d2=1  {}", b.name, b.d1, b.description);
    }
    Ok(())
}

/// Inputs and true responses used to score a trained model.
type TestSet = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let source = args.source.resolve()?;
    let out = &args.common.out;
    let seed = args.common.seed;
    let (data, test): (_, Option<TestSet>) = match &source {
        DataSource::Benchmark(pair) => {
            let il = args.il.unwrap_or(100 * pair.d1);
            let ih = args.ih.unwrap_or(5);
            let data = MultiFidelityDataset::from_pair(pair.as_ref(), il, ih, seed, args.nested)?;
            let xs = lhs_sample(args.test_size, &pair.bounds, &mut stream_rng(seed, stream::TEST_DESIGN))?;
            let ys: Vec<Vec<f64>> = xs.iter().map(|x| vec![pair.hf(x)]).collect();
            (data, Some((xs, ys)))
        }
        DataSource::Csv { lf, hf, d1, d2 } => {
            let lf_rows = load_csv(lf, *d1, *d2)?;
            let hf_rows = load_csv(hf, *d1, *d2)?;
            let il = args.il.unwrap_or(lf_rows.len());
            let ih = args.ih.unwrap_or(hf_rows.len());
            let (data, held_out) = MultiFidelityDataset::from_samples(&lf_rows, &hf_rows, il, ih, seed)?;
            let test = (!held_out.is_empty()).then(|| {
                (
                    held_out.iter().map(|s| s.x.clone()).collect(),
                    held_out.iter().map(|s| s.y.clone()).collect(),
                )
            });
            (data, test)
        }
    };
    let base = match &source {
        DataSource::Benchmark(pair) => pair.config.clone(),
        DataSource::Csv { .. } => TrainingConfig::default(),
    };
    let config = TrainingConfig {
        seed,
        ..args.training.resolve(base)?
    };

    let (model, report) = train(&data, &config)?;
    prepare_out(out)?;
    let mut written = data.write_snapshot(out, "dataset")?;
    let ckpt = out.join("checkpoint.json");
    model.to_checkpoint(&config).save(&ckpt)?;
    let trace = out.join("loss_trace.csv");
    report.trace.write_csv(&trace)?;
    written.extend([ckpt, trace]);

    let score = match &test {
        Some((xs, ys)) => {
            let pred = model.predict(xs)?;
            // An all-zero held-out set has no NRMSE; report it as unavailable.
            bench::nrmse(ys, &pred).ok()
        }
        None => None,
    };
    announce(&written);
    let last = report.trace.last();
    println!(
        "train: I_L={} I_H={} seed={} lf_mse={} L_S={} nrmse={}",
        data.lf.len(),
        data.hf.len(),
        seed,
        format_float(report.lf_mse),
        last.map_or("n/a".into(), |r| format_float(r.supervised)),
        score.map_or("n/a".into(), format_float),
    );
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let (model, _) = GanMdfModel::from_checkpoint(Checkpoint::load(&args.checkpoint)?)?;
    let xs = read_numeric_rows(&args.input, model.input_dim())?;
    let ys = model.predict(&xs)?;
    prepare_out(&args.out)?;
    let path = args.out.join("predictions.csv");
    let header: Vec<String> = (1..=model.input_dim())
        .map(|i| format!("x{i}"))
        .chain((1..=model.output_dim()).map(|i| format!("y{i}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| x.iter().chain(y).copied().collect())
        .collect();
    write_rows(&path, &header, &rows)?;
    announce(&[path]);
    println!("predict: {} rows", rows.len());
    Ok(())
}

fn write_sweep(
    out: &Path,
    stem: &str,
    benchmark: &str,
    protocol: &Protocol,
    results: &[&ExperimentResult],
    with_variant: bool,
) -> Result<()> {
    prepare_out(out)?;
    let runs = out.join(format!("{stem}_runs.csv"));
    let summary = out.join(format!("{stem}_summary.csv"));
    let json = out.join(format!("{stem}_summary.json"));
    bench::write_runs_csv(&runs, results, with_variant)?;
    bench::write_summary_csv(&summary, results)?;
    bench::write_summary_json(&json, benchmark, protocol, results)?;
    announce(&[runs, summary, json]);
    for r in results {
        println!(
            "{} {} I_L={} I_H={} mean_nrmse={} failed={}/{}{}",
            r.variant.label(),
            r.benchmark,
            r.lf_count,
            r.hf_count,
            format_float(r.mean_nrmse),
            r.failures(),
            r.runs.len(),
            if r.all_lf_frozen() { "" } else { " LF-BLOCK-CHANGED" },
        );
    }
    Ok(())
}

fn cmd_sweep_hf(args: &SweepHfArgs) -> Result<()> {
    let pair = bench::find(&args.benchmark)?;
    let config = args.training.resolve(pair.config.clone())?;
    let protocol = args.protocol.protocol(args.common.seed);
    let il = args.il.unwrap_or(100 * pair.d1);
    let results = args
        .protocol
        .pool()?
        .install(|| bench::run_hf_sweep(&pair, il, &args.ih, &config, &protocol))?;
    let refs: Vec<&ExperimentResult> = results.iter().collect();
    write_sweep(&args.common.out, "sweep_hf", pair.name, &protocol, &refs, false)
}

fn cmd_sweep_lf(args: &SweepLfArgs) -> Result<()> {
    let pair = bench::find(&args.benchmark)?;
    let config = args.training.resolve(pair.config.clone())?;
    let protocol = args.protocol.protocol(args.common.seed);
    let grid = args.il.clone().unwrap_or_else(|| bench::default_lf_grid(pair.d1));
    let results = args
        .protocol
        .pool()?
        .install(|| bench::run_lf_sweep(&pair, &grid, args.ih, &config, &protocol))?;
    let refs: Vec<&ExperimentResult> = results.iter().collect();
    write_sweep(&args.common.out, "sweep_lf", pair.name, &protocol, &refs, false)
}

fn cmd_baselines(args: &BaselineArgs) -> Result<()> {
    let pair = bench::find(&args.benchmark)?;
    let config = args.training.resolve(pair.config.clone())?;
    let protocol = args.protocol.protocol(args.common.seed);
    let il = args.il.unwrap_or(100 * pair.d1);
    let cmp = args
        .protocol
        .pool()?
        .install(|| bench::run_baselines(&pair, il, args.ih, &config, &protocol))?;
    write_sweep(&args.common.out, "baselines", pair.name, &protocol, &cmp.results(), true)
}

fn cmd_scatter(args: &ScatterArgs) -> Result<()> {
    let pair = bench::find(&args.benchmark)?;
    let points = bench::emit_correlation_scatter(&pair, args.points, args.common.seed)?;
    prepare_out(&args.common.out)?;
    let path = args.common.out.join(format!("scatter_{}.csv", pair.name));
    bench::write_scatter_csv(&path, &points)?;
    announce(&[path]);
    println!("scatter: {} {} points", pair.name, points.len());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::SweepHf(a) => cmd_sweep_hf(a),
        Command::SweepLf(a) => cmd_sweep_lf(a),
        Command::Baselines(a) => cmd_baselines(a),
        Command::Scatter(a) => cmd_scatter(a),
        Command::ListBenchmarks => cmd_list(),
    }
}

/// Exit status for an error: 1 for training failures, 2 for usage and input problems.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Diverged { .. } | Error::Contract(_) | Error::NonFinite(_) | Error::StaleTape => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

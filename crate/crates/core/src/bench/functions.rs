//! Analytic low/high-fidelity benchmark pairs.

use std::f64::consts::PI;

use crate::data::FidelityPair;
use crate::data::NormalizerKind;
use crate::model::TrainingConfig;
use crate::{Error, Result};

type ScalarFn = fn(&[f64]) -> f64;

/// A named pair of scalar responses over a box, with default training settings.
#[derive(Debug, Clone)]
pub struct BenchmarkPair {
    pub name: &'static str,
    pub description: &'static str,
    pub d1: usize,
    pub bounds: Vec<(f64, f64)>,
    lf_fn: ScalarFn,
    hf_fn: ScalarFn,
    pub config: TrainingConfig,
}

impl BenchmarkPair {
    pub fn lf(&self, x: &[f64]) -> f64 {
        (self.lf_fn)(x)
    }

    pub fn hf(&self, x: &[f64]) -> f64 {
        (self.hf_fn)(x)
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

impl FidelityPair for BenchmarkPair {
    fn input_dim(&self) -> usize {
        self.d1
    }

    fn output_dim(&self) -> usize {
        1
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        self.bounds.clone()
    }

    fn low(&self, x: &[f64]) -> Vec<f64> {
        vec![self.lf(x)]
    }

    fn high(&self, x: &[f64]) -> Vec<f64> {
        vec![self.hf(x)]
    }
}

pub fn forrester_hf(x: &[f64]) -> f64 {
    let t = 6.0 * x[0] - 2.0;
    t * t * (12.0 * x[0] - 4.0).sin()
}

/// `0.5 f(x) + 10 (x - 0.5) - 5`
pub fn forrester_lf(x: &[f64]) -> f64 {
    0.5 * forrester_hf(x) + 10.0 * (x[0] - 0.5) - 5.0
}

pub fn nonlinear_lf(x: &[f64]) -> f64 {
    (8.0 * PI * x[0]).sin()
}

/// `(x - sqrt 2) * lf(x)^2`
pub fn nonlinear_hf(x: &[f64]) -> f64 {
    let l = nonlinear_lf(x);
    (x[0] - 2f64.sqrt()) * l * l
}

pub fn phase_lf(x: &[f64]) -> f64 {
    (16.0 * PI * x[0]).sin()
}

/// Quarter-period shift of [`phase_lf`]: no functional relation between the fidelities.
pub fn phase_hf(x: &[f64]) -> f64 {
    (16.0 * PI * x[0]).cos()
}

pub fn currin_hf(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let damp = if x2 > 0.0 { 1.0 - (-1.0 / (2.0 * x2)).exp() } else { 1.0 };
    let num = 2300.0 * x1.powi(3) + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
    let den = 100.0 * x1.powi(3) + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
    damp * num / den
}

/// Average of the HF response at four diagonally offset points.
pub fn currin_lf(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let up = x2 + 0.05;
    let down = (x2 - 0.05).max(0.0);
    0.25 * (currin_hf(&[x1 + 0.05, up])
        + currin_hf(&[x1 + 0.05, down])
        + currin_hf(&[x1 - 0.05, up])
        + currin_hf(&[x1 - 0.05, down]))
}

const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

const HARTMANN_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartmann(x: &[f64], alpha: &[f64; 4]) -> f64 {
    -alpha
        .iter()
        .zip(HARTMANN_A.iter().zip(&HARTMANN_P))
        .map(|(a, (row, p))| {
            let s: f64 = (0..6).map(|j| row[j] * (x[j] - p[j]).powi(2)).sum();
            a * (-s).exp()
        })
        .sum::<f64>()
}

pub fn hartmann6_hf(x: &[f64]) -> f64 {
    hartmann(x, &[1.0, 1.2, 3.0, 3.2])
}

/// Hartmann-6 with perturbed mixture weights.
pub fn hartmann6_lf(x: &[f64]) -> f64 {
    hartmann(x, &[0.5, 0.5, 2.0, 4.0])
}

// x = (rw, r, Tu, Hu, Tl, Hl, L, Kw)
fn borehole(x: &[f64], numerator: f64, offset: f64) -> f64 {
    let (rw, r, tu, hu, tl, hl, l, kw) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]);
    let log_ratio = (r / rw).ln();
    numerator * tu * (hu - hl)
        / (log_ratio * (offset + 2.0 * l * tu / (log_ratio * rw * rw * kw) + tu / tl))
}

pub fn borehole_hf(x: &[f64]) -> f64 {
    borehole(x, 2.0 * PI, 1.0)
}

pub fn borehole_lf(x: &[f64]) -> f64 {
    borehole(x, 5.0, 1.5)
}

fn styblinski_tang_mean(x: &[f64]) -> f64 {
    x.iter().map(|&v| 0.5 * (v.powi(4) - 16.0 * v * v + 5.0 * v)).sum::<f64>() / x.len() as f64
}

pub fn separable_hf(x: &[f64]) -> f64 {
    styblinski_tang_mean(x)
}

/// Scaled HF plus a linear trend and offset.
pub fn separable_lf(x: &[f64]) -> f64 {
    0.8 * styblinski_tang_mean(x) + 2.0 * x.iter().sum::<f64>() / x.len() as f64 - 5.0
}

fn with_normalizer(mut c: TrainingConfig, n: NormalizerKind) -> TrainingConfig {
    c.normalizer = n;
    c
}

/// All registered pairs, ordered by input dimension.
pub fn registry() -> Vec<BenchmarkPair> {
    let reference = |p| TrainingConfig::reference(p).expect("reference rows 1..=10 exist");
    vec![
        BenchmarkPair {
            name: "forrester1d",
            description: "Forrester function with a linearly shifted and scaled LF",
            d1: 1,
            bounds: vec![(0.0, 1.0)],
            lf_fn: forrester_lf,
            hf_fn: forrester_hf,
            config: reference(1),
        },
        BenchmarkPair {
            name: "nonlinear1d",
            description: "sin(8 pi x) LF with a quadratic, input-dependent HF correlation",
            d1: 1,
            bounds: vec![(0.0, 1.0)],
            lf_fn: nonlinear_lf,
            hf_fn: nonlinear_hf,
            config: reference(2),
        },
        BenchmarkPair {
            name: "phase1d",
            description: "quarter-period phase shift, LF and HF responses weakly related",
            d1: 1,
            bounds: vec![(0.0, 1.0)],
            lf_fn: phase_lf,
            hf_fn: phase_hf,
            config: reference(3),
        },
        BenchmarkPair {
            name: "identity1d",
            description: "Forrester function at both fidelities",
            d1: 1,
            bounds: vec![(0.0, 1.0)],
            lf_fn: forrester_hf,
            hf_fn: forrester_hf,
            config: reference(1),
        },
        BenchmarkPair {
            name: "currin2d",
            description: "Currin exponential with a locally averaged LF",
            d1: 2,
            bounds: vec![(0.0, 1.0); 2],
            lf_fn: currin_lf,
            hf_fn: currin_hf,
            config: reference(5),
        },
        BenchmarkPair {
            name: "hartmann6d",
            description: "Hartmann-6 with perturbed mixture weights at low fidelity",
            d1: 6,
            bounds: vec![(0.0, 1.0); 6],
            lf_fn: hartmann6_lf,
            hf_fn: hartmann6_hf,
            config: reference(6),
        },
        BenchmarkPair {
            name: "borehole8d",
            description: "borehole flow rate with the simplified LF model",
            d1: 8,
            bounds: vec![
                (0.05, 0.15),
                (100.0, 50_000.0),
                (63_070.0, 115_600.0),
                (990.0, 1110.0),
                (63.1, 116.0),
                (700.0, 820.0),
                (1120.0, 1680.0),
                (9855.0, 12_045.0),
            ],
            lf_fn: borehole_lf,
            hf_fn: borehole_hf,
            // Raw borehole inputs span five orders of magnitude and saturate
            // sigmoid layers, so this pair rescales.
            config: with_normalizer(reference(7), NormalizerKind::MinMax),
        },
        BenchmarkPair {
            name: "separable20d",
            description: "separable Styblinski-Tang mean with a trended LF",
            d1: 20,
            bounds: vec![(-5.0, 5.0); 20],
            lf_fn: separable_lf,
            hf_fn: separable_hf,
            config: reference(8),
        },
        BenchmarkPair {
            name: "separable30d",
            description: "separable Styblinski-Tang mean with a trended LF",
            d1: 30,
            bounds: vec![(-5.0, 5.0); 30],
            lf_fn: separable_lf,
            hf_fn: separable_hf,
            config: reference(9),
        },
    ]
}

pub fn find(name: &str) -> Result<BenchmarkPair> {
    registry()
        .into_iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownBenchmark(name.to_string()))
}

//! Sampling designs, normalization, CSV ingestion and dataset assembly.

mod csv_io;
mod dataset;
mod lhs;
mod normalize;

use serde::{Deserialize, Serialize};

pub use csv_io::{format_float, load_csv, read_numeric_rows, write_rows, write_samples};
pub(crate) use csv_io::write_json;
pub use dataset::{FidelityPair, MultiFidelityDataset};
pub use lhs::{check_bounds, lhs_sample, stratum_index};
pub use normalize::{Normalizer, NormalizerKind};

/// One input/response pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

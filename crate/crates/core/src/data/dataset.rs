use std::path::{Path, PathBuf};

use rand::seq::index::sample as sample_indices;
use serde::{Deserialize, Serialize};

use super::csv_io::{write_json, write_samples};
use super::lhs::{check_bounds, lhs_sample};
use super::Sample;
use crate::rng::{stream, stream_rng};
use crate::{Error, Result};

/// A pair of deterministic responses (low and high fidelity) over a box.
pub trait FidelityPair {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn bounds(&self) -> Vec<(f64, f64)>;
    fn low(&self, x: &[f64]) -> Vec<f64>;
    fn high(&self, x: &[f64]) -> Vec<f64>;
}

/// LF and HF training samples sharing input and output widths.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFidelityDataset {
    pub d1: usize,
    pub d2: usize,
    pub bounds: Vec<(f64, f64)>,
    pub lf: Vec<Sample>,
    pub hf: Vec<Sample>,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotSidecar {
    d1: usize,
    d2: usize,
    bounds: Vec<(f64, f64)>,
    seed: u64,
    lf_count: usize,
    hf_count: usize,
}

impl MultiFidelityDataset {
    /// Draws LF and HF designs by independent Latin hypercube calls (so the
    /// two sets are generally unnested) and evaluates the pair on them. With
    /// `nested`, HF inputs are instead a random subset of the LF inputs.
    pub fn from_pair<P: FidelityPair + ?Sized>(
        pair: &P,
        lf_count: usize,
        hf_count: usize,
        seed: u64,
        nested: bool,
    ) -> Result<Self> {
        if hf_count == 0 || lf_count == 0 {
            return Err(Error::InvalidArgument(
                "a dataset needs at least one LF and one HF sample".into(),
            ));
        }
        if lf_count < hf_count {
            return Err(Error::InvalidArgument(format!(
                "expected at least as many LF as HF samples, got {lf_count} < {hf_count}"
            )));
        }
        let bounds = pair.bounds();
        check_bounds(&bounds)?;
        let lf_x = lhs_sample(lf_count, &bounds, &mut stream_rng(seed, stream::LF_DESIGN))?;
        let hf_x = if nested {
            let mut rng = stream_rng(seed, stream::HF_DESIGN);
            sample_indices(&mut rng, lf_count, hf_count)
                .into_iter()
                .map(|i| lf_x[i].clone())
                .collect()
        } else {
            lhs_sample(hf_count, &bounds, &mut stream_rng(seed, stream::HF_DESIGN))?
        };
        let lf = lf_x
            .into_iter()
            .map(|x| Sample { y: pair.low(&x), x })
            .collect();
        let hf = hf_x
            .into_iter()
            .map(|x| Sample { y: pair.high(&x), x })
            .collect();
        Ok(MultiFidelityDataset {
            d1: pair.input_dim(),
            d2: pair.output_dim(),
            bounds,
            lf,
            hf,
            seed,
        })
    }

    /// Subsamples rows without replacement from LF and HF tables. Returns the
    /// dataset and the HF rows that were not drawn, for held-out evaluation.
    pub fn from_samples(
        lf_rows: &[Sample],
        hf_rows: &[Sample],
        lf_count: usize,
        hf_count: usize,
        seed: u64,
    ) -> Result<(Self, Vec<Sample>)> {
        if lf_count == 0 || hf_count == 0 {
            return Err(Error::InvalidArgument(
                "a dataset needs at least one LF and one HF sample".into(),
            ));
        }
        if lf_rows.len() < lf_count || hf_rows.len() < hf_count {
            return Err(Error::InvalidArgument(format!(
                "not enough rows: requested {lf_count} LF / {hf_count} HF, have {} / {}",
                lf_rows.len(),
                hf_rows.len()
            )));
        }
        let d1 = lf_rows[0].x.len();
        let d2 = lf_rows[0].y.len();
        if lf_rows.iter().chain(hf_rows).any(|s| s.x.len() != d1 || s.y.len() != d2) {
            return Err(Error::Shape("LF and HF rows must share input and output widths".into()));
        }
        let mut rng = stream_rng(seed, stream::SUBSAMPLE);
        let lf_idx = sample_indices(&mut rng, lf_rows.len(), lf_count).into_vec();
        let mut hf_idx = sample_indices(&mut rng, hf_rows.len(), hf_count).into_vec();
        let lf: Vec<Sample> = lf_idx.iter().map(|&i| lf_rows[i].clone()).collect();
        let hf: Vec<Sample> = hf_idx.iter().map(|&i| hf_rows[i].clone()).collect();
        hf_idx.sort_unstable();
        let held_out = hf_rows
            .iter()
            .enumerate()
            .filter(|(i, _)| hf_idx.binary_search(i).is_err())
            .map(|(_, s)| s.clone())
            .collect();

        let bounds = (0..d1)
            .map(|j| {
                lf.iter().chain(&hf).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s.x[j]), hi.max(s.x[j]))
                })
            })
            .collect();
        Ok((
            MultiFidelityDataset {
                d1,
                d2,
                bounds,
                lf,
                hf,
                seed,
            },
            held_out,
        ))
    }

    pub fn lf_inputs(&self) -> Vec<Vec<f64>> {
        self.lf.iter().map(|s| s.x.clone()).collect()
    }

    /// Writes `<stem>_lf.csv`, `<stem>_hf.csv` and a `<stem>.json` sidecar.
    pub fn write_snapshot(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        let lf = dir.join(format!("{stem}_lf.csv"));
        let hf = dir.join(format!("{stem}_hf.csv"));
        let sidecar = dir.join(format!("{stem}.json"));
        write_samples(&lf, &self.lf)?;
        write_samples(&hf, &self.hf)?;
        write_json(
            &sidecar,
            &SnapshotSidecar {
                d1: self.d1,
                d2: self.d2,
                bounds: self.bounds.clone(),
                seed: self.seed,
                lf_count: self.lf.len(),
                hf_count: self.hf.len(),
            },
        )?;
        Ok(vec![lf, hf, sidecar])
    }
}

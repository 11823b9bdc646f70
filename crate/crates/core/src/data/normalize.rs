use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizerKind {
    #[default]
    None,
    /// `z = (x - min) / (max - min)` per column.
    MinMax,
    /// `z = (x - mean) / stdev` per column, population standard deviation.
    Standard,
}

impl std::str::FromStr for NormalizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NormalizerKind::None),
            "min-max" | "minmax" => Ok(NormalizerKind::MinMax),
            "standard" => Ok(NormalizerKind::Standard),
            other => Err(Error::InvalidArgument(format!("unknown normalizer `{other}`"))),
        }
    }
}

/// Fitted per-column affine map `z = (x - offset) / scale`.
///
/// Columns without spread (constant under min-max, zero deviation under
/// standard) are left untouched and listed in `passthrough`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub kind: NormalizerKind,
    offset: Vec<f64>,
    scale: Vec<f64>,
    passthrough: Vec<usize>,
}

impl Normalizer {
    pub fn identity(width: usize) -> Self {
        Normalizer {
            kind: NormalizerKind::None,
            offset: vec![0.0; width],
            scale: vec![1.0; width],
            passthrough: Vec::new(),
        }
    }

    pub fn fit(kind: NormalizerKind, rows: &[Vec<f64>]) -> Result<Self> {
        let width = match rows.first() {
            Some(r) => r.len(),
            None => return Err(Error::InvalidArgument("cannot fit a normalizer on zero rows".into())),
        };
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Shape("ragged rows passed to normalizer".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("normalizer fitting data".into()));
        }
        let n = rows.len() as f64;
        let column = |j: usize| rows.iter().map(move |r| r[j]);
        let (offset, scale): (Vec<f64>, Vec<f64>) = match kind {
            NormalizerKind::None => return Ok(Self::identity(width)),
            NormalizerKind::MinMax => (0..width)
                .map(|j| {
                    let min = column(j).fold(f64::INFINITY, f64::min);
                    let max = column(j).fold(f64::NEG_INFINITY, f64::max);
                    (min, max - min)
                })
                .unzip(),
            NormalizerKind::Standard => {
                if rows.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "standard normalizer needs at least two rows".into(),
                    ));
                }
                (0..width)
                    .map(|j| {
                        let mean = column(j).sum::<f64>() / n;
                        let var = column(j).map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
                        (mean, var.sqrt())
                    })
                    .unzip()
            }
        };

        let mut norm = Normalizer {
            kind,
            offset,
            scale,
            passthrough: Vec::new(),
        };
        for j in 0..width {
            if norm.scale[j] <= 1e-12 * norm.offset[j].abs().max(1.0) {
                log::warn!("normalizer column {j} has no spread; passing it through unchanged");
                norm.offset[j] = 0.0;
                norm.scale[j] = 1.0;
                norm.passthrough.push(j);
            }
        }
        Ok(norm)
    }

    pub fn width(&self) -> usize {
        self.offset.len()
    }

    pub fn passthrough_columns(&self) -> &[usize] {
        &self.passthrough
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(x.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(v, (o, s))| (v - o) / s)
            .collect())
    }

    pub fn inverse_transform(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check(z)?;
        Ok(z.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(v, (o, s))| v * s + o)
            .collect())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.width() {
            return Err(Error::Shape(format!(
                "normalizer fitted on {} columns, got {}",
                self.width(),
                x.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    fn apply(n: &Normalizer, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&x| n.transform(&[x]).unwrap()[0]).collect()
    }

    #[test]
    fn min_max_of_one_two_three() {
        let n = Normalizer::fit(NormalizerKind::MinMax, &col(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(apply(&n, &[1.0, 2.0, 3.0]), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn standard_of_one_two_three() {
        let n = Normalizer::fit(NormalizerKind::Standard, &col(&[1.0, 2.0, 3.0])).unwrap();
        let z = apply(&n, &[1.0, 2.0, 3.0]);
        // population stdev = sqrt(2/3); 1 / sqrt(2/3) = 1.2247448713915890
        let e = 1.224_744_871_391_589;
        for (a, b) in z.iter().zip([-e, 0.0, e]) {
            assert!((a - b).abs() < 1e-12, "{z:?}");
        }
    }

    #[test]
    fn round_trip_scalar() {
        let n = Normalizer::fit(NormalizerKind::Standard, &col(&[0.3, 4.0, 2.2])).unwrap();
        let back = n.inverse_transform(&n.transform(&[1.7]).unwrap()).unwrap();
        assert!((back[0] - 1.7).abs() < 1e-12);
    }

    #[test]
    fn constant_column_passes_through() {
        let rows = vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]];
        for kind in [NormalizerKind::MinMax, NormalizerKind::Standard] {
            let n = Normalizer::fit(kind, &rows).unwrap();
            assert_eq!(n.passthrough_columns(), &[1]);
            assert_eq!(n.transform(&[2.0, 5.0]).unwrap()[1], 5.0);
        }
    }

    #[test]
    fn fit_errors() {
        assert!(Normalizer::fit(NormalizerKind::MinMax, &[]).is_err());
        assert!(Normalizer::fit(NormalizerKind::Standard, &col(&[1.0])).is_err());
        assert!(Normalizer::fit(NormalizerKind::MinMax, &col(&[1.0, f64::NAN])).is_err());
        let n = Normalizer::identity(2);
        assert!(n.transform(&[1.0]).is_err());
    }

    #[test]
    fn kind_parses() {
        assert_eq!("min-max".parse::<NormalizerKind>().unwrap(), NormalizerKind::MinMax);
        assert_eq!("standard".parse::<NormalizerKind>().unwrap(), NormalizerKind::Standard);
        assert!("zscore".parse::<NormalizerKind>().is_err());
    }

    proptest! {
        #[test]
        fn fitted_invariants(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40)) {
            let mm = Normalizer::fit(NormalizerKind::MinMax, &rows).unwrap();
            let st = Normalizer::fit(NormalizerKind::Standard, &rows).unwrap();
            let mut sums = [0.0; 3];
            for r in &rows {
                let z = mm.transform(r).unwrap();
                for (j, v) in z.iter().enumerate() {
                    if !mm.passthrough_columns().contains(&j) {
                        prop_assert!((0.0..=1.0).contains(v), "{v}");
                    }
                }
                for n in [&mm, &st] {
                    let back = n.inverse_transform(&n.transform(r).unwrap()).unwrap();
                    for (a, b) in back.iter().zip(r) {
                        prop_assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
                    }
                }
                for (s, v) in sums.iter_mut().zip(st.transform(r).unwrap()) {
                    *s += v;
                }
            }
            for (j, s) in sums.iter().enumerate() {
                if !st.passthrough_columns().contains(&j) {
                    prop_assert!((s / rows.len() as f64).abs() < 1e-10);
                }
            }
        }
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ricker pre-scaling: the wavelet is evaluated at `pi * x / RICKER_SCALE`.
pub const RICKER_SCALE: f64 = 1000.0;

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

/// Activation applied to a layer's pre-activation vector.
///
/// All variants except [`ActivationKind::Dft`] act elementwise. `Dft` mixes the
/// whole layer: output `n` is the real part of the `n`-th coefficient of the
/// discrete Fourier transform of the pre-activations, so the layer width is
/// preserved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationKind {
    Sigmoid,
    LeakyRelu { alpha: f64 },
    Ricker,
    Dft,
    InverseMultiquadratic,
    Identity,
}

impl ActivationKind {
    pub fn leaky_relu() -> Self {
        ActivationKind::LeakyRelu {
            alpha: DEFAULT_LEAKY_SLOPE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ActivationKind::LeakyRelu { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(
                Error::InvalidArgument(format!("leaky relu slope must be positive, got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!(
                "activation input at index {i} ({})",
                v[i]
            )));
        }
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// Like [`apply`](Self::apply) without the finiteness scan; used on the hot path.
    pub(crate) fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(v.len(), out.len());
        match *self {
            ActivationKind::Dft => {
                if v.is_empty() {
                    return Err(Error::InvalidArgument(
                        "dft activation needs a non-empty layer".into(),
                    ));
                }
                dft_real(v, out);
            }
            _ => {
                for (o, &x) in out.iter_mut().zip(v) {
                    *o = self.scalar(x);
                }
            }
        }
        Ok(())
    }

    fn scalar(&self, x: f64) -> f64 {
        match *self {
            ActivationKind::Sigmoid => sigmoid(x),
            ActivationKind::LeakyRelu { alpha } => {
                if x > 0.0 {
                    x
                } else {
                    alpha * x
                }
            }
            ActivationKind::Ricker => {
                let u = ricker_arg(x);
                let g = 1.0 - 2.0 * u * (-u).exp();
                g * g
            }
            ActivationKind::InverseMultiquadratic => 1.0 / (1.0 + x * x).sqrt(),
            ActivationKind::Identity => x,
            ActivationKind::Dft => unreachable!("dft is not elementwise"),
        }
    }

    /// Pulls `upstream` (gradient w.r.t. the activation output) back to the
    /// pre-activation. `pre` and `post` are the values recorded on the forward pass.
    pub(crate) fn backprop(&self, pre: &[f64], post: &[f64], upstream: &[f64], out: &mut [f64]) {
        match *self {
            // The real-part DFT map is a symmetric cosine matrix, so its
            // transpose is itself.
            ActivationKind::Dft => dft_real(upstream, out),
            ActivationKind::Sigmoid => {
                for ((o, &y), &g) in out.iter_mut().zip(post).zip(upstream) {
                    *o = g * y * (1.0 - y);
                }
            }
            ActivationKind::LeakyRelu { alpha } => {
                for ((o, &x), &g) in out.iter_mut().zip(pre).zip(upstream) {
                    *o = if x > 0.0 { g } else { alpha * g };
                }
            }
            ActivationKind::Ricker => {
                for ((o, &x), &g) in out.iter_mut().zip(pre).zip(upstream) {
                    let u = ricker_arg(x);
                    let e = (-u).exp();
                    let inner = 1.0 - 2.0 * u * e;
                    // d inner / du = -2 e^{-u} (1 - u);  du/dx = 2 pi^2 x / scale^2
                    let dinner_du = -2.0 * e * (1.0 - u);
                    let du_dx = 2.0 * PI * PI * x / (RICKER_SCALE * RICKER_SCALE);
                    *o = g * 2.0 * inner * dinner_du * du_dx;
                }
            }
            ActivationKind::InverseMultiquadratic => {
                for ((o, &x), &g) in out.iter_mut().zip(pre).zip(upstream) {
                    let s = 1.0 + x * x;
                    *o = -g * x / (s * s.sqrt());
                }
            }
            ActivationKind::Identity => out.copy_from_slice(upstream),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn ricker_arg(x: f64) -> f64 {
    let s = PI * x / RICKER_SCALE;
    s * s
}

// y(n) = sum_k x(k) cos(2 pi n k / M), the real part of the DFT of a real vector.
fn dft_real(x: &[f64], out: &mut [f64]) {
    let m = x.len();
    for (n, o) in out.iter_mut().enumerate() {
        *o = x
            .iter()
            .enumerate()
            .map(|(k, &xk)| {
                // Reduce n*k mod M first so the cosine argument stays in [0, 2 pi).
                let phase = ((n * k) % m) as f64;
                xk * (2.0 * PI * phase / m as f64).cos()
            })
            .sum();
    }
}

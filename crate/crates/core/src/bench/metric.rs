use crate::{Error, Result};

/// `sqrt(sum ||y_n - f_n||^2) / sqrt(sum ||y_n||^2)`.
pub fn nrmse(truth: &[Vec<f64>], pred: &[Vec<f64>]) -> Result<f64> {
    if truth.is_empty() || truth.len() != pred.len() {
        return Err(Error::Shape(format!(
            "nrmse needs equal non-zero lengths, got {} and {}",
            truth.len(),
            pred.len()
        )));
    }
    let mut err = 0.0;
    let mut norm = 0.0;
    for (y, f) in truth.iter().zip(pred) {
        if y.len() != f.len() {
            return Err(Error::Shape("truth and prediction widths differ".into()));
        }
        for (a, b) in y.iter().zip(f) {
            err += (a - b) * (a - b);
            norm += a * a;
        }
    }
    if norm == 0.0 {
        return Err(Error::InvalidArgument("nrmse is undefined for an all-zero truth".into()));
    }
    Ok(err.sqrt() / norm.sqrt())
}

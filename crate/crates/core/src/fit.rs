//! Log-log least-squares fits of decay envelopes.
//!
//! `log` is base 2 throughout.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeModel {
    /// `value = C * m^r`.
    PowerM,
    /// `value = C * (log(2n/k) / k)^r`.
    LogRatioK,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: EnvelopeModel,
    pub exponent: f64,
    pub constant: f64,
    /// RMS of the regression residuals in log2 units.
    pub residual_rms: f64,
    pub index_min: f64,
    pub index_max: f64,
    pub points: usize,
}

/// `(log2(2n/k) / k)^r`.
pub fn log_ratio_envelope(n: usize, k: f64, r: f64) -> f64 {
    ((2.0 * n as f64 / k).log2() / k).powf(r)
}

/// Fit `values` against `index` (m or k) under `model`; `n` is only used by
/// [`EnvelopeModel::LogRatioK`].
pub fn fit_envelope(index: &[f64], values: &[f64], n: usize, model: EnvelopeModel) -> Result<FitResult> {
    if index.len() != values.len() {
        return Err(invalid("values", "index and value columns differ in length"));
    }
    if index.len() < 3 {
        return Err(invalid("values", format!("need at least 3 points, got {}", index.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(invalid("values", format!("entries must be finite and positive, found {v}")));
    }
    let xs: Vec<f64> = index
        .iter()
        .map(|&k| match model {
            EnvelopeModel::PowerM => k.log2(),
            EnvelopeModel::LogRatioK => ((2.0 * n as f64 / k).log2() / k).log2(),
        })
        .collect();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(invalid("index", "entries must be positive (and k <= 2n for the log-ratio model)"));
    }
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let count = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("index", "need at least two distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(FitResult {
        model,
        exponent: slope,
        constant: intercept.exp2(),
        residual_rms: (rss / count).sqrt(),
        index_min: index.iter().cloned().fold(f64::INFINITY, f64::min),
        index_max: index.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        points: index.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_log_ratio_exponent() {
        let ks = [4.0, 8.0, 16.0, 32.0];
        let vals: Vec<f64> = ks.iter().map(|&k| log_ratio_envelope(64, k, 0.5)).collect();
        let fit = fit_envelope(&ks, &vals, 64, EnvelopeModel::LogRatioK).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-9);
        assert!((fit.constant - 1.0).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn recovers_power_law() {
        let ms = [1.0, 2.0, 5.0, 9.0, 40.0];
        let vals: Vec<f64> = ms.iter().map(|&m: &f64| 3.0 * m.powf(-1.0 / 3.0)).collect();
        let fit = fit_envelope(&ms, &vals, 0, EnvelopeModel::PowerM).unwrap();
        assert!((fit.exponent + 1.0 / 3.0).abs() < 1e-9);
        assert!((fit.constant - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_envelope(&[1.0, 2.0], &[1.0, 0.5], 0, EnvelopeModel::PowerM).is_err());
        assert!(fit_envelope(&[1.0, 2.0, 3.0], &[1.0, 0.0, 0.5], 0, EnvelopeModel::PowerM).is_err());
        assert!(fit_envelope(&[2.0, 2.0, 2.0], &[1.0, 1.0, 1.0], 0, EnvelopeModel::PowerM).is_err());
    }
}

//! Sample autocorrelation and partial autocorrelation.

use crate::error::{Error, Result};
use crate::series::HourlySeries;

/// Biased (divide-by-n) sample autocovariances for lags `0..=max_lag`.
pub fn autocovariances(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    (0..=max_lag.min(n.saturating_sub(1)))
        .map(|k| {
            centered[k..]
                .iter()
                .zip(&centered)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

fn check_lag(series: &HourlySeries, max_lag: usize) -> Result<()> {
    if max_lag >= series.len() {
        return Err(Error::SeriesTooShort {
            needed: max_lag,
            got: series.len(),
        });
    }
    Ok(())
}

/// `ρ(k) = γ(k) / γ(0)` for `k = 0..=max_lag`.
pub fn sample_acf(series: &HourlySeries, max_lag: usize) -> Result<Vec<f64>> {
    check_lag(series, max_lag)?;
    let gamma = autocovariances(series.values(), max_lag);
    // relative threshold so constant series with rounding noise count as degenerate
    let scale = series.values().iter().map(|v| v * v).sum::<f64>() / series.len() as f64;
    if !(gamma[0] > 1e-24 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateSeries);
    }
    Ok(gamma.iter().map(|g| (g / gamma[0]).clamp(-1.0, 1.0)).collect())
}

/// Output of the Durbin–Levinson recursion.
#[derive(Debug, Clone)]
pub struct LevinsonSolution {
    /// AR coefficients `φ_1..φ_p` in `x_t = Σ φ_j x_{t-j} + e_t`.
    pub coefficients: Vec<f64>,
    /// Partial autocorrelations for lags `1..=p`.
    pub pacf: Vec<f64>,
    /// Prediction-error variance relative to lag-0 autocovariance.
    pub error_ratio: f64,
}

/// Durbin–Levinson on autocorrelations `acf[0..=order]` (`acf[0]` must be 1).
pub fn durbin_levinson(acf: &[f64], order: usize) -> LevinsonSolution {
    let mut phi = vec![0.0; order];
    let mut prev = vec![0.0; order];
    let mut pacf = Vec::with_capacity(order);
    let mut v = 1.0;
    for k in 0..order {
        let mut num = acf[k + 1];
        for j in 0..k {
            num -= prev[j] * acf[k - j];
        }
        let r = if v > 1e-14 {
            (num / v).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        phi[k] = r;
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        v *= 1.0 - r * r;
        pacf.push(r);
        prev[..=k].copy_from_slice(&phi[..=k]);
    }
    LevinsonSolution {
        coefficients: phi,
        pacf,
        error_ratio: v,
    }
}

/// Sample PACF for lags `0..=max_lag` (lag 0 is reported as 1).
pub fn sample_pacf(series: &HourlySeries, max_lag: usize) -> Result<Vec<f64>> {
    let acf = sample_acf(series, max_lag)?;
    let mut out = vec![1.0];
    out.extend(durbin_levinson(&acf, max_lag).pacf);
    Ok(out)
}

//! GARCH(p, q) conditional variance of model residuals.
//!
//! `σ²_t = α0 + Σ_{i=1..p} α_i ε²_{t-i} + Σ_{j=1..q} β_j σ²_{t-j}`, with `p`
//! counting ARCH (squared-residual) lags and `q` GARCH (variance) lags.
//! Presample `ε²` and `σ²` both start at the sample variance of the
//! residuals unless a presample value is given explicitly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arima::default_simulation_start;
use crate::error::{Error, Result};
use crate::series::{HourlySeries, Units};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarchSpec {
    /// ARCH order.
    pub p: usize,
    /// GARCH order.
    pub q: usize,
}

impl GarchSpec {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidSpec("GARCH needs at least one ARCH lag".into()));
        }
        Ok(Self { p, q })
    }

    /// α0 plus every α and β.
    pub fn parameter_count(&self) -> usize {
        1 + self.p + self.q
    }
}

impl Default for GarchSpec {
    fn default() -> Self {
        Self { p: 1, q: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl GarchParams {
    pub fn spec(&self) -> GarchSpec {
        GarchSpec {
            p: self.alpha.len(),
            q: self.beta.len(),
        }
    }

    /// `Σα + Σβ`.
    pub fn persistence(&self) -> f64 {
        self.alpha.iter().chain(&self.beta).sum()
    }

    /// `α0 / (1 - Σα - Σβ)`.
    pub fn unconditional_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.persistence())
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_empty() {
            return Err(Error::InvalidParameters("at least one ARCH coefficient".into()));
        }
        if !(self.alpha0 > 0.0) || !self.alpha0.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "alpha0 must be positive, got {}",
                self.alpha0
            )));
        }
        if let Some(c) = self
            .alpha
            .iter()
            .chain(&self.beta)
            .find(|c| !(**c >= 0.0) || !c.is_finite())
        {
            return Err(Error::InvalidParameters(format!(
                "ARCH/GARCH coefficients must be non-negative, got {c}"
            )));
        }
        if !(self.persistence() < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "sum of alpha and beta must be below 1, got {}",
                self.persistence()
            )));
        }
        Ok(())
    }
}

/// Biased sample variance used to seed the recursion.
pub fn presample_variance(residuals: &[f64]) -> f64 {
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    residuals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n
}

/// Runs the variance recursion for `residuals.len() + extra` steps; the
/// trailing entries use only already-known residuals (`extra` ≤ 1 is exact).
fn recursion(params: &GarchParams, residuals: &[f64], presample: f64, extra: usize) -> Vec<f64> {
    let n = residuals.len();
    let mut sigma2 = Vec::with_capacity(n + extra);
    for t in 0..n + extra {
        let mut s = params.alpha0;
        for (i, a) in params.alpha.iter().enumerate() {
            let lag = i + 1;
            let e2 = if t >= lag {
                let idx = t - lag;
                if idx < n {
                    residuals[idx] * residuals[idx]
                } else {
                    sigma2[idx]
                }
            } else {
                presample
            };
            s += a * e2;
        }
        for (j, b) in params.beta.iter().enumerate() {
            let lag = j + 1;
            s += b * if t >= lag { sigma2[t - lag] } else { presample };
        }
        sigma2.push(s);
    }
    sigma2
}

/// σ²_t for every residual, with an explicit presample value.
pub fn conditional_variances_with_presample(
    params: &GarchParams,
    residuals: &[f64],
    presample: f64,
) -> Result<Vec<f64>> {
    params.validate()?;
    if residuals.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(recursion(params, residuals, presample, 0))
}

/// σ²_t for every residual.
pub fn conditional_variances(params: &GarchParams, residuals: &HourlySeries) -> Result<HourlySeries> {
    let values = residuals.values();
    let sigma2 = conditional_variances_with_presample(params, values, presample_variance(values))?;
    HourlySeries::new(residuals.start(), sigma2, Units::Dimensionless)
}

/// Gaussian quasi-log-likelihood on raw residuals, unchecked parameters.
pub(crate) fn log_likelihood_unchecked(params: &GarchParams, residuals: &[f64]) -> f64 {
    let sigma2 = recursion(params, residuals, presample_variance(residuals), 0);
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    residuals
        .iter()
        .zip(&sigma2)
        .map(|(e, s)| -0.5 * (ln2pi + s.ln()) - e * e / (2.0 * s))
        .sum()
}

/// `Σ_t [-½ ln(2π σ²_t) - ε²_t / (2σ²_t)]`.
pub fn garch_log_likelihood(params: &GarchParams, residuals: &HourlySeries) -> Result<f64> {
    params.validate()?;
    Ok(log_likelihood_unchecked(params, residuals.values()))
}

/// Expected conditional variances for steps `1..=horizon` past the last residual.
///
/// Unknown future `ε²` are replaced by their forecasts, so for GARCH(1,1)
/// `σ²_{t+h} = α0 + (α1 + β1) σ²_{t+h-1}` for `h ≥ 2`.
pub fn forecast_variance(
    params: &GarchParams,
    residuals: &HourlySeries,
    horizon: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    let values = residuals.values();
    let sigma2 = recursion(params, values, presample_variance(values), horizon);
    Ok(sigma2[values.len()..].to_vec())
}

/// Draws a GARCH path `ε_t = σ_t z_t` with standard normal `z_t`, after a
/// 1000-step burn-in started at the unconditional variance.
pub fn simulate_garch(params: &GarchParams, n: usize, seed: u64) -> Result<HourlySeries> {
    params.validate()?;
    let burn = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = params.unconditional_variance();
    let mut eps: Vec<f64> = Vec::with_capacity(burn + n);
    let mut sigma2: Vec<f64> = Vec::with_capacity(burn + n);
    for t in 0..burn + n {
        let mut s = params.alpha0;
        for (i, a) in params.alpha.iter().enumerate() {
            s += a * if t > i { eps[t - i - 1].powi(2) } else { start };
        }
        for (j, b) in params.beta.iter().enumerate() {
            s += b * if t > j { sigma2[t - j - 1] } else { start };
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        sigma2.push(s);
        eps.push(s.sqrt() * z);
    }
    HourlySeries::new(
        default_simulation_start(),
        eps.split_off(burn),
        Units::Dimensionless,
    )
}

//! Seasonal ARIMA models with exogenous regressors.
//!
//! The model is a regression with ARMA errors on the differenced scale:
//!
//! ```text
//! w_t  = ∇^d ∇_S^D y_t
//! y*_t = w_t - μ - Σ_k γ_k ∇^d ∇_S^D u_{tk}
//! φ(B) Φ(B^S) y*_t = θ(B) Θ(B^S) ε_t,   ε_t ~ N(0, σ²)
//! ```
//!
//! All four polynomials use the minus-sign convention of [`crate::lag`], so
//! the residual recursion reads
//! `ε_t = y*_t - Σ φ… y*_{t-·} + Σ θ… ε_{t-·}`.
//!
//! Likelihoods are conditional: presample `y*` values equal the sample mean
//! of the regression-adjusted working series (minus `μ`) and presample `ε`
//! are zero.

use chrono::{DateTime, TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lag::{difference_polynomial, integrate_slice, DifferenceSpec, LagPolynomial};
use crate::series::{check_aligned, HourlySeries, Units};

/// SARIMA(p,d,q)×(P,D,Q)_S structure with `exog_count` regressors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub p: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_q: usize,
    pub diff: DifferenceSpec,
    pub exog_count: usize,
    pub constant: bool,
}

impl ModelSpec {
    /// ARMA(p, q) with a constant.
    pub fn arma(p: usize, q: usize) -> Self {
        Self {
            p,
            q,
            seasonal_p: 0,
            seasonal_q: 0,
            diff: DifferenceSpec::none(),
            exog_count: 0,
            constant: true,
        }
    }

    /// ARIMA(p,d,q)×(P,D,Q)_S with a constant.
    pub fn sarima(
        (p, d, q): (usize, usize, usize),
        (seasonal_p, seasonal_d, seasonal_q): (usize, usize, usize),
        season: usize,
    ) -> Self {
        Self {
            p,
            q,
            seasonal_p,
            seasonal_q,
            diff: DifferenceSpec {
                d,
                seasonal_d,
                season,
            },
            exog_count: 0,
            constant: true,
        }
    }

    pub fn with_exog(mut self, count: usize) -> Self {
        self.exog_count = count;
        self
    }

    pub fn with_constant(mut self, constant: bool) -> Self {
        self.constant = constant;
        self
    }

    pub fn with_orders(mut self, p: usize, q: usize) -> Self {
        self.p = p;
        self.q = q;
        self
    }

    pub fn season(&self) -> usize {
        self.diff.season
    }

    pub fn validate(&self) -> Result<()> {
        self.diff.validate()?;
        if (self.seasonal_p > 0 || self.seasonal_q > 0 || self.diff.seasonal_d > 0)
            && self.diff.season < 2
        {
            return Err(Error::InvalidSpec(
                "seasonal terms need season length >= 2".into(),
            ));
        }
        Ok(())
    }

    /// Degree of `φ(B)Φ(B^S)`.
    pub fn ar_degree(&self) -> usize {
        self.p + self.seasonal_p * self.season()
    }

    /// Degree of `θ(B)Θ(B^S)`.
    pub fn ma_degree(&self) -> usize {
        self.q + self.seasonal_q * self.season()
    }

    /// Free mean-equation coefficients (excludes σ²).
    pub fn coefficient_count(&self) -> usize {
        self.p
            + self.q
            + self.seasonal_p
            + self.seasonal_q
            + self.exog_count
            + usize::from(self.constant)
    }

    /// Estimated parameters including σ², as counted by BIC.
    pub fn parameter_count(&self) -> usize {
        self.coefficient_count() + 1
    }

    /// Series must be strictly longer than this.
    pub fn min_length(&self) -> usize {
        self.diff.order() + self.ar_degree().max(self.ma_degree())
    }
}

/// Numeric coefficients for a [`ModelSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub phi: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub mu: f64,
    pub gamma: Vec<f64>,
    pub sigma2: f64,
}

impl ParameterVector {
    /// All coefficients zero, unit innovation variance.
    pub fn zeros(spec: &ModelSpec) -> Self {
        Self {
            phi: vec![0.0; spec.p],
            seasonal_phi: vec![0.0; spec.seasonal_p],
            theta: vec![0.0; spec.q],
            seasonal_theta: vec![0.0; spec.seasonal_q],
            mu: 0.0,
            gamma: vec![0.0; spec.exog_count],
            sigma2: 1.0,
        }
    }

    /// `φ(B)Φ(B^S)` expanded.
    pub fn ar_polynomial(&self, season: usize) -> LagPolynomial {
        LagPolynomial::from_minus_form(&self.phi, 1)
            .multiply(&LagPolynomial::from_minus_form(&self.seasonal_phi, season.max(1)))
    }

    /// `θ(B)Θ(B^S)` expanded.
    pub fn ma_polynomial(&self, season: usize) -> LagPolynomial {
        LagPolynomial::from_minus_form(&self.theta, 1)
            .multiply(&LagPolynomial::from_minus_form(&self.seasonal_theta, season.max(1)))
    }

    fn check_shape(&self, spec: &ModelSpec) -> Result<()> {
        let shape = [
            ("phi", self.phi.len(), spec.p),
            ("seasonal_phi", self.seasonal_phi.len(), spec.seasonal_p),
            ("theta", self.theta.len(), spec.q),
            ("seasonal_theta", self.seasonal_theta.len(), spec.seasonal_q),
            ("gamma", self.gamma.len(), spec.exog_count),
        ];
        for (name, got, want) in shape {
            if got != want {
                return Err(Error::InvalidSpec(format!(
                    "{name} has {got} entries, spec expects {want}"
                )));
            }
        }
        if !spec.constant && self.mu != 0.0 {
            return Err(Error::InvalidSpec(
                "mu must be zero when the spec has no constant".into(),
            ));
        }
        let finite = self
            .phi
            .iter()
            .chain(&self.seasonal_phi)
            .chain(&self.theta)
            .chain(&self.seasonal_theta)
            .chain(&self.gamma)
            .chain([&self.mu, &self.sigma2])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    /// Shape, finiteness, σ² > 0, stationarity and invertibility.
    ///
    /// Seasonal factors are checked as polynomials in `B^S`; the roots of
    /// the expanded product lie outside the unit circle exactly when those
    /// of every factor do.
    pub fn validate(&self, spec: &ModelSpec) -> Result<()> {
        self.check_shape(spec)?;
        let factors = [
            ("AR", &self.phi),
            ("seasonal AR", &self.seasonal_phi),
            ("MA", &self.theta),
            ("seasonal MA", &self.seasonal_theta),
        ];
        for (name, coeffs) in factors {
            let stability = LagPolynomial::from_minus_form(coeffs, 1).stability();
            if !stability.stable {
                return Err(Error::UnstableParameters(format!(
                    "{name} polynomial has a root within {:.3e} of the unit circle",
                    stability.margin
                )));
            }
        }
        Ok(())
    }
}

/// Regressor columns aligned with a target window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExogenousMatrix {
    columns: Vec<HourlySeries>,
}

impl ExogenousMatrix {
    pub fn new(columns: Vec<HourlySeries>) -> Result<Self> {
        if let Some(first) = columns.first() {
            for c in &columns[1..] {
                check_aligned(first, c)?;
            }
        }
        Ok(Self { columns })
    }

    pub fn single(column: HourlySeries) -> Self {
        Self {
            columns: vec![column],
        }
    }

    pub fn columns(&self) -> &[HourlySeries] {
        &self.columns
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Row count (0 when there are no columns).
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, HourlySeries::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Option<DateTime<Utc>> {
        self.columns.first().map(HourlySeries::start)
    }

    pub fn slice(&self, offset: usize, len: usize) -> Result<Self> {
        Ok(Self {
            columns: self
                .columns
                .iter()
                .map(|c| c.slice(offset, len))
                .collect::<Result<_>>()?,
        })
    }

    pub fn concat(&self, other: &ExogenousMatrix) -> Result<Self> {
        if self.width() != other.width() {
            return Err(Error::Alignment("regressor counts differ".into()));
        }
        Ok(Self {
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(a, b)| a.concat(b))
                .collect::<Result<_>>()?,
        })
    }
}

/// Point forecasts and forecast-error variances for horizons `1..=h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub mean: HourlySeries,
    pub variance: Vec<f64>,
}

fn exog_columns<'a>(
    spec: &ModelSpec,
    exog: Option<&'a ExogenousMatrix>,
    target: &HourlySeries,
) -> Result<Vec<&'a [f64]>> {
    let width = exog.map_or(0, ExogenousMatrix::width);
    if width != spec.exog_count {
        return Err(Error::InvalidSpec(format!(
            "spec expects {} regressors, got {width}",
            spec.exog_count
        )));
    }
    let Some(exog) = exog else {
        return Ok(Vec::new());
    };
    exog.columns
        .iter()
        .map(|c| {
            check_aligned(target, c)?;
            Ok(c.values())
        })
        .collect()
}

/// Differenced target and regressors, ready for repeated residual passes.
#[derive(Debug, Clone)]
pub(crate) struct WorkingData {
    /// Timestamp of the first differenced value.
    pub start: DateTime<Utc>,
    pub w: Vec<f64>,
    pub du: Vec<Vec<f64>>,
    pub season: usize,
}

impl WorkingData {
    pub fn new(
        spec: &ModelSpec,
        series: &HourlySeries,
        exog: Option<&ExogenousMatrix>,
    ) -> Result<Self> {
        spec.validate()?;
        if series.len() <= spec.min_length() {
            return Err(Error::SeriesTooShort {
                needed: spec.min_length(),
                got: series.len(),
            });
        }
        let columns = exog_columns(spec, exog, series)?;
        let diff = difference_polynomial(&spec.diff);
        Ok(Self {
            start: series.timestamp(spec.diff.order()),
            w: diff.apply_slice(series.values()),
            du: columns.iter().map(|c| diff.apply_slice(c)).collect(),
            season: spec.season(),
        })
    }

    /// `w_t - Σ γ_k ∇u_{tk}`.
    fn regression_adjusted(&self, gamma: &[f64]) -> Vec<f64> {
        let mut out = self.w.clone();
        for (g, col) in gamma.iter().zip(&self.du) {
            for (o, u) in out.iter_mut().zip(col) {
                *o -= g * u;
            }
        }
        out
    }

    /// Deviations `y*` and the presample value used for `t < 0`.
    pub fn deviations(&self, params: &ParameterVector) -> (Vec<f64>, f64) {
        let adjusted = self.regression_adjusted(&params.gamma);
        let presample = adjusted.iter().sum::<f64>() / adjusted.len() as f64 - params.mu;
        let ystar = adjusted.into_iter().map(|a| a - params.mu).collect();
        (ystar, presample)
    }

    pub fn residuals(&self, params: &ParameterVector) -> Vec<f64> {
        let (ystar, presample) = self.deviations(params);
        let ar = lag_terms(&params.ar_polynomial(self.season));
        let ma = lag_terms(&params.ma_polynomial(self.season));
        residual_recursion(&ystar, presample, &ar, &ma)
    }
}

/// Non-zero `(lag, coefficient)` pairs excluding lag 0.
pub(crate) fn lag_terms(poly: &LagPolynomial) -> Vec<(usize, f64)> {
    poly.terms().skip(1).collect()
}

/// `ε_t = Σ_h a_h y*_{t-h} - Σ_{h≥1} m_h ε_{t-h}` with `a_0 = 1`.
pub(crate) fn residual_recursion(
    ystar: &[f64],
    presample: f64,
    ar: &[(usize, f64)],
    ma: &[(usize, f64)],
) -> Vec<f64> {
    let n = ystar.len();
    let mut eps = ystar.to_vec();
    for &(h, a) in ar {
        for e in &mut eps[..h.min(n)] {
            *e += a * presample;
        }
        if h < n {
            for (e, y) in eps[h..].iter_mut().zip(ystar) {
                *e += a * y;
            }
        }
    }
    // highest lag first keeps ε_{t-1} at the end of the dependency chain
    let warm = ma.last().map_or(0, |&(h, _)| h).min(n);
    for t in 0..warm {
        for &(h, m) in ma.iter().rev() {
            if t >= h {
                eps[t] -= m * eps[t - h];
            }
        }
    }
    let q = ma.len();
    if q > 0 && warm < n && ma[q - 1].0 == q {
        // lags 1..=q all present: a sliding window avoids per-term indexing
        let (m1, older) = (ma[0].1, &ma[1..]);
        let reversed: Vec<f64> = older.iter().rev().map(|&(_, m)| m).collect();
        let mut last = eps[warm - 1];
        for t in warm..n {
            let (past, rest) = eps.split_at_mut(t);
            let mut e = rest[0];
            for (m, x) in reversed.iter().zip(&past[t - warm..t - 1]) {
                e -= m * x;
            }
            e -= m1 * last;
            rest[0] = e;
            last = e;
        }
        return eps;
    }
    for t in warm..n {
        let mut e = eps[t];
        for &(h, m) in ma.iter().rev() {
            e -= m * eps[t - h];
        }
        eps[t] = e;
    }
    eps
}

/// Gaussian log density summed over `residuals` at variance `sigma2`.
pub fn gaussian_log_likelihood(residuals: &[f64], sigma2: f64) -> f64 {
    let n = residuals.len() as f64;
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    -0.5 * n * (2.0 * std::f64::consts::PI * sigma2).ln() - sse / (2.0 * sigma2)
}

/// Innovations `ε_t` over the effective (post-differencing) sample.
pub fn residuals(
    spec: &ModelSpec,
    params: &ParameterVector,
    series: &HourlySeries,
    exog: Option<&ExogenousMatrix>,
) -> Result<HourlySeries> {
    params.validate(spec)?;
    let data = WorkingData::new(spec, series, exog)?;
    HourlySeries::new(data.start, data.residuals(params), series.units())
}

/// Conditional Gaussian log-likelihood.
pub fn log_likelihood(
    spec: &ModelSpec,
    params: &ParameterVector,
    series: &HourlySeries,
    exog: Option<&ExogenousMatrix>,
) -> Result<f64> {
    params.validate(spec)?;
    let data = WorkingData::new(spec, series, exog)?;
    Ok(gaussian_log_likelihood(&data.residuals(params), params.sigma2))
}

/// Default start for simulated series without regressors (a Monday).
pub fn default_simulation_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2015, 1, 5, 0, 0, 0).unwrap()
}

/// Burn-in discarded by [`simulate`]: ten times the longest lag involved.
pub fn burn_in(spec: &ModelSpec) -> usize {
    10 * spec
        .ar_degree()
        .max(spec.ma_degree())
        .max(spec.diff.order())
}

/// Draws `n` observations from the model.
///
/// With regressors, `exog` must hold at least `n + burn_in(spec)` rows; the
/// output covers rows `burn_in..burn_in + n` of its calendar. Without them
/// the output starts at [`default_simulation_start`].
pub fn simulate(
    spec: &ModelSpec,
    params: &ParameterVector,
    n: usize,
    exog: Option<&ExogenousMatrix>,
    seed: u64,
) -> Result<HourlySeries> {
    params.validate(spec)?;
    if n == 0 {
        return Err(Error::InvalidArgument("cannot simulate zero values".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, params.sigma2.sqrt())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let innovations: Vec<f64> = (0..burn_in(spec) + n)
        .map(|_| normal.sample(&mut rng))
        .collect();
    simulate_from_innovations(spec, params, &innovations, exog)
}

/// Runs given innovations through the model. The first `burn_in(spec)`
/// innovations only warm up the recursion; `params.sigma2` is ignored.
pub fn simulate_from_innovations(
    spec: &ModelSpec,
    params: &ParameterVector,
    innovations: &[f64],
    exog: Option<&ExogenousMatrix>,
) -> Result<HourlySeries> {
    spec.validate()?;
    params.validate(spec)?;
    let burn = burn_in(spec);
    let total = innovations.len();
    if total <= burn {
        return Err(Error::SeriesTooShort {
            needed: burn,
            got: total,
        });
    }
    if let Some(index) = innovations.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let width = exog.map_or(0, ExogenousMatrix::width);
    if width != spec.exog_count {
        return Err(Error::InvalidSpec(format!(
            "spec expects {} regressors, got {width}",
            spec.exog_count
        )));
    }
    if let Some(x) = exog.filter(|x| x.width() > 0) {
        if x.len() < total {
            return Err(Error::SeriesTooShort {
                needed: total,
                got: x.len(),
            });
        }
    }

    let ar = lag_terms(&params.ar_polynomial(spec.season()));
    let ma = lag_terms(&params.ma_polynomial(spec.season()));
    let mut x: Vec<f64> = Vec::with_capacity(total);
    for (t, &e) in innovations.iter().enumerate() {
        let mut v = e;
        for &(h, a) in &ar {
            if t >= h {
                v -= a * x[t - h];
            }
        }
        for &(h, m) in &ma {
            if t >= h {
                v += m * innovations[t - h];
            }
        }
        x.push(v);
    }
    let w: Vec<f64> = x.iter().map(|v| params.mu + v).collect();
    let levels = integrate_slice(&w, &vec![0.0; spec.diff.order()], &spec.diff)?;
    let mut out = levels[burn..].to_vec();

    let start = match exog.filter(|x| x.width() > 0) {
        Some(x) => {
            for (g, col) in params.gamma.iter().zip(x.columns()) {
                for (o, u) in out.iter_mut().zip(&col.values()[burn..]) {
                    *o += g * u;
                }
            }
            x.columns()[0].timestamp(burn)
        }
        None => default_simulation_start(),
    };
    HourlySeries::new(start, out, Units::Dimensionless)
}

/// MA(∞) weights `ψ_0..ψ_{count-1}` of the full model, differencing included.
pub fn psi_weights(spec: &ModelSpec, params: &ParameterVector, count: usize) -> Vec<f64> {
    let ar = params
        .ar_polynomial(spec.season())
        .multiply(&difference_polynomial(&spec.diff));
    let ma = params.ma_polynomial(spec.season());
    let mut psi: Vec<f64> = Vec::with_capacity(count);
    for j in 0..count {
        let mut v = if j == 0 { 1.0 } else { ma.coefficient(j) };
        for (i, a) in ar.terms().skip(1) {
            if i > j {
                break;
            }
            v -= a * psi[j - i];
        }
        psi.push(v);
    }
    psi
}

/// `Var(h) = Σ_{j<h} ψ_j² σ²_{h-j}` for per-step innovation variances.
pub fn forecast_error_variances(psi: &[f64], innovation_variance: &[f64]) -> Vec<f64> {
    (1..=innovation_variance.len())
        .map(|h| {
            (0..h)
                .map(|j| psi[j] * psi[j] * innovation_variance[h - j - 1])
                .sum()
        })
        .collect()
}

/// Minimum-MSE forecasts for `1..=horizon` steps after the end of `history`.
///
/// `exog_history` must align with `history`; `exog_future` must start at
/// `history.end()` and cover every step.
pub fn forecast(
    spec: &ModelSpec,
    params: &ParameterVector,
    history: &HourlySeries,
    exog_history: Option<&ExogenousMatrix>,
    exog_future: Option<&ExogenousMatrix>,
    horizon: usize,
) -> Result<ForecastResult> {
    let mean = forecast_mean(spec, params, history, exog_history, exog_future, horizon)?;
    let psi = psi_weights(spec, params, horizon);
    let variance = forecast_error_variances(&psi, &vec![params.sigma2; horizon]);
    Ok(ForecastResult { mean, variance })
}

/// Point forecasts only.
pub fn forecast_mean(
    spec: &ModelSpec,
    params: &ParameterVector,
    history: &HourlySeries,
    exog_history: Option<&ExogenousMatrix>,
    exog_future: Option<&ExogenousMatrix>,
    horizon: usize,
) -> Result<HourlySeries> {
    params.validate(spec)?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let future_cols: Vec<&[f64]> = if spec.exog_count > 0 {
        let future = exog_future.ok_or_else(|| {
            Error::MissingExogenousFuture(format!(
                "{} regressors required for {horizon} steps",
                spec.exog_count
            ))
        })?;
        if future.width() != spec.exog_count || future.len() < horizon {
            return Err(Error::MissingExogenousFuture(format!(
                "need {} regressors x {horizon} steps, got {} x {}",
                spec.exog_count,
                future.width(),
                future.len()
            )));
        }
        if future.start() != Some(history.end()) {
            return Err(Error::MissingExogenousFuture(format!(
                "future regressors must start at {}",
                history.end()
            )));
        }
        future
            .columns()
            .iter()
            .map(|c| &c.values()[..horizon])
            .collect()
    } else {
        Vec::new()
    };

    let data = WorkingData::new(spec, history, exog_history)?;
    let (mut ystar, presample) = data.deviations(params);
    let ar = lag_terms(&params.ar_polynomial(spec.season()));
    let ma = lag_terms(&params.ma_polynomial(spec.season()));
    let mut eps = residual_recursion(&ystar, presample, &ar, &ma);

    let m = ystar.len();
    for t in m..m + horizon {
        let mut v = 0.0;
        for &(h, a) in &ar {
            v -= a * if t >= h { ystar[t - h] } else { presample };
        }
        for &(h, c) in &ma {
            if t >= h {
                v += c * eps[t - h];
            }
        }
        ystar.push(v);
        eps.push(0.0);
    }

    // regressors on the differenced scale for the future steps
    let k = spec.diff.order();
    let diff = difference_polynomial(&spec.diff);
    let mut w_hat: Vec<f64> = ystar[m..].iter().map(|v| v + params.mu).collect();
    if let Some(hist) = exog_history {
        for ((g, past), future) in params.gamma.iter().zip(hist.columns()).zip(&future_cols) {
            let past = past.values();
            let mut joined = past[past.len() - k..].to_vec();
            joined.extend_from_slice(future);
            for (o, u) in w_hat.iter_mut().zip(diff.apply_slice(&joined)) {
                *o += g * u;
            }
        }
    }

    let levels = integrate_slice(&w_hat, history.values(), &spec.diff)?;
    HourlySeries::new(history.end(), levels, history.units())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar1(phi: f64) -> (ModelSpec, ParameterVector) {
        let spec = ModelSpec::arma(1, 0);
        let mut params = ParameterVector::zeros(&spec);
        params.phi = vec![phi];
        (spec, params)
    }

    fn sample_acf1(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let c0: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let c1: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        c1 / c0
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::arma(0, 0).with_constant(false).validate().is_ok());
        assert!(ModelSpec::arma(0, 0).validate().is_ok());
        let mut s = ModelSpec::arma(1, 0);
        s.seasonal_p = 1;
        assert!(s.validate().is_err());
        let s = ModelSpec::sarima((2, 0, 1), (1, 1, 1), 24);
        assert!(s.validate().is_ok());
        assert_eq!(s.ar_degree(), 26);
        assert_eq!(s.ma_degree(), 25);
        assert_eq!(s.min_length(), 50);
        assert_eq!(s.parameter_count(), 7);
    }

    #[test]
    fn parameter_validation() {
        let (spec, mut params) = ar1(1.0);
        assert!(matches!(
            params.validate(&spec),
            Err(Error::UnstableParameters(_))
        ));
        params.phi = vec![0.5];
        params.sigma2 = 0.0;
        assert!(params.validate(&spec).is_err());
        params.sigma2 = 1.0;
        params.phi = vec![0.5, 0.1];
        assert!(params.validate(&spec).is_err());

        let spec = ModelSpec::arma(0, 1);
        let mut params = ParameterVector::zeros(&spec);
        params.theta = vec![-1.2];
        assert!(matches!(
            params.validate(&spec),
            Err(Error::UnstableParameters(_))
        ));
    }

    #[test]
    fn white_noise_likelihood_on_zeros() {
        let spec = ModelSpec::arma(0, 0);
        let params = ParameterVector::zeros(&spec);
        let n = 50;
        let zeros = HourlySeries::new(default_simulation_start(), vec![0.0; n], Units::Dimensionless)
            .unwrap();
        let ll = log_likelihood(&spec, &params, &zeros, None).unwrap();
        let expected = -(n as f64) / 2.0 * (2.0 * std::f64::consts::PI).ln();
        assert!((ll - expected).abs() < 1e-10);
    }

    #[test]
    fn white_noise_residuals_are_adjusted_series() {
        let spec = ModelSpec::arma(0, 0).with_exog(1);
        let mut params = ParameterVector::zeros(&spec);
        params.gamma = vec![2.0];
        params.mu = 0.5;
        let y = HourlySeries::new(
            default_simulation_start(),
            vec![1.0, 4.0, -2.0],
            Units::Dimensionless,
        )
        .unwrap();
        let u = ExogenousMatrix::single(y.with_values(vec![1.0, 0.0, 1.0], Units::Dimensionless).unwrap());
        let e = residuals(&spec, &params, &y, Some(&u)).unwrap();
        assert_eq!(e.values(), &[1.0 - 0.5 - 2.0, 4.0 - 0.5, -2.0 - 0.5 - 2.0]);
    }

    #[test]
    fn simulation_is_deterministic_and_white_noise_moments_hold() {
        let spec = ModelSpec::arma(0, 0);
        let params = ParameterVector::zeros(&spec);
        let a = simulate(&spec, &params, 10_000, None, 42).unwrap();
        let b = simulate(&spec, &params, 10_000, None, 42).unwrap();
        assert_eq!(a, b);
        let mean = a.mean();
        let var = a.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn simulated_ar1_autocorrelation() {
        let (spec, params) = ar1(0.7);
        let y = simulate(&spec, &params, 10_000, None, 7).unwrap();
        assert!((sample_acf1(y.values()) - 0.7).abs() < 0.03);
    }

    #[test]
    fn simulate_requires_long_enough_regressors() {
        let spec = ModelSpec::arma(1, 0).with_exog(1);
        let params = ParameterVector::zeros(&spec);
        let u = ExogenousMatrix::single(
            HourlySeries::new(default_simulation_start(), vec![1.0; 10], Units::Dimensionless)
                .unwrap(),
        );
        assert!(simulate(&spec, &params, 10, Some(&u), 1).is_err());
        assert!(simulate(&spec, &params, 10, None, 1).is_err());
    }

    #[test]
    fn white_noise_forecast_is_mu_with_constant_variance() {
        let spec = ModelSpec::arma(0, 0);
        let mut params = ParameterVector::zeros(&spec);
        params.mu = 3.25;
        params.sigma2 = 2.0;
        let history = simulate(&spec, &params, 100, None, 1).unwrap();
        let f = forecast(&spec, &params, &history, None, None, 5).unwrap();
        assert!(f.mean.values().iter().all(|&v| v == 3.25));
        assert!(f.variance.iter().all(|&v| v == 2.0));
        assert_eq!(f.mean.start(), history.end());
    }

    #[test]
    fn ar1_one_step_and_psi_variances() {
        let (spec, mut params) = ar1(0.7);
        params.mu = 1.0;
        let history = simulate(&spec, &params, 200, None, 3).unwrap();
        let f = forecast(&spec, &params, &history, None, None, 3).unwrap();
        let last = *history.values().last().unwrap();
        assert!((f.mean.values()[0] - (1.0 + 0.7 * (last - 1.0))).abs() < 1e-12);
        let expected = [1.0, 1.49, 1.7301];
        for (v, e) in f.variance.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn forecast_needs_future_regressors() {
        let spec = ModelSpec::arma(1, 0).with_exog(1);
        let params = ParameterVector::zeros(&spec);
        let y = HourlySeries::new(default_simulation_start(), vec![0.5; 20], Units::Dimensionless)
            .unwrap();
        let u = ExogenousMatrix::single(y.clone());
        assert!(matches!(
            forecast(&spec, &params, &y, Some(&u), None, 2),
            Err(Error::MissingExogenousFuture(_))
        ));
        let short = ExogenousMatrix::single(y.slice(0, 1).unwrap().with_start(y.end()).unwrap());
        assert!(matches!(
            forecast(&spec, &params, &y, Some(&u), Some(&short), 2),
            Err(Error::MissingExogenousFuture(_))
        ));
    }

    #[test]
    fn seasonal_difference_forecast_repeats_last_season() {
        // pure seasonal random walk: forecasts repeat the last 24 values
        let spec = ModelSpec::sarima((0, 0, 0), (0, 1, 0), 24).with_constant(true);
        let params = ParameterVector::zeros(&spec);
        let values: Vec<f64> = (0..96).map(|t| ((t % 24) as f64) + 0.01 * t as f64).collect();
        let y = HourlySeries::new(default_simulation_start(), values.clone(), Units::Dimensionless)
            .unwrap();
        let f = forecast(&spec, &params, &y, None, None, 30).unwrap();
        for h in 0..30 {
            let expected = values[96 - 24 + (h % 24)];
            assert!((f.mean.values()[h] - expected).abs() < 1e-12);
        }
        // ψ_j = 1 at multiples of 24
        let psi = psi_weights(&spec, &params, 50);
        assert_eq!(psi[24], 1.0);
        assert_eq!(psi[48], 1.0);
        assert_eq!(psi[1], 0.0);
    }

    #[test]
    fn short_series_rejected() {
        let spec = ModelSpec::arma(3, 0);
        let params = ParameterVector::zeros(&spec);
        let y = HourlySeries::new(default_simulation_start(), vec![1.0; 3], Units::Dimensionless)
            .unwrap();
        assert!(matches!(
            log_likelihood(&spec, &params, &y, None),
            Err(Error::SeriesTooShort { .. })
        ));
    }
}

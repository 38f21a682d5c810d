//! Conditional maximum-likelihood fitting, BIC and grid order selection.
//!
//! ARMA coefficients are searched by Nelder–Mead over partial-autocorrelation
//! coordinates, so every trial point is stationary and invertible. For
//! fixed ARMA coefficients the residuals are affine in `μ` and `γ`, which
//! are therefore concentrated out by least squares, and `σ²` is profiled
//! as the mean squared residual.

pub mod nelder_mead;
pub mod reparam;

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::arima::{
    self, gaussian_log_likelihood, ExogenousMatrix, ForecastResult, ModelSpec, ParameterVector,
    WorkingData,
};
use crate::correlogram::{autocovariances, durbin_levinson};
use crate::error::{Error, Result};
use crate::garch::{self, GarchParams, GarchSpec};
use crate::series::HourlySeries;

/// Partial autocorrelations beyond this magnitude are flagged as boundary estimates.
const PARTIAL_BOUNDARY: f64 = 0.999;
/// GARCH weights below this are flagged as sitting on the zero boundary.
const GARCH_ZERO_BOUNDARY: f64 = 1e-4;
/// Two converged runs whose objectives agree to this relative precision are
/// taken to have found the same optimum, and the remaining restarts are skipped.
const RUN_AGREEMENT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-10,
            restarts: 3,
            seed: 0,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 100 {
            return Err(Error::InvalidArgument(
                "max_iterations must be at least 100".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-6) {
            return Err(Error::InvalidArgument(
                "tolerance must lie in (0, 1e-6]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Human-readable notes for estimates on a constraint boundary.
    pub boundary: Vec<String>,
}

/// GARCH layer fitted to a model's residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub spec: GarchSpec,
    pub params: GarchParams,
    pub loglik: f64,
    pub bic: f64,
    pub diagnostics: FitDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub params: ParameterVector,
    pub loglik: f64,
    pub bic: f64,
    pub n_effective: usize,
    pub residuals: HourlySeries,
    pub garch: Option<GarchFit>,
    pub diagnostics: FitDiagnostics,
}

impl FittedModel {
    /// Forecasts past the end of `history`. Point forecasts come from the
    /// mean equation alone; with a GARCH layer the per-step innovation
    /// variances are its variance forecasts instead of the constant `σ²`.
    pub fn forecast(
        &self,
        history: &HourlySeries,
        exog_history: Option<&ExogenousMatrix>,
        exog_future: Option<&ExogenousMatrix>,
        horizon: usize,
    ) -> Result<ForecastResult> {
        let mean = arima::forecast_mean(
            &self.spec,
            &self.params,
            history,
            exog_history,
            exog_future,
            horizon,
        )?;
        let innovation = match &self.garch {
            Some(layer) => {
                let resid = arima::residuals(&self.spec, &self.params, history, exog_history)?;
                garch::forecast_variance(&layer.params, &resid, horizon)?
            }
            None => vec![self.params.sigma2; horizon],
        };
        let psi = arima::psi_weights(&self.spec, &self.params, horizon);
        Ok(ForecastResult {
            mean,
            variance: arima::forecast_error_variances(&psi, &innovation),
        })
    }
}

/// `-2 ln L + k ln n`; `k` counts every estimated parameter including σ².
pub fn bic(loglik: f64, k: usize, n: f64) -> f64 {
    -2.0 * loglik + k as f64 * n.ln()
}

/// Layout of the optimizer vector: partials for φ, Φ, θ, Θ in that order.
struct Layout {
    p: usize,
    seasonal_p: usize,
    q: usize,
    seasonal_q: usize,
}

impl Layout {
    fn new(spec: &ModelSpec) -> Self {
        Self {
            p: spec.p,
            seasonal_p: spec.seasonal_p,
            q: spec.q,
            seasonal_q: spec.seasonal_q,
        }
    }

    fn dim(&self) -> usize {
        self.p + self.seasonal_p + self.q + self.seasonal_q
    }

    fn blocks<'a>(&self, x: &'a [f64]) -> [&'a [f64]; 4] {
        let (a, rest) = x.split_at(self.p);
        let (b, rest) = rest.split_at(self.seasonal_p);
        let (c, d) = rest.split_at(self.q);
        [a, b, c, d]
    }

    fn decode(&self, spec: &ModelSpec, x: &[f64]) -> ParameterVector {
        let [a, b, c, d] = self.blocks(x);
        ParameterVector {
            phi: reparam::to_coefficients(a),
            seasonal_phi: reparam::to_coefficients(b),
            theta: reparam::to_coefficients(c),
            seasonal_theta: reparam::to_coefficients(d),
            ..ParameterVector::zeros(spec)
        }
    }

    fn boundary_notes(&self, x: &[f64]) -> Vec<String> {
        let names = ["phi", "seasonal_phi", "theta", "seasonal_theta"];
        let mut notes = Vec::new();
        for (name, block) in names.iter().zip(self.blocks(x)) {
            for (i, v) in block.iter().enumerate() {
                if v.tanh().abs() > PARTIAL_BOUNDARY {
                    notes.push(format!(
                        "{name} partial autocorrelation {} near the unit circle",
                        i + 1
                    ));
                }
            }
        }
        notes
    }
}

/// Residual passes with `μ` and `γ` concentrated out.
struct Concentrated<'a> {
    spec: &'a ModelSpec,
    data: WorkingData,
    /// Presample levels of `w` and of each regressor column.
    w_mean: f64,
    du_means: Vec<f64>,
}

struct Solved {
    params: ParameterVector,
    residuals: Vec<f64>,
    sse: f64,
}

impl<'a> Concentrated<'a> {
    fn new(
        spec: &'a ModelSpec,
        series: &HourlySeries,
        exog: Option<&ExogenousMatrix>,
    ) -> Result<Self> {
        let data = WorkingData::new(spec, series, exog)?;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        Ok(Self {
            spec,
            w_mean: mean(&data.w),
            du_means: data.du.iter().map(|r| mean(r)).collect(),
            data,
        })
    }

    /// Residuals of a raw series under the ARMA filter with presample equal
    /// to its own mean; linear in the series.
    fn filter(ar: &[(usize, f64)], ma: &[(usize, f64)], series: &[f64], mean: f64) -> Vec<f64> {
        arima::residual_recursion(series, mean, ar, ma)
    }

    /// [`Self::filter`] of a column of ones: the output settles on a fixed
    /// point to within a few ulps, after which the rest is filled in
    /// without recursing.
    fn filter_ones(ar: &[(usize, f64)], ma: &[(usize, f64)], n: usize) -> Vec<f64> {
        let level = ar.iter().fold(1.0, |e, &(_, a)| e + a);
        let mut eps = vec![level; n];
        let reach = ma.last().map_or(0, |&(h, _)| h);
        let mut settled = 0;
        for t in 0..n {
            let mut e = level;
            for &(h, m) in ma.iter().rev() {
                if t >= h {
                    e -= m * eps[t - h];
                }
            }
            let still = t > 0 && (e - eps[t - 1]).abs() <= 4.0 * f64::EPSILON * e.abs();
            settled = if still { settled + 1 } else { 0 };
            eps[t] = e;
            if settled > reach {
                eps[t..].fill(e);
                break;
            }
        }
        eps
    }

    fn solve(&self, arma: ParameterVector) -> Option<Solved> {
        let season = self.data.season;
        let ar = arima::lag_terms(&arma.ar_polynomial(season));
        let ma = arima::lag_terms(&arma.ma_polynomial(season));
        let target = Self::filter(&ar, &ma, &self.data.w, self.w_mean);
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(self.data.du.len() + 1);
        if self.spec.constant {
            columns.push(Self::filter_ones(&ar, &ma, self.data.w.len()));
        }
        columns.extend(
            self.data
                .du
                .iter()
                .zip(&self.du_means)
                .map(|(r, &m)| Self::filter(&ar, &ma, r, m)),
        );
        let beta = least_squares(&target, &columns)?;
        let mut residuals = target;
        for (b, col) in beta.iter().zip(&columns) {
            for (e, c) in residuals.iter_mut().zip(col) {
                *e -= b * c;
            }
        }
        let sse = dot(&residuals, &residuals);
        let mut params = arma;
        let mut coef = beta.into_iter();
        if self.spec.constant {
            params.mu = coef.next().unwrap_or(0.0);
        }
        params.gamma = coef.collect();
        params.sigma2 = sse / residuals.len() as f64;
        Some(Solved {
            params,
            residuals,
            sse,
        })
    }

    /// Negative profiled log-likelihood.
    fn objective(&self, arma: ParameterVector) -> f64 {
        match self.solve(arma) {
            Some(s) if s.sse > 0.0 => {
                let m = s.residuals.len() as f64;
                0.5 * m * ((2.0 * std::f64::consts::PI * s.sse / m).ln() + 1.0)
            }
            _ => f64::INFINITY,
        }
    }
}

/// Dot product with four interleaved partial sums.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut lanes = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for i in 0..4 {
            lanes[i] += x[i] * y[i];
        }
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

/// Ordinary least squares via the normal equations; empty design gives `[]`.
fn least_squares(target: &[f64], columns: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = columns.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&columns[i], &columns[j]));
    let rhs = DVector::from_fn(k, |i, _| dot(&columns[i], target));
    let solution = gram.cholesky()?.solve(&rhs);
    solution
        .iter()
        .all(|v| v.is_finite())
        .then(|| solution.iter().copied().collect())
}

/// Partial autocorrelations of `values` at lags `spacing, 2·spacing, …`.
fn yule_walker_partials(values: &[f64], order: usize, spacing: usize) -> Vec<f64> {
    if order == 0 {
        return Vec::new();
    }
    let max_lag = order * spacing;
    if values.len() <= max_lag + 1 {
        return vec![0.0; order];
    }
    let gamma = autocovariances(values, max_lag);
    if !(gamma[0] > 0.0) {
        return vec![0.0; order];
    }
    let acf: Vec<f64> = (0..=order).map(|j| gamma[j * spacing] / gamma[0]).collect();
    durbin_levinson(&acf, order).pacf
}

fn starting_point(problem: &Concentrated, layout: &Layout) -> Vec<f64> {
    // regression-adjusted working series under white-noise errors
    let white = ParameterVector::zeros(problem.spec);
    let adjusted = problem
        .solve(white)
        .map(|s| s.residuals)
        .unwrap_or_else(|| problem.data.w.clone());
    let mut x = reparam::from_partials(&yule_walker_partials(&adjusted, layout.p, 1), 0.95);
    x.extend(reparam::from_partials(
        &yule_walker_partials(&adjusted, layout.seasonal_p, problem.data.season),
        0.95,
    ));
    x.extend(std::iter::repeat_n(0.0, layout.q + layout.seasonal_q));
    x
}

/// Fits `spec` to `series` by conditional maximum likelihood.
pub fn fit(
    spec: &ModelSpec,
    series: &HourlySeries,
    exog: Option<&ExogenousMatrix>,
    options: &FitOptions,
) -> Result<FittedModel> {
    options.validate()?;
    let problem = Concentrated::new(spec, series, exog)?;
    let layout = Layout::new(spec);
    let dim = layout.dim();
    let x0 = starting_point(&problem, &layout);
    let step = vec![0.1; dim];
    let jitter = Normal::new(0.0, 0.5).expect("valid jitter scale");
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let runs = if dim == 0 { 1 } else { options.restarts + 1 };
    let mut best: Option<nelder_mead::SimplexResult> = None;
    let mut iterations = 0;
    let mut evaluations = 0;
    for run in 0..runs {
        let start: Vec<f64> = if run == 0 {
            x0.clone()
        } else {
            x0.iter().map(|v| v + jitter.sample(&mut rng)).collect()
        };
        let result = nelder_mead::minimize(
            |x| problem.objective(layout.decode(spec, x)),
            &start,
            &step,
            options.max_iterations,
            options.tolerance,
        );
        iterations += result.iterations;
        evaluations += result.evaluations;
        if !result.converged || !result.value.is_finite() {
            log::debug!("fit run {run} for {spec:?} did not converge");
            continue;
        }
        let agrees = best.as_ref().is_some_and(|b| {
            (result.value - b.value).abs() <= RUN_AGREEMENT * (1.0 + b.value.abs())
        });
        if best.as_ref().is_none_or(|b| result.value < b.value) {
            best = Some(result);
        }
        if agrees {
            break;
        }
    }
    let best = best.ok_or_else(|| {
        Error::EstimationFailed(format!(
            "no start converged within {} iterations",
            options.max_iterations
        ))
    })?;

    let solved = problem
        .solve(layout.decode(spec, &best.x))
        .filter(|s| s.sse > 0.0)
        .ok_or_else(|| Error::EstimationFailed("degenerate residual variance".into()))?;
    // recompute through the plain recursion so the reported likelihood is
    // exactly what log_likelihood returns for these parameters
    let mut params = solved.params;
    let residuals = problem.data.residuals(&params);
    let n_effective = residuals.len();
    params.sigma2 = residuals.iter().map(|e| e * e).sum::<f64>() / n_effective as f64;
    if !(params.sigma2 > 0.0) {
        return Err(Error::EstimationFailed("degenerate residual variance".into()));
    }
    params.validate(spec)?;
    let loglik = gaussian_log_likelihood(&residuals, params.sigma2);
    Ok(FittedModel {
        spec: *spec,
        bic: bic(loglik, spec.parameter_count(), n_effective as f64),
        loglik,
        n_effective,
        residuals: HourlySeries::new(problem.data.start, residuals, series.units())?,
        params,
        garch: None,
        diagnostics: FitDiagnostics {
            converged: true,
            iterations,
            evaluations,
            boundary: layout.boundary_notes(&best.x),
        },
    })
}

/// One cell of a [`BicTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BicCell {
    Value(f64),
    Failed(String),
}

/// BIC over a `p × q` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicTable {
    pub p_values: Vec<usize>,
    pub q_values: Vec<usize>,
    /// `cells[i][j]` holds the result for `p_values[i]`, `q_values[j]`.
    pub cells: Vec<Vec<BicCell>>,
}

impl BicTable {
    /// Table from precomputed values (row per `p`, column per `q`).
    pub fn from_values(p_values: Vec<usize>, q_values: Vec<usize>, values: &[&[f64]]) -> Result<Self> {
        if values.len() != p_values.len() || values.iter().any(|r| r.len() != q_values.len()) {
            return Err(Error::InvalidArgument(
                "BIC matrix shape does not match its labels".into(),
            ));
        }
        Ok(Self {
            p_values,
            q_values,
            cells: values
                .iter()
                .map(|row| row.iter().map(|&v| BicCell::Value(v)).collect())
                .collect(),
        })
    }

    pub fn get(&self, p: usize, q: usize) -> Option<&BicCell> {
        let i = self.p_values.iter().position(|&v| v == p)?;
        let j = self.q_values.iter().position(|&v| v == q)?;
        Some(&self.cells[i][j])
    }

    /// `(p, q, bic)` of the minimal non-failed cell; ties go to the smaller
    /// `p + q`, then the smaller `q`.
    pub fn select(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let BicCell::Value(v) = cell else { continue };
                let (p, q) = (self.p_values[i], self.q_values[j]);
                let better = match best {
                    None => true,
                    Some((bp, bq, bv)) => {
                        v < &bv || (*v == bv && (p + q, q) < (bp + bq, bq))
                    }
                };
                if better {
                    best = Some((p, q, *v));
                }
            }
        }
        best
    }

    /// Fixed-width rendering with `p` rows and `q` columns.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>6}", "p \\ q");
        for q in &self.q_values {
            let _ = write!(out, "{q:>14}");
        }
        out.push('\n');
        for (p, row) in self.p_values.iter().zip(&self.cells) {
            let _ = write!(out, "{p:>6}");
            for cell in row {
                match cell {
                    BicCell::Value(v) => {
                        let _ = write!(out, "{v:>14.1}");
                    }
                    BicCell::Failed(_) => {
                        let _ = write!(out, "{:>14}", "failed");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Fits every `(p, q)` in the grid on top of `base`'s differencing,
/// seasonal and regression structure and returns the BIC-minimal spec.
pub fn grid_select(
    series: &HourlySeries,
    exog: Option<&ExogenousMatrix>,
    p_range: RangeInclusive<usize>,
    q_range: RangeInclusive<usize>,
    base: &ModelSpec,
    options: &FitOptions,
) -> Result<(ModelSpec, BicTable)> {
    let p_values: Vec<usize> = p_range.collect();
    let q_values: Vec<usize> = q_range.collect();
    if p_values.is_empty() || q_values.is_empty() {
        return Err(Error::InvalidArgument("order ranges must be non-empty".into()));
    }
    let cells: Vec<Vec<BicCell>> = p_values
        .iter()
        .map(|&p| {
            q_values
                .iter()
                .map(|&q| match fit(&base.with_orders(p, q), series, exog, options) {
                    Ok(f) => BicCell::Value(f.bic),
                    Err(e) => {
                        log::warn!("grid cell ({p}, {q}) failed: {e}");
                        BicCell::Failed(e.to_string())
                    }
                })
                .collect()
        })
        .collect();
    let table = BicTable {
        p_values,
        q_values,
        cells,
    };
    let (p, q, _) = table
        .select()
        .ok_or_else(|| Error::EstimationFailed("every grid cell failed".into()))?;
    Ok((base.with_orders(p, q), table))
}

struct GarchLayout {
    spec: GarchSpec,
}

impl GarchLayout {
    fn decode(&self, x: &[f64]) -> GarchParams {
        let weights = reparam::to_weights(&x[1..]);
        GarchParams {
            alpha0: x[0].exp(),
            alpha: weights[..self.spec.p].to_vec(),
            beta: weights[self.spec.p..].to_vec(),
        }
    }

    fn encode(&self, params: &GarchParams) -> Vec<f64> {
        let mut w = params.alpha.clone();
        w.extend(&params.beta);
        let mut x = vec![params.alpha0.ln()];
        x.extend(reparam::from_weights(&w));
        x
    }

    /// Start with `alpha_total` spread over the ARCH lags and `beta_total`
    /// over the GARCH lags, α0 matching the sample variance.
    fn start(&self, variance: f64, alpha_total: f64, beta_total: f64) -> GarchParams {
        let beta_total = if self.spec.q == 0 { 0.0 } else { beta_total };
        GarchParams {
            alpha0: variance * (1.0 - alpha_total - beta_total),
            alpha: vec![alpha_total / self.spec.p as f64; self.spec.p],
            beta: vec![beta_total / self.spec.q.max(1) as f64; self.spec.q],
        }
    }
}

/// Starting (Σα, Σβ) pairs tried before the jittered restarts.
const GARCH_STARTS: [(f64, f64); 3] = [(0.05, 0.05), (0.1, 0.8), (0.05, 0.93)];

fn fit_garch_detailed(
    residuals: &HourlySeries,
    gspec: GarchSpec,
    options: &FitOptions,
) -> Result<(GarchParams, FitDiagnostics)> {
    options.validate()?;
    GarchSpec::new(gspec.p, gspec.q)?;
    if residuals.len() < 100 {
        return Err(Error::SeriesTooShort {
            needed: 99,
            got: residuals.len(),
        });
    }
    let values = residuals.values();
    let variance = garch::presample_variance(values);
    let mean_square = values.iter().map(|e| e * e).sum::<f64>() / values.len() as f64;
    if !(variance > 1e-12 * mean_square.max(f64::MIN_POSITIVE)) || !(mean_square > 0.0) {
        return Err(Error::EstimationFailed(
            "residuals have zero variance".into(),
        ));
    }
    let layout = GarchLayout { spec: gspec };
    let dim = gspec.parameter_count();
    let step: Vec<f64> = std::iter::once(0.1).chain(std::iter::repeat_n(0.5, dim - 1)).collect();
    let objective = |x: &[f64]| -garch::log_likelihood_unchecked(&layout.decode(x), values);

    let jitter = Normal::new(0.0, 0.5).expect("valid jitter scale");
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts: Vec<Vec<f64>> = GARCH_STARTS
        .iter()
        .map(|&(a, b)| layout.encode(&layout.start(variance, a, b)))
        .collect();
    for _ in 0..options.restarts {
        let base = &starts[1];
        let jittered = base.iter().map(|v| v + jitter.sample(&mut rng)).collect();
        starts.push(jittered);
    }

    let mut best: Option<nelder_mead::SimplexResult> = None;
    let mut diagnostics = FitDiagnostics::default();
    for start in &starts {
        let result = nelder_mead::minimize(
            objective,
            start,
            &step,
            options.max_iterations,
            options.tolerance,
        );
        diagnostics.iterations += result.iterations;
        diagnostics.evaluations += result.evaluations;
        if !result.converged || !result.value.is_finite() {
            continue;
        }
        // keep the earlier start unless strictly better by more than the tolerance
        let margin = options.tolerance * (1.0 + result.value.abs());
        if best.as_ref().is_none_or(|b| result.value < b.value - margin) {
            best = Some(result);
        }
    }
    let best = best.ok_or_else(|| {
        Error::EstimationFailed("GARCH optimizer did not converge from any start".into())
    })?;
    let mut params = layout.decode(&best.x);
    // BIC against constant variance: weak ARCH effects leave β unidentified
    let constant = GarchParams {
        alpha0: mean_square,
        alpha: vec![0.0; gspec.p],
        beta: vec![0.0; gspec.q],
    };
    let gain = garch::log_likelihood_unchecked(&params, values)
        - garch::log_likelihood_unchecked(&constant, values);
    let penalty = 0.5 * (gspec.p + gspec.q) as f64 * (values.len() as f64).ln();
    if gain <= penalty {
        params = constant;
    }
    params.validate().map_err(|e| Error::EstimationFailed(e.to_string()))?;
    diagnostics.converged = true;
    for (name, values) in [("alpha", &params.alpha), ("beta", &params.beta)] {
        for (i, v) in values.iter().enumerate() {
            if *v < GARCH_ZERO_BOUNDARY {
                diagnostics
                    .boundary
                    .push(format!("{name}[{}] = {v:.2e} at the zero boundary", i + 1));
            }
        }
    }
    if params.persistence() > 0.999 {
        diagnostics
            .boundary
            .push("alpha + beta near the stationarity boundary".into());
    }
    Ok((params, diagnostics))
}

/// Maximizes the Gaussian GARCH quasi-likelihood of `residuals`.
pub fn fit_garch(
    residuals: &HourlySeries,
    gspec: GarchSpec,
    options: &FitOptions,
) -> Result<GarchParams> {
    fit_garch_detailed(residuals, gspec, options).map(|(p, _)| p)
}

/// Two-stage ARMA→GARCH: fits a GARCH layer on `arma_fit`'s residuals and
/// leaves the mean equation untouched.
pub fn attach_garch(
    arma_fit: &FittedModel,
    gspec: GarchSpec,
    options: &FitOptions,
) -> Result<FittedModel> {
    let (params, diagnostics) = fit_garch_detailed(&arma_fit.residuals, gspec, options)?;
    let loglik = garch::log_likelihood_unchecked(&params, arma_fit.residuals.values());
    let mut out = arma_fit.clone();
    out.garch = Some(GarchFit {
        spec: gspec,
        bic: bic(loglik, gspec.parameter_count(), arma_fit.residuals.len() as f64),
        loglik,
        params,
        diagnostics,
    });
    Ok(out)
}

#[cfg(test)]
mod tests;

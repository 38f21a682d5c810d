//! Rolling-origin evaluation against the day-ahead price baseline.
//!
//! The improvement index for horizon `i` is
//! `I_i = 1 - (1/n') Σ |RTLMP - RTLMP'| / |RTLMP - DALMP|` over the terms
//! whose denominator exceeds `epsilon`; excluded terms are counted.

use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::arima::{ExogenousMatrix, ModelSpec};
use crate::data_io::MarketDataset;
use crate::error::{Error, Result};
use crate::estimation::{attach_garch, fit, FitOptions, FittedModel};
use crate::garch::GarchSpec;
use crate::series::{
    check_aligned, clip_prices, delta_lmp, log_transform, weekend_indicator, ClipBounds,
    HourlySeries, LogOffset, Units,
};

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Which series is modeled and which regressor it uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    /// Seasonal ARIMA on transformed RTLMP.
    SarimaRtlmp,
    /// As above with transformed DALMP as regressor.
    SarimaxRtlmp,
    /// ARMA on transformed ΔLMP, reconstructed through published DALMP.
    ArmaDelta,
    /// As above with the weekday indicator as regressor.
    ArmaxDelta,
}

impl PipelineKind {
    pub fn models_delta(self) -> bool {
        matches!(self, Self::ArmaDelta | Self::ArmaxDelta)
    }

    pub fn regressor_count(self) -> usize {
        match self {
            Self::SarimaxRtlmp | Self::ArmaxDelta => 1,
            Self::SarimaRtlmp | Self::ArmaDelta => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::SarimaRtlmp => "SARIMA",
            Self::SarimaxRtlmp => "SARIMAX",
            Self::ArmaDelta => "ARMA",
            Self::ArmaxDelta => "ARMAX",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub kind: PipelineKind,
    pub clip: Option<ClipBounds>,
    pub log_offset: LogOffset,
    pub spec: ModelSpec,
    pub garch: Option<GarchSpec>,
    /// Back-transform with `exp(ŷ + v/2) - c` instead of `exp(ŷ) - c`.
    #[serde(default)]
    pub lognormal_correction: bool,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let want = self.kind.regressor_count();
        if self.spec.exog_count != want {
            return Err(Error::InvalidSpec(format!(
                "{} pipeline needs exactly {want} regressor(s), spec has {}",
                self.kind.label(),
                self.spec.exog_count
            )));
        }
        if let Some(g) = self.garch {
            GarchSpec::new(g.p, g.q)?;
        }
        Ok(())
    }

    /// Display name such as `ARMAX-GARCH`.
    pub fn name(&self) -> String {
        match self.garch {
            Some(_) => format!("{}-GARCH", self.kind.label()),
            None => self.kind.label().to_string(),
        }
    }

    /// Clipped, log-transformed series the model sees.
    pub fn target(&self, data: &MarketDataset) -> Result<HourlySeries> {
        let raw = if self.kind.models_delta() {
            delta_lmp(&data.dalmp, &data.rtlmp)?
        } else {
            data.rtlmp.clone()
        };
        let clipped = match self.clip {
            Some(bounds) => clip_prices(&raw, bounds),
            None => raw,
        };
        log_transform(&clipped, self.log_offset)
    }

    /// Regressors over the calendar of `dalmp`.
    pub fn regressors(&self, dalmp: &HourlySeries) -> Result<Option<ExogenousMatrix>> {
        Ok(match self.kind {
            PipelineKind::SarimaxRtlmp => {
                Some(ExogenousMatrix::single(log_transform(dalmp, self.log_offset)?))
            }
            PipelineKind::ArmaxDelta => Some(ExogenousMatrix::single(weekend_indicator(
                dalmp.start(),
                dalmp.len(),
            )?)),
            PipelineKind::SarimaRtlmp | PipelineKind::ArmaDelta => None,
        })
    }
}

/// Forecasts from a fitted pipeline, in $/MWh and on the model scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineForecast {
    pub rtlmp: HourlySeries,
    pub model_mean: Vec<f64>,
    pub model_variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub config: PipelineConfig,
    pub model: FittedModel,
}

impl FittedPipeline {
    pub fn fit(config: &PipelineConfig, train: &MarketDataset, options: &FitOptions) -> Result<Self> {
        config.validate()?;
        let y = config.target(train)?;
        let exog = config.regressors(&train.dalmp)?;
        let mut model = fit(&config.spec, &y, exog.as_ref(), options)?;
        if let Some(g) = config.garch {
            model = attach_garch(&model, g, options)?;
        }
        Ok(Self {
            config: config.clone(),
            model,
        })
    }

    /// RTLMP forecasts for `future_dalmp.len()` steps after `history`.
    ///
    /// `future_dalmp` is the published day-ahead price for the forecast
    /// hours; it feeds the SARIMAX regressor and the ΔLMP reconstruction.
    pub fn forecast(
        &self,
        history: &MarketDataset,
        future_dalmp: &HourlySeries,
    ) -> Result<PipelineForecast> {
        let config = &self.config;
        if future_dalmp.start() != history.end() {
            return Err(Error::Alignment(format!(
                "future DALMP starts at {}, history ends at {}",
                future_dalmp.start(),
                history.end()
            )));
        }
        let horizon = future_dalmp.len();
        let y = config.target(history)?;
        let exog_history = config.regressors(&history.dalmp)?;
        let exog_future = config.regressors(future_dalmp)?;
        let f = self
            .model
            .forecast(&y, exog_history.as_ref(), exog_future.as_ref(), horizon)?;
        let c = config.log_offset.value();
        let level: Vec<f64> = f
            .mean
            .values()
            .iter()
            .zip(&f.variance)
            .map(|(m, v)| {
                if config.lognormal_correction {
                    (m + v / 2.0).exp() - c
                } else {
                    m.exp() - c
                }
            })
            .collect();
        let rtlmp: Vec<f64> = if config.kind.models_delta() {
            future_dalmp
                .values()
                .iter()
                .zip(&level)
                .map(|(da, delta)| da - delta)
                .collect()
        } else {
            level
        };
        Ok(PipelineForecast {
            rtlmp: future_dalmp.with_values(rtlmp, Units::DollarsPerMwh)?,
            model_mean: f.mean.into_values(),
            model_variance: f.variance,
        })
    }
}

/// Anything that can issue RTLMP forecasts at a backtest origin.
pub trait Forecaster {
    fn name(&self) -> String;

    /// Forecasts for the hours of `future`, which starts at `history.end()`.
    /// Honest forecasters read only `future.dalmp`, which is published a
    /// day ahead; realized RTLMP is there for reference forecasters.
    fn forecast(&mut self, history: &MarketDataset, future: &MarketDataset) -> Result<Vec<f64>>;
}

/// Uses DALMP as the RTLMP forecast.
#[derive(Debug, Clone, Copy, Default)]
pub struct DalmpBaseline;

impl Forecaster for DalmpBaseline {
    fn name(&self) -> String {
        "DALMP".into()
    }

    fn forecast(&mut self, _history: &MarketDataset, future: &MarketDataset) -> Result<Vec<f64>> {
        Ok(future.dalmp.values().to_vec())
    }
}

/// Returns realized RTLMP: the upper bound of the index.
#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle;

impl Forecaster for Oracle {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn forecast(&mut self, _history: &MarketDataset, future: &MarketDataset) -> Result<Vec<f64>> {
        Ok(future.rtlmp.values().to_vec())
    }
}

/// How often a pipeline is re-estimated during a backtest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefitPolicy {
    #[default]
    FitOnce,
    /// Refit on all data seen so far every `n` origins.
    Every(usize),
}

/// A fitted pipeline driven through the [`Forecaster`] interface.
#[derive(Debug, Clone)]
pub struct PipelineForecaster {
    pub fitted: FittedPipeline,
    refit: RefitPolicy,
    options: FitOptions,
    calls: usize,
}

impl PipelineForecaster {
    pub fn new(
        config: &PipelineConfig,
        train: &MarketDataset,
        refit: RefitPolicy,
        options: &FitOptions,
    ) -> Result<Self> {
        if refit == RefitPolicy::Every(0) {
            return Err(Error::InvalidArgument("refit interval must be positive".into()));
        }
        Ok(Self {
            fitted: FittedPipeline::fit(config, train, options)?,
            refit,
            options: *options,
            calls: 0,
        })
    }
}

impl Forecaster for PipelineForecaster {
    fn name(&self) -> String {
        self.fitted.config.name()
    }

    fn forecast(&mut self, history: &MarketDataset, future: &MarketDataset) -> Result<Vec<f64>> {
        if let RefitPolicy::Every(k) = self.refit {
            if self.calls > 0 && self.calls.is_multiple_of(k) {
                self.fitted = FittedPipeline::fit(&self.fitted.config, history, &self.options)?;
            }
        }
        self.calls += 1;
        Ok(self.fitted.forecast(history, &future.dalmp)?.rtlmp.into_values())
    }
}

/// Value of the improvement index with its exclusion ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub percent: f64,
    pub included: usize,
    pub excluded: usize,
}

fn improvement_terms(actual: &[f64], forecast: &[f64], dalmp: &[f64], epsilon: f64) -> Result<Improvement> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut sum = 0.0;
    let mut included = 0;
    for ((a, f), d) in actual.iter().zip(forecast).zip(dalmp) {
        let denom = (a - d).abs();
        if denom > epsilon {
            sum += (a - f).abs() / denom;
            included += 1;
        }
    }
    if included == 0 {
        return Err(Error::AllTermsExcluded);
    }
    Ok(Improvement {
        percent: 100.0 * (1.0 - sum / included as f64),
        included,
        excluded: actual.len() - included,
    })
}

/// Improvement of `forecast` over `dalmp` as predictors of `actual`, in percent.
pub fn improvement_index(
    actual: &HourlySeries,
    forecast: &HourlySeries,
    dalmp: &HourlySeries,
    epsilon: f64,
) -> Result<Improvement> {
    check_aligned(actual, forecast)?;
    check_aligned(actual, dalmp)?;
    improvement_terms(actual.values(), forecast.values(), dalmp.values(), epsilon)
}

/// Mean absolute error.
pub fn mae(actual: &HourlySeries, forecast: &HourlySeries) -> Result<f64> {
    check_aligned(actual, forecast)?;
    Ok(mean_abs_diff(actual.values(), forecast.values()))
}

fn mean_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonScore {
    pub horizon: usize,
    pub improvement_pct: f64,
    pub mae: f64,
    pub baseline_mae: f64,
    pub terms: usize,
    pub excluded: usize,
}

/// One-step forecast next to the realized and day-ahead prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayRow {
    pub timestamp: DateTime<Utc>,
    pub actual: f64,
    pub forecast: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub model: String,
    pub window_start: DateTime<Utc>,
    pub window_end: DateTime<Utc>,
    pub origins: usize,
    pub epsilon: f64,
    pub horizons: Vec<HorizonScore>,
    pub overlay: Vec<OverlayRow>,
}

impl BacktestReport {
    pub fn improvement(&self, horizon: usize) -> Option<f64> {
        self.horizons
            .iter()
            .find(|h| h.horizon == horizon)
            .map(|h| h.improvement_pct)
    }
}

/// Steps the origin through every hour of `test`, issuing `1..=horizon`
/// step forecasts from all data before the origin. Forecasts that would
/// land past the end of `test` are not requested.
pub fn run_backtest(
    forecaster: &mut dyn Forecaster,
    train: &MarketDataset,
    test: &MarketDataset,
    horizon: usize,
    epsilon: f64,
) -> Result<BacktestReport> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if test.start() != train.end() {
        return Err(Error::Alignment(format!(
            "test window starts at {}, training data ends at {}",
            test.start(),
            train.end()
        )));
    }
    let n = test.len();
    if horizon > n {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} exceeds the {n}-hour test window"
        )));
    }
    let mut forecasts: Vec<Vec<f64>> = (1..=horizon).map(|i| Vec::with_capacity(n - i + 1)).collect();
    let mut history = train.clone();
    for j in 0..n {
        if j > 0 {
            history = history.concat(&test.slice(j - 1, 1)?)?;
        }
        let steps = horizon.min(n - j);
        let future = test.slice(j, steps)?;
        let f = forecaster.forecast(&history, &future)?;
        if f.len() != steps {
            return Err(Error::InvalidArgument(format!(
                "{} returned {} forecasts for {steps} steps",
                forecaster.name(),
                f.len()
            )));
        }
        for (i, v) in f.into_iter().enumerate() {
            forecasts[i].push(v);
        }
    }

    let actual = test.rtlmp.values();
    let dalmp = test.dalmp.values();
    let horizons = forecasts
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let target = &actual[k..];
            let baseline = &dalmp[k..];
            let score = improvement_terms(target, f, baseline, epsilon)?;
            Ok(HorizonScore {
                horizon: k + 1,
                improvement_pct: score.percent,
                mae: mean_abs_diff(target, f),
                baseline_mae: mean_abs_diff(target, baseline),
                terms: f.len(),
                excluded: score.excluded,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let overlay = (0..n)
        .map(|t| OverlayRow {
            timestamp: test.rtlmp.timestamp(t),
            actual: actual[t],
            forecast: forecasts[0][t],
            baseline: dalmp[t],
        })
        .collect();
    Ok(BacktestReport {
        model: forecaster.name(),
        window_start: test.start(),
        window_end: test.end(),
        origins: n,
        epsilon,
        horizons,
        overlay,
    })
}

/// Fits `config` on `train` and runs [`run_backtest`] over `test`.
pub fn rolling_backtest(
    config: &PipelineConfig,
    train: &MarketDataset,
    test: &MarketDataset,
    horizon: usize,
    refit: RefitPolicy,
    options: &FitOptions,
    epsilon: f64,
) -> Result<BacktestReport> {
    let mut forecaster = PipelineForecaster::new(config, train, refit, options)?;
    run_backtest(&mut forecaster, train, test, horizon, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub improvement_pct: Vec<f64>,
    pub mae: Vec<f64>,
}

/// Improvement indices and MAE of several models over one test window,
/// best `I_1` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub window_start: DateTime<Utc>,
    pub window_end: DateTime<Utc>,
    pub horizons: Vec<usize>,
    pub baseline_mae: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_models(reports: &[(String, BacktestReport)]) -> Result<ComparisonTable> {
    let Some((_, first)) = reports.first() else {
        return Err(Error::InvalidArgument("no reports to compare".into()));
    };
    let horizons: Vec<usize> = first.horizons.iter().map(|h| h.horizon).collect();
    for (name, r) in reports {
        if r.window_start != first.window_start || r.window_end != first.window_end {
            return Err(Error::MismatchedWindows(format!(
                "{name} covers {}..{}, expected {}..{}",
                r.window_start, r.window_end, first.window_start, first.window_end
            )));
        }
        if r.horizons.iter().map(|h| h.horizon).ne(horizons.iter().copied()) {
            return Err(Error::MismatchedWindows(format!(
                "{name} reports a different horizon set"
            )));
        }
    }
    let mut rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|(name, r)| ComparisonRow {
            model: name.clone(),
            improvement_pct: r.horizons.iter().map(|h| h.improvement_pct).collect(),
            mae: r.horizons.iter().map(|h| h.mae).collect(),
        })
        .collect();
    rows.sort_by(|a, b| b.improvement_pct[0].total_cmp(&a.improvement_pct[0]));
    Ok(ComparisonTable {
        window_start: first.window_start,
        window_end: first.window_end,
        horizons,
        baseline_mae: first.horizons.iter().map(|h| h.baseline_mae).collect(),
        rows,
    })
}

impl ComparisonTable {
    /// Fixed-width table: `I_i (%)` per horizon, then one-step MAE.
    pub fn render(&self) -> String {
        let name_width = self
            .rows
            .iter()
            .map(|r| r.model.len())
            .chain(["Model".len(), "DALMP".len()])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = write!(out, "{:<name_width$}", "Model");
        for h in &self.horizons {
            let _ = write!(out, " {:>9}", format!("I_{h} (%)"));
        }
        let _ = writeln!(out, " {:>9}", "MAE_1");
        for row in &self.rows {
            let _ = write!(out, "{:<name_width$}", row.model);
            for v in &row.improvement_pct {
                let _ = write!(out, " {v:>9.2}");
            }
            let _ = writeln!(out, " {:>9.2}", row.mae[0]);
        }
        let _ = write!(out, "{:<name_width$}", "DALMP");
        for _ in &self.horizons {
            let _ = write!(out, " {:>9.2}", 0.0);
        }
        let _ = writeln!(out, " {:>9.2}", self.baseline_mae[0]);
        out
    }

    /// `model,I_1,..,I_h,MAE_1,..,MAE_h` with LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model");
        for h in &self.horizons {
            let _ = write!(out, ",I_{h}");
        }
        for h in &self.horizons {
            let _ = write!(out, ",MAE_{h}");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.model);
            for v in row.improvement_pct.iter().chain(&row.mae) {
                let _ = write!(out, ",{v:.4}");
            }
            out.push('\n');
        }
        out
    }
}

//! Run configuration read from a TOML file.
//!
//! Every section and key is optional. Unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//!
//! [data]
//! input = "market.csv"     # omit to use the synthetic market below
//! node = "MISO.HUB"
//! gap_policy = "reject"    # reject | forward-fill | interpolate
//!
//! [synth]
//! length = 2352
//! weekend_effect = 3.0
//! spike_rate = 0.01
//!
//! [pipeline]
//! preset = "armax-paper"   # sarima-paper | sarimax-paper | arma-paper | armax-paper | dalmp-baseline
//! garch = true
//!
//! [grid]
//! p = [1, 5]
//! q = [1, 5]
//!
//! [window]
//! train_end = "2015-03-30T00:00Z"
//! test_hours = 336
//!
//! [backtest]
//! horizon = 12
//! epsilon = 1e-6
//! refit_every = 24
//!
//! [fit]
//! max_iterations = 5000
//! tolerance = 1e-10
//! restarts = 3
//! ```
//!
//! A fully explicit pipeline goes in `[pipeline.custom]` and takes
//! precedence over `preset`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::{DateTime, Utc};
use lmp_forecast::backtest::{PipelineConfig, RefitPolicy, DEFAULT_EPSILON};
use lmp_forecast::data_io::{parse_timestamp, CsvOptions, GapPolicy, SynthConfig};
use lmp_forecast::estimation::FitOptions;
use lmp_forecast::presets::{preset, PRESET_NAMES};
use serde::{Deserialize, Serialize};

pub const BASELINE_PRESET: &str = "dalmp-baseline";

/// Problems with flags or the config file, as opposed to the data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub data: DataSection,
    pub synth: SynthSection,
    pub pipeline: PipelineSection,
    pub grid: GridSection,
    pub window: WindowSection,
    pub backtest: BacktestSection,
    pub fit: FitSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub node: String,
    pub gap_policy: GapPolicy,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            input: None,
            node: CsvOptions::default().node,
            gap_policy: GapPolicy::Reject,
        }
    }
}

/// Overrides on top of the default synthetic market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    pub node: String,
    pub start: String,
    pub length: usize,
    pub weekend_effect: f64,
    pub spike_rate: f64,
    pub spike_min: f64,
    pub spike_max: f64,
    /// GARCH(1,1) innovations in the ΔLMP process.
    pub delta_garch: bool,
}

impl Default for SynthSection {
    fn default() -> Self {
        let d = SynthConfig::default();
        Self {
            node: d.node,
            start: lmp_forecast::data_io::format_timestamp(d.start),
            length: 24 * 7 * 14,
            weekend_effect: d.weekend_effect,
            spike_rate: d.spike_rate,
            spike_min: d.spike_min,
            spike_max: d.spike_max,
            delta_garch: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineSection {
    pub preset: String,
    pub garch: bool,
    pub lognormal_correction: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom: Option<PipelineConfig>,
}

impl Default for PipelineSection {
    fn default() -> Self {
        Self {
            preset: "armax-paper".into(),
            garch: false,
            lognormal_correction: false,
            custom: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub p: [usize; 2],
    pub q: [usize; 2],
}

impl Default for GridSection {
    fn default() -> Self {
        Self { p: [1, 5], q: [1, 5] }
    }
}

/// Training runs from the first hour up to `train_end` (exclusive); the
/// test window follows it. Without `train_end` the last `test_hours`
/// hours are held out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_end: Option<String>,
    pub test_hours: usize,
}

impl Default for WindowSection {
    fn default() -> Self {
        Self {
            train_end: None,
            test_hours: 24 * 7 * 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BacktestSection {
    pub horizon: usize,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refit_every: Option<usize>,
}

impl Default for BacktestSection {
    fn default() -> Self {
        Self {
            horizon: 12,
            epsilon: DEFAULT_EPSILON,
            refit_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub restarts: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        let d = FitOptions::default();
        Self {
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            restarts: d.restarts,
        }
    }
}

/// What the `[pipeline]` section resolves to.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Baseline,
    Pipeline(PipelineConfig),
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).map_err(|e| UsageError(format!("config {}: {e:#}", path.display())).into())
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> anyhow::Result<()> {
        self.model()?;
        if self.grid.p[0] > self.grid.p[1] || self.grid.q[0] > self.grid.q[1] {
            bail!("grid ranges must be [low, high] with low <= high");
        }
        if self.backtest.horizon == 0 {
            bail!("backtest.horizon must be at least 1");
        }
        if self.backtest.refit_every == Some(0) {
            bail!("backtest.refit_every must be positive");
        }
        if let Some(end) = &self.window.train_end {
            parse_timestamp(end).with_context(|| format!("window.train_end {end:?}"))?;
        }
        parse_timestamp(&self.synth.start)
            .with_context(|| format!("synth.start {:?}", self.synth.start))?;
        self.fit_options().validate()?;
        Ok(())
    }

    pub fn model(&self) -> anyhow::Result<Model> {
        let section = &self.pipeline;
        let mut config = if let Some(custom) = &section.custom {
            custom.clone()
        } else if section.preset == BASELINE_PRESET {
            return Ok(Model::Baseline);
        } else {
            preset(&section.preset, section.garch).ok_or_else(|| {
                UsageError(format!(
                    "unknown preset {:?}; expected one of {}, {BASELINE_PRESET}",
                    section.preset,
                    PRESET_NAMES.join(", ")
                ))
            })?
        };
        config.lognormal_correction |= section.lognormal_correction;
        config.validate()?;
        Ok(Model::Pipeline(config))
    }

    pub fn pipeline(&self) -> anyhow::Result<PipelineConfig> {
        match self.model()? {
            Model::Pipeline(config) => Ok(config),
            Model::Baseline => Err(UsageError(format!(
                "the {BASELINE_PRESET} preset has no model to fit"
            ))
            .into()),
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            max_iterations: self.fit.max_iterations,
            tolerance: self.fit.tolerance,
            restarts: self.fit.restarts,
            seed: self.seed,
        }
    }

    pub fn synth_config(&self) -> anyhow::Result<SynthConfig> {
        let s = &self.synth;
        let mut config = SynthConfig {
            node: s.node.clone(),
            start: parse_timestamp(&s.start).context("synth.start")?,
            length: s.length,
            seed: self.seed,
            weekend_effect: s.weekend_effect,
            spike_rate: s.spike_rate,
            spike_min: s.spike_min,
            spike_max: s.spike_max,
            ..SynthConfig::default()
        };
        if !s.delta_garch {
            config.delta_garch = None;
        }
        Ok(config)
    }

    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            node: self.data.node.clone(),
            gap_policy: self.data.gap_policy,
        }
    }

    pub fn train_end(&self) -> Option<DateTime<Utc>> {
        self.window.train_end.as_deref().and_then(parse_timestamp)
    }

    pub fn refit(&self) -> RefitPolicy {
        self.backtest.refit_every.map_or(RefitPolicy::FitOnce, RefitPolicy::Every)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("sede = 3").is_err());
        assert!(RunConfig::parse("[pipeline]\npreset = \"arma-paper\"\ngrach = true").is_err());
    }

    #[test]
    fn echoed_config_parses_back() {
        let config = RunConfig::parse(
            "seed = 4\n[pipeline]\npreset = \"arma-paper\"\ngarch = true\n[window]\ntrain_end = \"2015-02-02T00:00Z\"",
        )
        .unwrap();
        assert_eq!(RunConfig::parse(&config.to_toml()).unwrap(), config);
        let pipeline = config.pipeline().unwrap();
        assert_eq!(pipeline.name(), "ARMA-GARCH");
    }

    #[test]
    fn custom_pipeline_round_trips() {
        let mut config = RunConfig::default();
        let mut custom = preset("sarimax-paper", true).unwrap();
        custom.spec.p = 1;
        config.pipeline.custom = Some(custom.clone());
        let back = RunConfig::parse(&config.to_toml()).unwrap();
        assert_eq!(back.pipeline().unwrap(), custom);
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(RunConfig::parse("[pipeline]\npreset = \"arima\"").is_err());
        assert!(RunConfig::parse("[grid]\np = [3, 1]").is_err());
        assert!(RunConfig::parse("[backtest]\nhorizon = 0").is_err());
        assert!(RunConfig::parse("[window]\ntrain_end = \"yesterday\"").is_err());
        assert!(RunConfig::parse("[fit]\ntolerance = 0.5").is_err());
    }

    #[test]
    fn baseline_preset_has_no_pipeline() {
        let config = RunConfig::parse("[pipeline]\npreset = \"dalmp-baseline\"").unwrap();
        assert_eq!(config.model().unwrap(), Model::Baseline);
        assert!(config.pipeline().is_err());
    }
}

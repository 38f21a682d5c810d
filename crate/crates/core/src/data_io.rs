//! Paired DALMP/RTLMP datasets: CSV ingestion and export, a seeded synthetic
//! market, and plot-ready data files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDateTime, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::arima::{self, default_simulation_start, ModelSpec, ParameterVector};
use crate::backtest::{BacktestReport, OverlayRow};
use crate::correlogram::{sample_acf, sample_pacf};
use crate::error::{Error, Result};
use crate::garch::{self, GarchParams};
use crate::series::{check_aligned, delta_lmp, is_whole_hour, weekend_indicator, HourlySeries};

pub const CSV_HEADER: [&str; 3] = ["timestamp", "dalmp", "rtlmp"];

/// Day-ahead and real-time prices for one node on a shared hourly calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketDataset {
    pub node: String,
    pub dalmp: HourlySeries,
    pub rtlmp: HourlySeries,
}

impl MarketDataset {
    pub fn new(node: impl Into<String>, dalmp: HourlySeries, rtlmp: HourlySeries) -> Result<Self> {
        check_aligned(&dalmp, &rtlmp)?;
        Ok(Self {
            node: node.into(),
            dalmp,
            rtlmp,
        })
    }

    pub fn len(&self) -> usize {
        self.dalmp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dalmp.is_empty()
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.dalmp.start()
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.dalmp.end()
    }

    pub fn slice(&self, offset: usize, len: usize) -> Result<Self> {
        Ok(Self {
            node: self.node.clone(),
            dalmp: self.dalmp.slice(offset, len)?,
            rtlmp: self.rtlmp.slice(offset, len)?,
        })
    }

    /// Splits into `[0, at)` and `[at, len)`.
    pub fn split_at(&self, at: usize) -> Result<(Self, Self)> {
        if at == 0 || at >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "split point {at} must fall inside 1..{}",
                self.len()
            )));
        }
        Ok((self.slice(0, at)?, self.slice(at, self.len() - at)?))
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            node: self.node.clone(),
            dalmp: self.dalmp.concat(&other.dalmp)?,
            rtlmp: self.rtlmp.concat(&other.rtlmp)?,
        })
    }

    /// `DALMP - RTLMP`.
    pub fn delta(&self) -> HourlySeries {
        delta_lmp(&self.dalmp, &self.rtlmp).expect("dataset series are aligned")
    }
}

/// What to do with hours missing from an input file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    #[default]
    Reject,
    ForwardFill,
    Interpolate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub node: String,
    pub gap_policy: GapPolicy,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            node: "node".into(),
            gap_policy: GapPolicy::Reject,
        }
    }
}

/// Accepts RFC 3339 and the shorter `2015-01-05T00:00Z` form.
pub fn parse_timestamp(text: &str) -> Option<DateTime<Utc>> {
    let text = text.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(text) {
        return Some(ts.with_timezone(&Utc));
    }
    let naive = text.strip_suffix('Z').unwrap_or(text);
    ["%Y-%m-%dT%H:%M", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%d %H:%M:%S"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(naive, f).ok())
        .map(|n| n.and_utc())
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%MZ").to_string()
}

fn parse_price(field: &str, line: usize, column: &str) -> Result<f64> {
    let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{column} value {field:?} is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{column} value {field:?} is not finite"),
        });
    }
    Ok(value)
}

/// Reads `timestamp,dalmp,rtlmp` rows. Duplicate hours are averaged;
/// timestamps must not go backwards.
pub fn read_lmp_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<MarketDataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Schema(format!(
            "expected header {:?}, found {:?}",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    // (timestamp, dalmp sum, rtlmp sum, count)
    let mut rows: Vec<(DateTime<Utc>, f64, f64, usize)> = Vec::new();
    for record in csv.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let ts = parse_timestamp(&record[0]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unreadable timestamp {:?}", &record[0]),
        })?;
        if !is_whole_hour(ts) {
            return Err(Error::Parse {
                line,
                message: format!("timestamp {ts} is not on a whole hour"),
            });
        }
        let da = parse_price(&record[1], line, "dalmp")?;
        let rt = parse_price(&record[2], line, "rtlmp")?;
        match rows.last_mut() {
            Some(last) if last.0 == ts => {
                log::warn!("line {line}: duplicate hour {ts}, averaging");
                last.1 += da;
                last.2 += rt;
                last.3 += 1;
            }
            Some(last) if last.0 > ts => {
                return Err(Error::Schema(format!(
                    "line {line}: timestamp {ts} is earlier than {}",
                    last.0
                )));
            }
            _ => rows.push((ts, da, rt, 1)),
        }
    }
    let Some(&(start, ..)) = rows.first() else {
        return Err(Error::Schema("file has no data rows".into()));
    };

    let mut dalmp = Vec::with_capacity(rows.len());
    let mut rtlmp = Vec::with_capacity(rows.len());
    let mut filled = 0usize;
    let mut previous: Option<(DateTime<Utc>, f64, f64)> = None;
    for (ts, da_sum, rt_sum, count) in rows {
        let (da, rt) = (da_sum / count as f64, rt_sum / count as f64);
        if let Some((prev_ts, prev_da, prev_rt)) = previous {
            let missing = (ts - prev_ts).num_hours() - 1;
            if missing > 0 {
                match options.gap_policy {
                    GapPolicy::Reject => return Err(Error::Gap(prev_ts + Duration::hours(1))),
                    GapPolicy::ForwardFill => {
                        for _ in 0..missing {
                            dalmp.push(prev_da);
                            rtlmp.push(prev_rt);
                        }
                    }
                    GapPolicy::Interpolate => {
                        let span = (missing + 1) as f64;
                        for k in 1..=missing {
                            let w = k as f64 / span;
                            dalmp.push(prev_da + w * (da - prev_da));
                            rtlmp.push(prev_rt + w * (rt - prev_rt));
                        }
                    }
                }
                filled += missing as usize;
            }
        }
        dalmp.push(da);
        rtlmp.push(rt);
        previous = Some((ts, da, rt));
    }
    if filled > 0 {
        log::warn!("filled {filled} missing hours ({:?})", options.gap_policy);
    }
    MarketDataset::new(
        options.node.clone(),
        HourlySeries::prices(start, dalmp)?,
        HourlySeries::prices(start, rtlmp)?,
    )
}

pub fn load_lmp_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<MarketDataset> {
    read_lmp_csv(BufReader::new(File::open(path)?), options)
}

/// Writes the dataset with prices at six decimal places and LF line endings.
pub fn write_lmp_csv<W: Write>(dataset: &MarketDataset, writer: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    out.write_record(CSV_HEADER)?;
    for (t, (da, rt)) in dataset
        .dalmp
        .values()
        .iter()
        .zip(dataset.rtlmp.values())
        .enumerate()
    {
        out.write_record([
            format_timestamp(dataset.dalmp.timestamp(t)),
            format!("{da:.6}"),
            format!("{rt:.6}"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_lmp_csv(dataset: &MarketDataset, path: impl AsRef<Path>) -> Result<()> {
    write_lmp_csv(dataset, BufWriter::new(File::create(path)?))
}

/// Generator settings for [`synth_market`].
///
/// ΔLMP is drawn from `delta_spec`/`delta_params` (with GARCH innovations
/// when `delta_garch` is set) and then shifted by `weekend_effect` on
/// weekday hours, so weekend ΔLMP sits `weekend_effect` below weekday
/// ΔLMP. RTLMP is `DALMP - ΔLMP` plus spikes whose magnitude is uniform on
/// `[spike_min, spike_max]` with a random sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub node: String,
    pub start: DateTime<Utc>,
    pub length: usize,
    pub seed: u64,
    pub dalmp_spec: ModelSpec,
    pub dalmp_params: ParameterVector,
    pub delta_spec: ModelSpec,
    pub delta_params: ParameterVector,
    pub delta_garch: Option<GarchParams>,
    pub weekend_effect: f64,
    pub spike_rate: f64,
    pub spike_min: f64,
    pub spike_max: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let dalmp_spec = ModelSpec::sarima((1, 0, 0), (1, 0, 0), 24);
        let dalmp_params = ParameterVector {
            phi: vec![0.7],
            seasonal_phi: vec![0.6],
            mu: 30.0,
            sigma2: 4.0,
            ..ParameterVector::zeros(&dalmp_spec)
        };
        let delta_spec = ModelSpec::arma(1, 2);
        let delta_params = ParameterVector {
            phi: vec![0.9],
            theta: vec![-0.3, 0.2],
            mu: 6.0,
            sigma2: 0.5,
            ..ParameterVector::zeros(&delta_spec)
        };
        Self {
            node: "SYNTH.NODE".into(),
            start: default_simulation_start(),
            length: 24 * 7 * 12,
            seed: 2016,
            dalmp_spec,
            dalmp_params,
            delta_spec,
            delta_params,
            delta_garch: Some(GarchParams {
                alpha0: 0.05,
                alpha: vec![0.1],
                beta: vec![0.8],
            }),
            weekend_effect: 3.0,
            spike_rate: 0.01,
            spike_min: 10.0,
            spike_max: 25.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidArgument("length must be positive".into()));
        }
        if !is_whole_hour(self.start) {
            return Err(Error::NotWholeHour(self.start));
        }
        for (spec, params) in [
            (&self.dalmp_spec, &self.dalmp_params),
            (&self.delta_spec, &self.delta_params),
        ] {
            if spec.exog_count > 0 {
                return Err(Error::InvalidSpec(
                    "generator models take no regressors".into(),
                ));
            }
            params.validate(spec)?;
        }
        if let Some(g) = &self.delta_garch {
            g.validate()?;
        }
        if !(0.0..1.0).contains(&self.spike_rate) {
            return Err(Error::InvalidArgument(format!(
                "spike rate must lie in [0, 1), got {}",
                self.spike_rate
            )));
        }
        if !(self.spike_min >= 0.0 && self.spike_min <= self.spike_max && self.spike_max.is_finite())
        {
            return Err(Error::InvalidArgument(
                "spike magnitudes need 0 <= spike_min <= spike_max".into(),
            ));
        }
        if !self.weekend_effect.is_finite() {
            return Err(Error::InvalidArgument("weekend effect must be finite".into()));
        }
        Ok(())
    }
}

/// Separate, reproducible random streams for each generator component.
fn stream_seed(seed: u64, component: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed ^ component.wrapping_mul(0x9E37_79B9_7F4A_7C15)).random()
}

/// Seeded synthetic market: see [`SynthConfig`] for the construction.
pub fn synth_market(config: &SynthConfig) -> Result<MarketDataset> {
    config.validate()?;
    let n = config.length;
    let dalmp = arima::simulate(
        &config.dalmp_spec,
        &config.dalmp_params,
        n,
        None,
        stream_seed(config.seed, 1),
    )?;

    let delta_seed = stream_seed(config.seed, 2);
    let burn = arima::burn_in(&config.delta_spec);
    let innovations = match &config.delta_garch {
        Some(g) => garch::simulate_garch(g, burn + n, delta_seed)?.into_values(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(delta_seed);
            let normal = Normal::new(0.0, config.delta_params.sigma2.sqrt())
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            (0..burn + n).map(|_| normal.sample(&mut rng)).collect()
        }
    };
    let delta = arima::simulate_from_innovations(
        &config.delta_spec,
        &config.delta_params,
        &innovations,
        None,
    )?;
    let weekday = weekend_indicator(config.start, n)?;

    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 3));
    let rtlmp: Vec<f64> = (0..n)
        .map(|t| {
            let d = delta.values()[t] + config.weekend_effect * weekday.values()[t];
            let mut rt = dalmp.values()[t] - d;
            if rng.random::<f64>() < config.spike_rate {
                let magnitude = rng.random_range(config.spike_min..=config.spike_max);
                rt += if rng.random::<bool>() { magnitude } else { -magnitude };
            }
            rt
        })
        .collect();
    MarketDataset::new(
        config.node.clone(),
        HourlySeries::prices(config.start, dalmp.into_values())?,
        HourlySeries::prices(config.start, rtlmp)?,
    )
}

/// Plot-data layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// `lag,acf,pacf,band` with `band = 2/√n`.
    AcfPacf,
    /// `horizon` then one `I_i` column per model.
    ImprovementCurve,
    /// `timestamp,actual,forecast,baseline`.
    ForecastOverlay,
}

fn plot_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer)
}

pub fn write_acf_pacf<W: Write>(series: &HourlySeries, max_lag: usize, writer: W) -> Result<()> {
    if max_lag >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "max lag {max_lag} must be below the series length {}",
            series.len()
        )));
    }
    let acf = sample_acf(series, max_lag)?;
    let pacf = sample_pacf(series, max_lag)?;
    let band = 2.0 / (series.len() as f64).sqrt();
    let mut out = plot_writer(writer);
    out.write_record(["lag", "acf", "pacf", "band"])?;
    for lag in 0..=max_lag {
        out.write_record([
            lag.to_string(),
            format!("{:.6}", acf[lag]),
            format!("{:.6}", pacf[lag]),
            format!("{band:.6}"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per horizon; reports must share their horizon count.
pub fn write_improvement_curve<W: Write>(
    reports: &[(String, BacktestReport)],
    writer: W,
) -> Result<()> {
    let Some((_, first)) = reports.first() else {
        return Err(Error::InvalidArgument("no reports to export".into()));
    };
    let horizon = first.horizons.len();
    if let Some((name, _)) = reports.iter().find(|(_, r)| r.horizons.len() != horizon) {
        return Err(Error::MismatchedWindows(format!(
            "{name} covers a different number of horizons"
        )));
    }
    let mut out = plot_writer(writer);
    let mut header = vec!["horizon".to_string()];
    header.extend(reports.iter().map(|(name, _)| name.clone()));
    out.write_record(&header)?;
    for h in 0..horizon {
        let mut row = vec![first.horizons[h].horizon.to_string()];
        row.extend(
            reports
                .iter()
                .map(|(_, r)| format!("{:.4}", r.horizons[h].improvement_pct)),
        );
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_forecast_overlay<W: Write>(rows: &[OverlayRow], writer: W) -> Result<()> {
    let mut out = plot_writer(writer);
    out.write_record(["timestamp", "actual", "forecast", "baseline"])?;
    for row in rows {
        out.write_record([
            format_timestamp(row.timestamp),
            format!("{:.6}", row.actual),
            format!("{:.6}", row.forecast),
            format!("{:.6}", row.baseline),
        ])?;
    }
    out.flush()?;
    Ok(())
}

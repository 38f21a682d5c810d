//! Calendar-anchored hourly series and the price preprocessing transforms.
//!
//! Every operation here is pure: it borrows its inputs and returns a new
//! [`HourlySeries`].

use chrono::{DateTime, Datelike, Duration, Timelike, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit tag carried alongside the values of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    DollarsPerMwh,
    LogTransformed,
    Dimensionless,
}

/// Hourly sequence of finite values; index `t` sits at `start + t` hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlySeries {
    start: DateTime<Utc>,
    values: Vec<f64>,
    units: Units,
}

/// Returns `true` when `ts` has zero minutes, seconds and nanoseconds.
pub fn is_whole_hour(ts: DateTime<Utc>) -> bool {
    ts.minute() == 0 && ts.second() == 0 && ts.nanosecond() == 0
}

impl HourlySeries {
    pub fn new(start: DateTime<Utc>, values: Vec<f64>, units: Units) -> Result<Self> {
        if !is_whole_hour(start) {
            return Err(Error::NotWholeHour(start));
        }
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            start,
            values,
            units,
        })
    }

    /// Prices in $/MWh.
    pub fn prices(start: DateTime<Utc>, values: Vec<f64>) -> Result<Self> {
        Self::new(start, values, Units::DollarsPerMwh)
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    /// First hour after the last value.
    pub fn end(&self) -> DateTime<Utc> {
        self.timestamp(self.values.len())
    }

    pub fn timestamp(&self, index: usize) -> DateTime<Utc> {
        self.start + Duration::hours(index as i64)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn units(&self) -> Units {
        self.units
    }

    /// Position of `ts` within this series, if it falls on the grid.
    pub fn index_of(&self, ts: DateTime<Utc>) -> Option<usize> {
        let offset = ts.signed_duration_since(self.start);
        if offset.num_seconds() % 3600 != 0 {
            return None;
        }
        let hours = offset.num_hours();
        (hours >= 0 && (hours as usize) < self.values.len()).then_some(hours as usize)
    }

    /// New series on the same calendar with different values.
    pub fn with_values(&self, values: Vec<f64>, units: Units) -> Result<Self> {
        Self::new(self.start, values, units)
    }

    /// Same values re-anchored at `start`.
    pub fn with_start(&self, start: DateTime<Utc>) -> Result<Self> {
        Self::new(start, self.values.clone(), self.units)
    }

    /// Sub-series of `len` values starting at `offset`.
    pub fn slice(&self, offset: usize, len: usize) -> Result<Self> {
        if offset + len > self.values.len() {
            return Err(Error::SeriesTooShort {
                needed: offset + len,
                got: self.values.len(),
            });
        }
        Self::new(
            self.timestamp(offset),
            self.values[offset..offset + len].to_vec(),
            self.units,
        )
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &HourlySeries) -> Result<Self> {
        if other.start != self.end() {
            return Err(Error::Alignment(format!(
                "cannot append series starting {} to series ending {}",
                other.start,
                self.end()
            )));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Self::new(self.start, values, self.units)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    fn map(&self, units: Units, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.start, self.values.iter().map(|&v| f(v)).collect(), units)
    }
}

/// Checks that two series share start and length.
pub fn check_aligned(a: &HourlySeries, b: &HourlySeries) -> Result<()> {
    if a.start != b.start || a.len() != b.len() {
        return Err(Error::Alignment(format!(
            "series [{}, +{}h) and [{}, +{}h) differ",
            a.start,
            a.len(),
            b.start,
            b.len()
        )));
    }
    Ok(())
}

/// Spike clipping bounds in $/MWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClipBounds")]
pub struct ClipBounds {
    upper: f64,
    lower: f64,
}

#[derive(Deserialize)]
struct RawClipBounds {
    upper: f64,
    lower: f64,
}

impl TryFrom<RawClipBounds> for ClipBounds {
    type Error = Error;

    fn try_from(raw: RawClipBounds) -> Result<Self> {
        ClipBounds::new(raw.upper, raw.lower)
    }
}

impl ClipBounds {
    pub fn new(upper: f64, lower: f64) -> Result<Self> {
        if !(lower < upper) || !upper.is_finite() || !lower.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "clip bounds need LB < UB, got LB={lower}, UB={upper}"
            )));
        }
        Ok(Self { upper, lower })
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }
}

/// Positive offset `c` in `y = ln(P + c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LogOffset(f64);

impl TryFrom<f64> for LogOffset {
    type Error = Error;

    fn try_from(c: f64) -> Result<Self> {
        LogOffset::new(c)
    }
}

impl From<LogOffset> for f64 {
    fn from(c: LogOffset) -> f64 {
        c.0
    }
}

impl LogOffset {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "log offset must be positive, got {c}"
            )));
        }
        Ok(Self(c))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Clamps every value into `[LB, UB]`.
pub fn clip_prices(series: &HourlySeries, bounds: ClipBounds) -> HourlySeries {
    series
        .map(series.units, |v| v.clamp(bounds.lower, bounds.upper))
        .expect("clamping finite values stays finite")
}

/// `y_t = ln(P_t + c)`.
pub fn log_transform(series: &HourlySeries, offset: LogOffset) -> Result<HourlySeries> {
    let c = offset.value();
    if let Some((index, v)) = series
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v + c > 0.0))
    {
        return Err(Error::NonPositiveArgument {
            index,
            value: v + c,
        });
    }
    series.map(Units::LogTransformed, |v| (v + c).ln())
}

/// `P_t = exp(y_t) - c`.
pub fn inverse_log_transform(series: &HourlySeries, offset: LogOffset) -> Result<HourlySeries> {
    if series.units() != Units::LogTransformed {
        return Err(Error::InvalidArgument(
            "inverse log transform expects a log-transformed series".into(),
        ));
    }
    let c = offset.value();
    series.map(Units::DollarsPerMwh, |y| y.exp() - c)
}

/// `ΔLMP_t = DALMP_t - RTLMP_t`.
pub fn delta_lmp(dalmp: &HourlySeries, rtlmp: &HourlySeries) -> Result<HourlySeries> {
    check_aligned(dalmp, rtlmp)?;
    let values = dalmp
        .values()
        .iter()
        .zip(rtlmp.values())
        .map(|(da, rt)| da - rt)
        .collect();
    dalmp.with_values(values, Units::DollarsPerMwh)
}

/// `RTLMP'_t = DALMP_t - ΔLMP'_t`.
pub fn reconstruct_rtlmp(
    dalmp_future: &HourlySeries,
    delta_forecast: &HourlySeries,
) -> Result<HourlySeries> {
    check_aligned(dalmp_future, delta_forecast)?;
    let values = dalmp_future
        .values()
        .iter()
        .zip(delta_forecast.values())
        .map(|(da, delta)| da - delta)
        .collect();
    dalmp_future.with_values(values, Units::DollarsPerMwh)
}

/// 1.0 on Monday–Friday hours and 0.0 on Saturday/Sunday hours, by the
/// civil (UTC) calendar of each timestamp.
pub fn weekend_indicator(start: DateTime<Utc>, length: usize) -> Result<HourlySeries> {
    let values = (0..length)
        .map(|t| {
            let ts = start + Duration::hours(t as i64);
            match ts.weekday() {
                Weekday::Sat | Weekday::Sun => 0.0,
                _ => 1.0,
            }
        })
        .collect();
    HourlySeries::new(start, values, Units::Dimensionless)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn monday() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2015, 1, 5, 0, 0, 0).unwrap()
    }

    fn prices(values: &[f64]) -> HourlySeries {
        HourlySeries::prices(monday(), values.to_vec()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            HourlySeries::prices(monday(), vec![]),
            Err(Error::EmptySeries)
        ));
        assert!(matches!(
            HourlySeries::prices(monday(), vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        let half = monday() + Duration::minutes(30);
        assert!(matches!(
            HourlySeries::prices(half, vec![1.0]),
            Err(Error::NotWholeHour(_))
        ));
    }

    #[test]
    fn clip_examples() {
        let bounds = ClipBounds::new(100.0, -100.0).unwrap();
        let out = clip_prices(&prices(&[150.0, 50.0, -120.0]), bounds);
        assert_eq!(out.values(), &[100.0, 50.0, -100.0]);
        assert_eq!(out.start(), monday());

        let out = clip_prices(&prices(&[0.0, 0.0]), ClipBounds::new(1.0, -1.0).unwrap());
        assert_eq!(out.values(), &[0.0, 0.0]);

        let out = clip_prices(&prices(&[-457.45]), bounds);
        assert_eq!(out.values(), &[-100.0]);
    }

    #[test]
    fn clip_bounds_must_be_ordered() {
        assert!(ClipBounds::new(-100.0, 100.0).is_err());
        assert!(ClipBounds::new(5.0, 5.0).is_err());
    }

    #[test]
    fn log_examples() {
        let c = LogOffset::new(30.0).unwrap();
        let y = log_transform(&prices(&[-29.0, 70.0, -28.7]), c).unwrap();
        assert_eq!(y.units(), Units::LogTransformed);
        assert_eq!(y.values()[0], 0.0);
        assert!((y.values()[1] - 4.605_170_185_988_091).abs() < 1e-12);
        assert!((y.values()[2] - 0.262_364_264_467_491).abs() < 1e-9);

        let back = inverse_log_transform(&y, c).unwrap();
        assert!((back.values()[0] + 29.0).abs() < 1e-12);
        assert!((back.values()[1] - 70.0).abs() < 1e-12);
    }

    #[test]
    fn log_rejects_non_positive_argument() {
        let c = LogOffset::new(30.0).unwrap();
        assert!(matches!(
            log_transform(&prices(&[1.0, -30.0]), c),
            Err(Error::NonPositiveArgument { index: 1, .. })
        ));
        assert!(LogOffset::new(0.0).is_err());
        // inverse requires the log tag
        assert!(inverse_log_transform(&prices(&[1.0]), c).is_err());
    }

    #[test]
    fn delta_and_reconstruction_examples() {
        let d = delta_lmp(&prices(&[30.0, 40.0]), &prices(&[25.0, 45.0])).unwrap();
        assert_eq!(d.values(), &[5.0, -5.0]);

        let same = prices(&[1.0, 2.0, 3.0]);
        let zero = delta_lmp(&same, &same).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let d = delta_lmp(&prices(&[0.0]), &prices(&[-28.7])).unwrap();
        assert_eq!(d.values(), &[28.7]);

        let r = reconstruct_rtlmp(&prices(&[30.0]), &prices(&[5.0])).unwrap();
        assert_eq!(r.values(), &[25.0]);
        let r = reconstruct_rtlmp(&same, &zero).unwrap();
        assert_eq!(r, same);
    }

    #[test]
    fn delta_rejects_misaligned_calendars() {
        let a = prices(&[1.0, 2.0]);
        let b = a.with_start(monday() + Duration::hours(1)).unwrap();
        assert!(matches!(delta_lmp(&a, &b), Err(Error::Alignment(_))));
        assert!(matches!(
            reconstruct_rtlmp(&a, &prices(&[1.0])),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn weekend_indicator_examples() {
        let week = weekend_indicator(monday(), 168).unwrap();
        assert!(week.values()[..120].iter().all(|&v| v == 1.0));
        assert!(week.values()[120..].iter().all(|&v| v == 0.0));

        let saturday = monday() + Duration::days(5);
        let weekend = weekend_indicator(saturday, 48).unwrap();
        assert!(weekend.values().iter().all(|&v| v == 0.0));

        let sunday_late = monday() + Duration::days(6) + Duration::hours(23);
        assert_eq!(
            weekend_indicator(sunday_late, 2).unwrap().values(),
            &[0.0, 1.0]
        );
    }

    #[test]
    fn slice_concat_and_index() {
        let s = prices(&[1.0, 2.0, 3.0, 4.0]);
        let head = s.slice(0, 2).unwrap();
        let tail = s.slice(2, 2).unwrap();
        assert_eq!(head.concat(&tail).unwrap(), s);
        assert!(tail.concat(&head).is_err());
        assert_eq!(s.index_of(monday() + Duration::hours(3)), Some(3));
        assert_eq!(s.index_of(monday() + Duration::hours(4)), None);
        assert!(s.slice(3, 2).is_err());
    }
}

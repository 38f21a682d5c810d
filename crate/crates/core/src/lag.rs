//! Polynomials in the backshift operator `B` (`B^h y_t = y_{t-h}`).
//!
//! Sign convention: AR and MA factors are both written with minus signs,
//! `1 - c_1 B - c_2 B^2 - ...`, for non-seasonal and seasonal factors
//! alike. [`LagPolynomial::from_minus_form`] builds that shape.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::HourlySeries;

/// Roots within this distance of the unit circle count as non-stable.
pub const STABILITY_TOLERANCE: f64 = 1e-8;

/// Sparse polynomial in `B` with lag-0 coefficient fixed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LagPolynomial {
    coeffs: BTreeMap<usize, f64>,
}

impl Default for LagPolynomial {
    fn default() -> Self {
        Self::identity()
    }
}

impl LagPolynomial {
    pub fn identity() -> Self {
        Self {
            coeffs: BTreeMap::from([(0, 1.0)]),
        }
    }

    /// Builds from `(lag, coefficient)` pairs; lag 0 must be present and
    /// equal to 1. Zero coefficients are dropped.
    pub fn from_coefficients(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (lag, c) in pairs {
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient at lag {lag}"
                )));
            }
            *coeffs.entry(lag).or_insert(0.0) += c;
        }
        if coeffs.get(&0) != Some(&1.0) {
            return Err(Error::InvalidArgument(
                "lag-0 coefficient must be exactly 1".into(),
            ));
        }
        coeffs.retain(|&lag, c| lag == 0 || *c != 0.0);
        Ok(Self { coeffs })
    }

    /// `1 - c_1 B^s - c_2 B^{2s} - ...` with `s = spacing`.
    pub fn from_minus_form(coefficients: &[f64], spacing: usize) -> Self {
        assert!(spacing >= 1, "lag spacing must be positive");
        let mut coeffs = BTreeMap::from([(0, 1.0)]);
        for (i, &c) in coefficients.iter().enumerate() {
            if c != 0.0 {
                coeffs.insert((i + 1) * spacing, -c);
            }
        }
        Self { coeffs }
    }

    pub fn coefficient(&self, lag: usize) -> f64 {
        self.coeffs.get(&lag).copied().unwrap_or(0.0)
    }

    /// Non-zero `(lag, coefficient)` pairs in increasing lag order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&l, &c)| (l, c))
    }

    /// Highest lag with a non-zero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Dense coefficients for lags `0..=degree`.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.degree() + 1];
        for (l, c) in self.terms() {
            out[l] = c;
        }
        out
    }

    /// Convolution of the two coefficient maps.
    pub fn multiply(&self, other: &LagPolynomial) -> LagPolynomial {
        let mut coeffs = BTreeMap::new();
        for (la, ca) in self.terms() {
            for (lb, cb) in other.terms() {
                *coeffs.entry(la + lb).or_insert(0.0) += ca * cb;
            }
        }
        coeffs.retain(|&lag, c| lag == 0 || *c != 0.0);
        LagPolynomial { coeffs }
    }

    /// `Σ_h c_h x_{t-h}` for every `t >= degree`.
    pub fn apply_slice(&self, values: &[f64]) -> Vec<f64> {
        let k = self.degree();
        if values.len() <= k {
            return Vec::new();
        }
        (k..values.len())
            .map(|t| self.terms().map(|(h, c)| c * values[t - h]).sum())
            .collect()
    }

    /// Filters `series`; the result is `degree` samples shorter and starts
    /// `degree` hours later.
    pub fn apply(&self, series: &HourlySeries) -> Result<HourlySeries> {
        let k = self.degree();
        if series.len() <= k {
            return Err(Error::SeriesTooShort {
                needed: k,
                got: series.len(),
            });
        }
        HourlySeries::new(
            series.timestamp(k),
            self.apply_slice(series.values()),
            series.units(),
        )
    }

    /// Root check via companion-matrix eigenvalues.
    pub fn stability(&self) -> Stability {
        let dense = self.dense();
        let k = dense.len() - 1;
        if k == 0 {
            return Stability {
                stable: true,
                margin: f64::INFINITY,
            };
        }
        match companion_max_modulus(&dense) {
            Some(max_modulus) => {
                let margin = if max_modulus == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / max_modulus - 1.0
                };
                Stability {
                    stable: margin > STABILITY_TOLERANCE,
                    margin,
                }
            }
            None => {
                let margin = step_down_margin(&dense);
                Stability {
                    stable: margin > STABILITY_TOLERANCE,
                    margin,
                }
            }
        }
    }

    pub fn is_stable(&self) -> bool {
        self.stability().stable
    }
}

/// Largest eigenvalue modulus of the companion matrix of
/// `z^k + c_1 z^{k-1} + ... + c_k`; roots in `B` are the reciprocals.
/// `None` when the QR iteration does not converge (typically several roots
/// exactly on the unit circle).
fn companion_max_modulus(dense: &[f64]) -> Option<f64> {
    let k = dense.len() - 1;
    let mut m = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        m[(0, j)] = -dense[j + 1];
    }
    for i in 1..k {
        m[(i, i - 1)] = 1.0;
    }
    let schur = Schur::try_new(m, f64::EPSILON, 50 * k.max(10))?;
    let max = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    max.is_finite().then_some(max)
}

/// Schur–Cohn step-down: all roots of `Σ c_j B^j` (with `c_0 = 1`) lie
/// strictly outside the unit circle.
fn step_down_stable(dense: &[f64]) -> bool {
    let mut phi: Vec<f64> = dense[1..].iter().map(|c| -c).collect();
    for j in (0..phi.len()).rev() {
        let r = phi[j];
        if !(r.abs() < 1.0) {
            return false;
        }
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..j).map(|i| (phi[i] + r * phi[j - 1 - i]) / denom).collect();
        phi[..j].copy_from_slice(&prev);
    }
    true
}

/// `min |root| - 1` by bisection on the radius `ρ` such that `c(ρB)` is stable.
fn step_down_margin(dense: &[f64]) -> f64 {
    let scaled = |rho: f64| -> Vec<f64> {
        dense
            .iter()
            .enumerate()
            .map(|(j, c)| c * rho.powi(j as i32))
            .collect()
    };
    // roots of c(ρB) are the roots of c divided by ρ
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while step_down_stable(&scaled(hi)) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if step_down_stable(&scaled(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo - 1.0
}

/// Result of [`LagPolynomial::stability`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    /// All roots strictly outside the unit circle.
    pub stable: bool,
    /// `min |root| - 1`.
    pub margin: f64,
}

/// Differencing orders `(1 - B)^d (1 - B^S)^D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSpec {
    pub d: usize,
    pub seasonal_d: usize,
    pub season: usize,
}

impl Default for DifferenceSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl DifferenceSpec {
    pub fn new(d: usize, seasonal_d: usize, season: usize) -> Result<Self> {
        let spec = Self {
            d,
            seasonal_d,
            season,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        Self {
            d: 0,
            seasonal_d: 0,
            season: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.season == 0 {
            return Err(Error::InvalidSpec("season length must be positive".into()));
        }
        if self.seasonal_d > 0 && self.season < 2 {
            return Err(Error::InvalidSpec(
                "seasonal differencing needs season length >= 2".into(),
            ));
        }
        Ok(())
    }

    /// Number of observations consumed by differencing, `d + D·S`.
    pub fn order(&self) -> usize {
        self.d + self.seasonal_d * self.season
    }
}

/// `(1 - B)^d (1 - B^S)^D` expanded.
pub fn difference_polynomial(spec: &DifferenceSpec) -> LagPolynomial {
    let first = LagPolynomial::from_minus_form(&[1.0], 1);
    let seasonal = LagPolynomial::from_minus_form(&[1.0], spec.season.max(1));
    let mut out = LagPolynomial::identity();
    for _ in 0..spec.d {
        out = out.multiply(&first);
    }
    for _ in 0..spec.seasonal_d {
        out = out.multiply(&seasonal);
    }
    out
}

/// Inverts differencing on raw slices: `presample` holds the levels
/// immediately preceding `differenced`; only its last `d + D·S` entries are used.
pub fn integrate_slice(
    differenced: &[f64],
    presample: &[f64],
    spec: &DifferenceSpec,
) -> Result<Vec<f64>> {
    let k = spec.order();
    if presample.len() < k {
        return Err(Error::InsufficientPresample {
            needed: k,
            got: presample.len(),
        });
    }
    let poly = difference_polynomial(spec);
    let mut levels: Vec<f64> = presample[presample.len() - k..].to_vec();
    levels.reserve(differenced.len());
    for &w in differenced {
        let t = levels.len();
        let carried: f64 = poly
            .terms()
            .skip(1)
            .map(|(h, c)| c * levels[t - h])
            .sum();
        levels.push(w - carried);
    }
    Ok(levels.split_off(k))
}

/// Maps a differenced series back to levels. `presample` must end exactly
/// where `differenced` starts.
pub fn integrate(
    differenced: &HourlySeries,
    presample: &HourlySeries,
    spec: &DifferenceSpec,
) -> Result<HourlySeries> {
    if spec.order() > 0 && presample.end() != differenced.start() {
        return Err(Error::Alignment(format!(
            "presample ends {} but differenced series starts {}",
            presample.end(),
            differenced.start()
        )));
    }
    let levels = integrate_slice(differenced.values(), presample.values(), spec)?;
    HourlySeries::new(differenced.start(), levels, presample.units())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Units;
    use chrono::{Duration, TimeZone, Utc};

    fn series(values: &[f64]) -> HourlySeries {
        let start = Utc.with_ymd_and_hms(2015, 1, 5, 0, 0, 0).unwrap();
        HourlySeries::new(start, values.to_vec(), Units::Dimensionless).unwrap()
    }

    fn poly(pairs: &[(usize, f64)]) -> LagPolynomial {
        LagPolynomial::from_coefficients(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let diff = poly(&[(0, 1.0), (1, -1.0)]);
        let out = diff.apply(&series(&[1.0, 2.0, 4.0])).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0]);
        assert_eq!(out.start(), series(&[0.0]).start() + Duration::hours(1));

        let x = series(&[3.0, -1.0, 2.5]);
        assert_eq!(LagPolynomial::identity().apply(&x).unwrap(), x);

        let periodic: Vec<f64> = (0..100).map(|t| ((t % 24) as f64).sin()).collect();
        let out = poly(&[(0, 1.0), (24, -1.0)])
            .apply(&series(&periodic))
            .unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_needs_more_than_degree_values() {
        let diff = poly(&[(0, 1.0), (2, -1.0)]);
        assert!(matches!(
            diff.apply(&series(&[1.0, 2.0])),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn lag_zero_must_be_one() {
        assert!(LagPolynomial::from_coefficients([(0, 2.0)]).is_err());
        assert!(LagPolynomial::from_coefficients([(1, 2.0)]).is_err());
    }

    #[test]
    fn multiply_examples() {
        let a = LagPolynomial::from_minus_form(&[0.5], 1);
        let b = LagPolynomial::from_minus_form(&[1.0], 24);
        let prod = a.multiply(&b);
        assert_eq!(
            prod.terms().collect::<Vec<_>>(),
            vec![(0, 1.0), (1, -0.5), (24, -1.0), (25, 0.5)]
        );
        assert_eq!(a.multiply(&LagPolynomial::identity()), a);
    }

    #[test]
    fn difference_polynomial_examples() {
        let terms = |d, sd, s| {
            difference_polynomial(&DifferenceSpec::new(d, sd, s).unwrap())
                .terms()
                .collect::<Vec<_>>()
        };
        assert_eq!(terms(1, 0, 1), vec![(0, 1.0), (1, -1.0)]);
        assert_eq!(terms(0, 1, 24), vec![(0, 1.0), (24, -1.0)]);
        assert_eq!(
            terms(1, 1, 24),
            vec![(0, 1.0), (1, -1.0), (24, -1.0), (25, 1.0)]
        );
        assert_eq!(terms(0, 0, 1), vec![(0, 1.0)]);
    }

    #[test]
    fn difference_spec_validation() {
        assert!(DifferenceSpec::new(0, 1, 1).is_err());
        assert!(DifferenceSpec::new(0, 0, 0).is_err());
        assert_eq!(DifferenceSpec::new(2, 1, 24).unwrap().order(), 26);
    }

    #[test]
    fn integrate_cumulative_sum() {
        let spec = DifferenceSpec::new(1, 0, 1).unwrap();
        let presample = series(&[10.0]);
        let diffed = series(&[1.0, 2.0])
            .with_start(presample.end())
            .unwrap();
        let out = integrate(&diffed, &presample, &spec).unwrap();
        assert_eq!(out.values(), &[11.0, 13.0]);
    }

    #[test]
    fn integrate_zeros_repeats_seasonal_presample() {
        let spec = DifferenceSpec::new(0, 1, 24).unwrap();
        let presample: Vec<f64> = (0..24).map(|h| (h as f64 * 0.7).cos() * 5.0).collect();
        let out = integrate_slice(&[0.0; 72], &presample, &spec).unwrap();
        // direct recursion y_t = y_{t-24} + diff_t
        let mut direct = presample.clone();
        for t in 24..96 {
            direct.push(direct[t - 24] + 0.0);
        }
        assert_eq!(out, direct[24..].to_vec());
    }

    #[test]
    fn integrate_errors() {
        let spec = DifferenceSpec::new(0, 1, 24).unwrap();
        assert!(matches!(
            integrate_slice(&[1.0], &[0.0; 5], &spec),
            Err(Error::InsufficientPresample { needed: 24, got: 5 })
        ));
        let spec = DifferenceSpec::new(1, 0, 1).unwrap();
        let presample = series(&[1.0]);
        let misaligned = series(&[1.0]);
        assert!(matches!(
            integrate(&misaligned, &presample, &spec),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn step_down_agrees_with_eigenvalues() {
        for coeffs in [vec![0.5], vec![1.2, -0.35], vec![0.3, 0.2, -0.1], vec![1.1, 0.2]] {
            let poly = LagPolynomial::from_minus_form(&coeffs, 1);
            let dense = poly.dense();
            let eig = companion_max_modulus(&dense).unwrap();
            let from_eig = 1.0 / eig - 1.0;
            assert!((step_down_margin(&dense) - from_eig).abs() < 1e-9, "{coeffs:?}");
        }
    }

    #[test]
    fn stability_examples() {
        let s = LagPolynomial::from_minus_form(&[0.5], 1).stability();
        assert!(s.stable);
        assert!((s.margin - 1.0).abs() < 1e-12);

        assert!(!LagPolynomial::from_minus_form(&[1.0], 1).is_stable());
        assert!(!LagPolynomial::from_minus_form(&[1.5], 1).is_stable());

        // (1 - 0.5B)(1 - 0.7B): roots 2 and 1/0.7
        let s = LagPolynomial::from_minus_form(&[1.2, -0.35], 1).stability();
        assert!(s.stable);
        assert!((s.margin - (1.0 / 0.7 - 1.0)).abs() < 1e-10);

        assert!(LagPolynomial::identity().is_stable());
        assert!(!LagPolynomial::from_minus_form(&[0.0, 0.0, 1.0], 24).is_stable());
        assert!(LagPolynomial::from_minus_form(&[0.9], 24).is_stable());
    }
}

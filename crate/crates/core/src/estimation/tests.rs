use super::*;
use crate::arima::{default_simulation_start, log_likelihood, simulate};
use crate::series::Units;

fn series(values: Vec<f64>) -> HourlySeries {
    HourlySeries::new(default_simulation_start(), values, Units::Dimensionless).unwrap()
}

/// Closed-form conditional least squares for a zero-mean AR(1) whose
/// presample value is the series mean.
fn ar1_cls(w: &[f64]) -> f64 {
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let lagged: Vec<f64> = std::iter::once(mean).chain(w[..w.len() - 1].iter().copied()).collect();
    let num: f64 = lagged.iter().zip(w).map(|(x, y)| x * y).sum();
    let den: f64 = lagged.iter().map(|x| x * x).sum();
    num / den
}

#[test]
fn bic_arithmetic() {
    assert!((bic(0.0, 2, std::f64::consts::E.powi(2)) - 4.0).abs() < 1e-12);
    assert_eq!(bic(-12.5, 0, 100.0), 25.0);
}

#[test]
fn options_are_validated() {
    let few = FitOptions {
        max_iterations: 50,
        ..FitOptions::default()
    };
    assert!(few.validate().is_err());
    let loose = FitOptions {
        tolerance: 1e-3,
        ..FitOptions::default()
    };
    assert!(loose.validate().is_err());
    assert!(FitOptions::default().validate().is_ok());
}

#[test]
fn white_noise_fit_is_sample_mean_and_variance() {
    let spec = ModelSpec::arma(0, 0);
    let mut truth = ParameterVector::zeros(&spec);
    truth.mu = 4.0;
    truth.sigma2 = 2.0;
    let y = simulate(&spec, &truth, 3000, None, 5).unwrap();
    let fit = fit(&spec, &y, None, &FitOptions::default()).unwrap();
    let mean = y.mean();
    let var = y.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
    assert!((fit.params.mu - mean).abs() < 1e-8);
    assert!((fit.params.sigma2 - var).abs() < 1e-8);
    assert_eq!(fit.n_effective, 3000);
}

#[test]
fn ar1_matches_conditional_least_squares() {
    let spec = ModelSpec::arma(1, 0).with_constant(false);
    for (phi, seed) in [(0.6, 1u64), (-0.3, 2), (0.95, 3)] {
        let mut truth = ParameterVector::zeros(&spec);
        truth.phi = vec![phi];
        let y = simulate(&spec, &truth, 1500, None, seed).unwrap();
        let fit = fit(&spec, &y, None, &FitOptions::default()).unwrap();
        let oracle = ar1_cls(y.values());
        assert!(
            (fit.params.phi[0] - oracle).abs() < 1e-4,
            "phi {phi}: fit {} vs oracle {oracle}",
            fit.params.phi[0]
        );
    }
}

#[test]
fn ar1_cls_holds_on_arbitrary_series() {
    // not generated by an AR(1) at all
    let values: Vec<f64> = (0..400)
        .map(|t| ((t * 7919) % 113) as f64 / 10.0 + (t as f64 / 30.0).sin())
        .collect();
    let spec = ModelSpec::arma(1, 0).with_constant(false);
    let fit = fit(&spec, &series(values.clone()), None, &FitOptions::default()).unwrap();
    assert!((fit.params.phi[0] - ar1_cls(&values)).abs() < 1e-4);
}

#[test]
fn reported_likelihood_matches_independent_evaluation() {
    let spec = ModelSpec::arma(1, 1);
    let mut truth = ParameterVector::zeros(&spec);
    truth.phi = vec![0.5];
    truth.theta = vec![0.4];
    truth.mu = 1.5;
    let y = simulate(&spec, &truth, 800, None, 9).unwrap();
    let fit = fit(&spec, &y, None, &FitOptions::default()).unwrap();
    let ll = log_likelihood(&spec, &fit.params, &y, None).unwrap();
    assert!((ll - fit.loglik).abs() < 1e-9);
    assert_eq!(fit.bic, bic(fit.loglik, 4, fit.n_effective as f64));
    assert!(fit.params.ar_polynomial(1).is_stable());
    assert!(fit.params.ma_polynomial(1).is_stable());
}

#[test]
fn fit_is_deterministic() {
    let spec = ModelSpec::arma(2, 1);
    let mut truth = ParameterVector::zeros(&spec);
    truth.phi = vec![0.4, 0.2];
    truth.theta = vec![-0.3];
    let y = simulate(&spec, &truth, 600, None, 4).unwrap();
    let options = FitOptions {
        seed: 17,
        ..FitOptions::default()
    };
    let a = fit(&spec, &y, None, &options).unwrap();
    let b = fit(&spec, &y, None, &options).unwrap();
    assert_eq!(a, b);
}

#[test]
fn regression_coefficients_are_recovered() {
    let n = 2000;
    let indicator = crate::series::weekend_indicator(default_simulation_start(), n + 50).unwrap();
    let exog = ExogenousMatrix::single(indicator);
    let spec = ModelSpec::arma(1, 0).with_exog(1);
    let mut truth = ParameterVector::zeros(&spec);
    truth.phi = vec![0.5];
    truth.mu = 2.0;
    truth.gamma = vec![-3.0];
    let y = simulate(&spec, &truth, n, Some(&exog), 3).unwrap();
    let window = exog.slice(arima::burn_in(&spec), n).unwrap();
    let fit = fit(&spec, &y, Some(&window), &FitOptions::default()).unwrap();
    assert!((fit.params.gamma[0] + 3.0).abs() < 0.2, "{:?}", fit.params);
    assert!((fit.params.phi[0] - 0.5).abs() < 0.05);
}

#[test]
fn reference_bic_matrix_selects_arma_1_2() {
    let rows: [&[f64]; 5] = [
        &[-68875.1, -69085.5, -69067.3, -68905.7, -69056.9],
        &[-69073.0, -69065.4, -69082.9, -68292.3, -69008.0],
        &[-69063.2, -69050.2, -68988.3, -69069.4, -69067.6],
        &[-69084.7, -69024.4, -69042.1, -69034.2, -68958.5],
        &[-69078.4, -68944.7, -69062.7, -69031.2, -69014.0],
    ];
    let table = BicTable::from_values(vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5], &rows).unwrap();
    assert_eq!(table.select(), Some((1, 2, -69085.5)));
    assert!(table.render().contains("-69085.5"));
}

#[test]
fn selection_tie_breaks_and_failures() {
    let mut table = BicTable::from_values(
        vec![0, 1, 2],
        vec![0, 1],
        &[&[5.0, 1.0], &[1.0, 3.0], &[1.0, 0.5]],
    )
    .unwrap();
    assert_eq!(table.select(), Some((2, 1, 0.5)));
    table.cells[2][1] = BicCell::Failed("diverged".into());
    // (0,1) and (1,0) tie on BIC and p+q; smaller q wins
    assert_eq!(table.select(), Some((1, 0, 1.0)));
    for row in &mut table.cells {
        for c in row.iter_mut() {
            *c = BicCell::Failed("x".into());
        }
    }
    assert_eq!(table.select(), None);
    assert!(table.render().contains("failed"));
}

#[test]
fn single_cell_grid_returns_its_spec() {
    let spec = ModelSpec::arma(0, 0);
    let y = simulate(&spec, &ParameterVector::zeros(&spec), 300, None, 1).unwrap();
    let (chosen, table) =
        grid_select(&y, None, 3..=3, 2..=2, &spec, &FitOptions::default()).unwrap();
    assert_eq!((chosen.p, chosen.q), (3, 2));
    assert_eq!(table.cells.len(), 1);
}

#[test]
fn garch_rejects_degenerate_and_short_input() {
    let zeros = series(vec![0.0; 200]);
    assert!(matches!(
        fit_garch(&zeros, GarchSpec::default(), &FitOptions::default()),
        Err(Error::EstimationFailed(_))
    ));
    let short = series(vec![1.0, -1.0, 0.5]);
    assert!(matches!(
        fit_garch(&short, GarchSpec::default(), &FitOptions::default()),
        Err(Error::SeriesTooShort { .. })
    ));
}

#[test]
fn arch1_on_iid_noise_recovers_variance() {
    let spec = ModelSpec::arma(0, 0).with_constant(false);
    let mut truth = ParameterVector::zeros(&spec);
    truth.sigma2 = 4.0;
    let e = simulate(&spec, &truth, 10_000, None, 21).unwrap();
    let params = fit_garch(&e, GarchSpec::new(1, 0).unwrap(), &FitOptions::default()).unwrap();
    assert!((params.alpha0 - 4.0).abs() < 0.2, "{params:?}");
    assert!(params.beta.is_empty());
}

#[test]
fn attach_garch_keeps_mean_path() {
    let spec = ModelSpec::arma(1, 0);
    let mut truth = ParameterVector::zeros(&spec);
    truth.phi = vec![0.6];
    let y = simulate(&spec, &truth, 1000, None, 12).unwrap();
    let options = FitOptions::default();
    let base = fit(&spec, &y, None, &options).unwrap();
    let layered = attach_garch(&base, GarchSpec::default(), &options).unwrap();
    assert_eq!(layered.params, base.params);
    let a = base.forecast(&y, None, None, 12).unwrap();
    let b = layered.forecast(&y, None, None, 12).unwrap();
    assert_eq!(a.mean, b.mean);
    assert!(layered.garch.as_ref().unwrap().loglik.is_finite());
}

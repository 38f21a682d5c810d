use lmp_forecast::arima::{self, ExogenousMatrix, ModelSpec, ParameterVector};
use lmp_forecast::estimation::{attach_garch, bic, fit, fit_garch, grid_select, BicCell, FitOptions};
use lmp_forecast::garch::{self, GarchParams, GarchSpec};
use lmp_forecast::lag::LagPolynomial;
use lmp_forecast::series::weekend_indicator;

fn arma(phi: &[f64], theta: &[f64], mu: f64) -> (ModelSpec, ParameterVector) {
    let spec = ModelSpec::arma(phi.len(), theta.len());
    let params = ParameterVector {
        phi: phi.to_vec(),
        theta: theta.to_vec(),
        mu,
        ..ParameterVector::zeros(&spec)
    };
    (spec, params)
}

#[test]
fn reported_bic_and_likelihood_are_consistent() {
    let (spec, truth) = arma(&[0.5], &[0.3, -0.2], 1.0);
    let y = arima::simulate(&spec, &truth, 2000, None, 21).unwrap();
    let fitted = fit(&spec, &y, None, &FitOptions::default()).unwrap();
    let ll = arima::log_likelihood(&spec, &fitted.params, &y, None).unwrap();
    assert!((ll - fitted.loglik).abs() < 1e-9);
    let expected = bic(fitted.loglik, spec.parameter_count(), fitted.n_effective as f64);
    assert_eq!(fitted.bic, expected);
    assert_eq!(spec.parameter_count(), 5);
    assert_eq!(fitted.residuals.len(), fitted.n_effective);
}

#[test]
fn fitted_parameters_are_stable_and_invertible() {
    // near-unit-root data pushes the optimizer against the boundary
    let (spec, truth) = arma(&[0.995], &[0.97], 0.0);
    for seed in 0..4 {
        let y = arima::simulate(&spec, &truth, 1000, None, seed).unwrap();
        for (p, q) in [(1, 1), (2, 2), (3, 1)] {
            let s = ModelSpec::arma(p, q);
            let f = fit(&s, &y, None, &FitOptions::default()).unwrap();
            assert!(LagPolynomial::from_minus_form(&f.params.phi, 1).is_stable());
            assert!(LagPolynomial::from_minus_form(&f.params.theta, 1).is_stable());
            f.params.validate(&s).unwrap();
        }
    }
}

#[test]
fn grid_choice_is_no_worse_than_any_cell() {
    let (spec, truth) = arma(&[0.7], &[-0.4], 0.0);
    let y = arima::simulate(&spec, &truth, 1500, None, 22).unwrap();
    let (chosen, table) = grid_select(&y, None, 0..=3, 0..=2, &spec, &FitOptions::default()).unwrap();
    let best = match table.get(chosen.p, chosen.q).unwrap() {
        BicCell::Value(v) => *v,
        BicCell::Failed(e) => panic!("chosen cell failed: {e}"),
    };
    for row in &table.cells {
        for cell in row {
            if let BicCell::Value(v) = cell {
                assert!(best <= *v);
            }
        }
    }
    assert_eq!((chosen.p, chosen.q), (1, 1));
    assert_eq!(table.render().lines().count(), 1 + 4);
}

#[test]
fn seasonal_model_with_regressor_is_recovered() {
    let spec = ModelSpec::sarima((1, 0, 0), (1, 1, 0), 24).with_exog(1);
    let truth = ParameterVector {
        phi: vec![0.5],
        seasonal_phi: vec![0.4],
        gamma: vec![1.5],
        sigma2: 0.25,
        ..ParameterVector::zeros(&spec)
    };
    let n = 4000;
    let burn = arima::burn_in(&spec);
    let exog = ExogenousMatrix::single(
        weekend_indicator(arima::default_simulation_start(), n + burn).unwrap(),
    );
    let y = arima::simulate(&spec, &truth, n, Some(&exog), 23).unwrap();
    let window = exog.slice(burn, n).unwrap();
    let f = fit(&spec, &y, Some(&window), &FitOptions::default()).unwrap();
    assert!((f.params.phi[0] - 0.5).abs() < 0.05, "{:?}", f.params);
    assert!((f.params.seasonal_phi[0] - 0.4).abs() < 0.05, "{:?}", f.params);
    assert!((f.params.gamma[0] - 1.5).abs() < 0.15, "{:?}", f.params);
    assert!((f.params.sigma2 - 0.25).abs() < 0.03, "{:?}", f.params);
}

#[test]
fn garch_estimate_is_a_local_maximum() {
    let truth = GarchParams {
        alpha0: 0.2,
        alpha: vec![0.15],
        beta: vec![0.7],
    };
    let e = garch::simulate_garch(&truth, 5000, 24).unwrap();
    let est = fit_garch(&e, GarchSpec::default(), &FitOptions::default()).unwrap();
    let ll = garch::garch_log_likelihood(&est, &e).unwrap();
    let steps = [1e-3, -1e-3];
    for i in 0..3 {
        for h in steps {
            let mut p = est.clone();
            match i {
                0 => p.alpha0 *= 1.0 + h,
                1 => p.alpha[0] += h,
                _ => p.beta[0] += h,
            }
            if p.validate().is_ok() {
                let other = garch::garch_log_likelihood(&p, &e).unwrap();
                assert!(other <= ll + 1e-6, "component {i} step {h}: {other} > {ll}");
            }
        }
    }
}

#[test]
fn garch_on_homoskedastic_residuals_stays_flat() {
    let (spec, truth) = arma(&[0.6], &[], 0.0);
    let y = arima::simulate(&spec, &truth, 3000, None, 25).unwrap();
    let f = fit(&spec, &y, None, &FitOptions::default()).unwrap();
    let g = attach_garch(&f, GarchSpec::default(), &FitOptions::default()).unwrap();
    let layer = g.garch.as_ref().unwrap();
    assert!(layer.params.alpha[0] < 0.05 && layer.params.beta[0] < 0.5, "{:?}", layer.params);
    assert_eq!(g.params, f.params);
    let plain = f.forecast(&y, None, None, 10).unwrap();
    let layered = g.forecast(&y, None, None, 10).unwrap();
    assert_eq!(plain.mean, layered.mean);
}

#[test]
fn garch_order_two_fits() {
    let truth = GarchParams {
        alpha0: 0.1,
        alpha: vec![0.1, 0.05],
        beta: vec![0.7],
    };
    let e = garch::simulate_garch(&truth, 8000, 26).unwrap();
    let spec = GarchSpec::new(2, 1).unwrap();
    let est = fit_garch(&e, spec, &FitOptions::default()).unwrap();
    assert_eq!(est.spec(), spec);
    est.validate().unwrap();
    assert!((est.persistence() - truth.persistence()).abs() < 0.08, "{est:?}");
}

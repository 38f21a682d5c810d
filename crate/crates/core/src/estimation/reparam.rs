//! Maps between unconstrained optimizer coordinates and constrained
//! model parameters.
//!
//! Lag polynomials `1 - c_1 B - ... - c_k B^k` are parameterized by their
//! partial autocorrelations `r_j = tanh(x_j)`; the Durbin–Levinson step
//! turns any `|r_j| < 1` into a stationary (equivalently invertible)
//! coefficient vector. GARCH weights use a softmax with an implicit slack
//! component so that they are positive and sum to less than one.

/// Largest partial autocorrelation magnitude the transform produces.
pub const MAX_PARTIAL: f64 = 0.99999;

/// Lag `k` coefficients are scaled by `DAMPING^k`, which pushes every root
/// out by the factor `1 / DAMPING` and keeps the stability margin above
/// [`crate::lag::STABILITY_TOLERANCE`].
pub const DAMPING: f64 = 1.0 - 1e-6;

/// Partial autocorrelations to minus-form polynomial coefficients.
pub fn partials_to_coefficients(partials: &[f64]) -> Vec<f64> {
    let k = partials.len();
    let mut phi = vec![0.0; k];
    let mut prev = vec![0.0; k];
    for (j, &r) in partials.iter().enumerate() {
        phi[j] = r;
        for i in 0..j {
            phi[i] = prev[i] - r * prev[j - 1 - i];
        }
        prev[..=j].copy_from_slice(&phi[..=j]);
    }
    phi
}

/// Inverse of [`partials_to_coefficients`]; `None` if the polynomial is
/// not stationary.
pub fn coefficients_to_partials(coefficients: &[f64]) -> Option<Vec<f64>> {
    let k = coefficients.len();
    let mut phi = coefficients.to_vec();
    let mut partials = vec![0.0; k];
    for j in (0..k).rev() {
        let r = phi[j];
        if !(r.abs() < 1.0) {
            return None;
        }
        partials[j] = r;
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..j)
            .map(|i| (phi[i] + r * phi[j - 1 - i]) / denom)
            .collect();
        phi[..j].copy_from_slice(&prev);
    }
    Some(partials)
}

/// Unconstrained coordinates to polynomial coefficients.
pub fn to_coefficients(x: &[f64]) -> Vec<f64> {
    let partials: Vec<f64> = x
        .iter()
        .map(|v| v.tanh().clamp(-MAX_PARTIAL, MAX_PARTIAL))
        .collect();
    let mut scale = 1.0;
    partials_to_coefficients(&partials)
        .into_iter()
        .map(|c| {
            scale *= DAMPING;
            c * scale
        })
        .collect()
}

/// Unconstrained coordinates for a starting polynomial, pulling partials
/// into `[-limit, limit]`.
pub fn from_partials(partials: &[f64], limit: f64) -> Vec<f64> {
    partials
        .iter()
        .map(|r| r.clamp(-limit, limit).atanh())
        .collect()
}

/// Softmax weights with an implicit zero-logit slack: each weight is
/// positive and their sum is below one.
pub fn to_weights(z: &[f64]) -> Vec<f64> {
    let top = z.iter().copied().fold(0.0f64, f64::max);
    let slack = (-top).exp();
    let exps: Vec<f64> = z.iter().map(|v| (v - top).exp()).collect();
    let total = slack + exps.iter().sum::<f64>();
    exps.into_iter().map(|e| e / total).collect()
}

/// Inverse of [`to_weights`] for positive weights with sum below one.
pub fn from_weights(w: &[f64]) -> Vec<f64> {
    let slack = 1.0 - w.iter().sum::<f64>();
    w.iter().map(|v| (v / slack).ln()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lag::LagPolynomial;
    use proptest::prelude::*;

    #[test]
    fn single_partial_is_the_coefficient() {
        assert_eq!(partials_to_coefficients(&[0.4]), vec![0.4]);
    }

    #[test]
    fn two_lag_example() {
        // (1 - 0.5B)(1 - 0.7B) = 1 - 1.2B + 0.35B²: φ = (1.2, -0.35)
        let partials = coefficients_to_partials(&[1.2, -0.35]).unwrap();
        assert!((partials[1] + 0.35).abs() < 1e-15);
        let back = partials_to_coefficients(&partials);
        assert!((back[0] - 1.2).abs() < 1e-12 && (back[1] + 0.35).abs() < 1e-12);
    }

    #[test]
    fn unit_root_has_no_partials() {
        assert!(coefficients_to_partials(&[1.0]).is_none());
        assert!(coefficients_to_partials(&[0.5, 0.5]).is_none());
    }

    #[test]
    fn weights_round_trip() {
        let w = to_weights(&from_weights(&[0.1, 0.8]));
        assert!((w[0] - 0.1).abs() < 1e-12 && (w[1] - 0.8).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn every_coordinate_maps_to_a_stable_polynomial(
            x in proptest::collection::vec(-8.0f64..8.0, 1..6)
        ) {
            let coeffs = to_coefficients(&x);
            prop_assert!(LagPolynomial::from_minus_form(&coeffs, 1).is_stable());
        }

        #[test]
        fn weights_are_positive_and_sum_below_one(
            z in proptest::collection::vec(-30.0f64..30.0, 1..5)
        ) {
            let w = to_weights(&z);
            prop_assert!(w.iter().all(|&v| v >= 0.0));
            prop_assert!(w.iter().sum::<f64>() < 1.0);
        }

        #[test]
        fn partials_round_trip(r in proptest::collection::vec(-0.95f64..0.95, 1..6)) {
            let back = coefficients_to_partials(&partials_to_coefficients(&r)).unwrap();
            for (a, b) in r.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

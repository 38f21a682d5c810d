//! Nelder–Mead downhill simplex minimization.

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of edge
/// lengths `step`.
///
/// Expansion, contraction and shrink coefficients scale with the dimension
/// (`1 + 2/n`, `3/4 - 1/(2n)`, `1 - 1/n`), which reduces to the classic
/// `2, 1/2, 1/2` for `n = 2` and works better in higher dimensions.
///
/// Converges when the spread of objective values across the simplex falls
/// below `tolerance * (1 + |f_best|)`. After convergence the simplex is
/// rebuilt around the best vertex once; the search stops only when that
/// fresh simplex converges without improving the best value. Non-finite
/// objective values are treated as `+∞`.
pub fn minimize<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    max_iterations: usize,
    tolerance: f64,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    if n == 0 {
        let value = eval(x0);
        return SimplexResult {
            x: Vec::new(),
            value,
            iterations: 0,
            evaluations: 1,
            converged: value.is_finite(),
        };
    }

    let dim = n as f64;
    let expand = 1.0 + 2.0 / dim;
    let contract = 0.75 - 0.5 / dim;
    let shrink = 1.0 - 1.0 / dim.max(2.0);

    let build = |center: &[f64], eval: &mut dyn FnMut(&[f64]) -> f64| {
        let mut simplex = vec![(center.to_vec(), eval(center))];
        for i in 0..n {
            let mut v = center.to_vec();
            v[i] += step[i];
            let fv = eval(&v);
            simplex.push((v, fv));
        }
        simplex
    };

    let mut simplex = build(x0, &mut eval);
    let mut iterations = 0;
    let mut converged = false;
    let mut last_restart_best = f64::INFINITY;

    while iterations < max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if best.is_finite() && worst - best <= tolerance * (1.0 + best.abs()) {
            if best >= last_restart_best - tolerance * (1.0 + best.abs()) {
                converged = true;
                break;
            }
            last_restart_best = best;
            let center = simplex[0].0.clone();
            simplex = build(&center, &mut eval);
            continue;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(REFLECT);
        let f_reflected = eval(&reflected);
        if f_reflected < simplex[0].1 {
            let expanded = along(expand);
            let f_expanded = eval(&expanded);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < simplex[n].1 {
            let c = along(contract * REFLECT);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(-contract);
            let fc = eval(&c);
            (c, fc)
        };
        if f_contracted < simplex[n].1.min(f_reflected) {
            simplex[n] = (contracted, f_contracted);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let shrunk: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, v)| a + shrink * (v - a))
                .collect();
            let fs = eval(&shrunk);
            *vertex = (shrunk, fs);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult {
        x,
        value,
        iterations,
        evaluations,
        converged,
    }
}

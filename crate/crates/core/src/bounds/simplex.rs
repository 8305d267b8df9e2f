//! Nelder–Mead simplex minimization with dimension-adaptive coefficients.

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub max_iterations: usize,
    /// Converged once `f_worst − f_best ≤ f_tolerance · (1 + |f_best|)` and the
    /// simplex diameter is below `x_tolerance`.
    pub f_tolerance: f64,
    pub x_tolerance: f64,
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
}

/// Minimizes `objective` from `x0`. `on_improvement` sees every new best vertex
/// and may abort the run by returning an error.
pub(crate) fn minimize<F, M, E>(
    mut objective: F,
    x0: &[f64],
    opts: &SimplexOptions,
    mut on_improvement: M,
) -> Result<SimplexOutcome, E>
where
    F: FnMut(&[f64]) -> f64,
    M: FnMut(&[f64], f64, f64) -> Result<(), E>,
{
    let n = x0.len();
    let nf = n as f64;
    let (reflect, expand) = (1.0, 1.0 + 2.0 / nf);
    let contract = 0.75 - 0.5 / nf;
    let shrink = if n > 1 { 1.0 - 1.0 / nf } else { 0.5 };

    let mut eval = |x: &[f64]| {
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut best_seen = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    while iterations < opts.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n.saturating_sub(1)]);
        if values[best] < best_seen {
            let gain = if best_seen.is_finite() {
                best_seen - values[best]
            } else {
                f64::INFINITY
            };
            best_seen = values[best];
            on_improvement(&points[best], values[best], gain)?;
        }
        let spread = values[worst] - values[best];
        let diameter = points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&points[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tolerance * (1.0 + values[best].abs()) && diameter <= opts.x_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&points[i]) {
                *c += x / nf;
            }
        }
        let along = |coef: f64, out: &mut Vec<f64>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&points[worst]) {
                *o = c + coef * (c - w);
            }
        };

        along(reflect, &mut trial);
        let fr = eval(&trial);
        if fr < values[best] {
            along(reflect * expand, &mut trial2);
            let fe = eval(&trial2);
            if fe < fr {
                points[worst].clone_from(&trial2);
                values[worst] = fe;
            } else {
                points[worst].clone_from(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            points[worst].clone_from(&trial);
            values[worst] = fr;
            continue;
        }
        let (coef, bar) = if fr < values[worst] {
            (reflect * contract, fr)
        } else {
            (-contract, values[worst])
        };
        along(coef, &mut trial2);
        let fc = eval(&trial2);
        if fc < bar || (fc <= bar && coef < 0.0) {
            points[worst].clone_from(&trial2);
            values[worst] = fc;
            continue;
        }
        let anchor = points[best].clone();
        for &i in &order[1..] {
            for (x, a) in points[i].iter_mut().zip(&anchor) {
                *x = a + shrink * (*x - a);
            }
            values[i] = eval(&points[i]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Ok(SimplexOutcome {
        x: points[best].clone(),
        f: values[best],
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SimplexOptions {
        SimplexOptions {
            max_iterations: 20_000,
            f_tolerance: 1e-14,
            x_tolerance: 1e-8,
            initial_step: 0.5,
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = minimize(f, &[-1.2, 1.0], &opts(), |_, _, _| Ok::<(), ()>(())).unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_in_many_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.5).powi(2)).sum();
        let out = minimize(f, &[0.0; 8], &opts(), |_, _, _| Ok::<(), ()>(())).unwrap();
        assert!(out.f < 1e-12, "{}", out.f);
    }

    #[test]
    fn monitor_can_abort() {
        let f = |x: &[f64]| -x[0];
        let res = minimize(f, &[0.0], &opts(), |x, _, _| if x[0] > 10.0 { Err(x[0]) } else { Ok(()) });
        assert!(res.is_err());
    }
}

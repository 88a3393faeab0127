//! Derivative-free simplex search.

/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Converged once every vertex is within `xtol` (max-norm) of the best one...
    pub xtol: f64,
    /// ...and every vertex value is within `ftol` of the best value.
    pub ftol: f64,
    pub max_evals: usize,
    /// Rebuild the simplex around the best point this many times after convergence.
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { initial_step: 0.3, xtol: 1e-6, ftol: 1e-13, max_evals: 4000, restarts: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder-Mead with dimension-adaptive coefficients. Infeasible points may
/// return `f64::INFINITY`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &SearchOptions) -> Minimum {
    let mut best = run(&mut f, x0, opts.initial_step, opts);
    let mut step = opts.initial_step;
    for _ in 0..opts.restarts {
        if best.evals >= opts.max_evals {
            break;
        }
        step *= 0.5;
        let budget = SearchOptions { max_evals: opts.max_evals - best.evals, ..*opts };
        let next = run(&mut f, &best.x, step, &budget);
        let improved = next.value < best.value - opts.ftol;
        let evals = best.evals + next.evals;
        if next.value <= best.value {
            best = Minimum { evals, ..next };
        } else {
            best.evals = evals;
            best.converged &= next.converged;
        }
        if !improved {
            break;
        }
    }
    best
}

fn run<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], step: f64, opts: &SearchOptions) -> Minimum {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let fspread = vals[n] - vals[0];
        let xspread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if xspread <= opts.xtol && (fspread <= opts.ftol || !fspread.is_finite() && xspread == 0.0) {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let centroid: Vec<f64> =
            (0..n).map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / nf).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(alpha * gamma);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for i in 1..=n {
            let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + delta * (x - b)).collect();
            vals[i] = eval(&p, &mut evals);
            pts[i] = p;
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Minimum { x: pts[best].clone(), value: vals[best], evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = SearchOptions { initial_step: 0.5, xtol: 1e-10, ftol: 1e-20, max_evals: 20_000, restarts: 2 };
        let m = nelder_mead(rosen, &[-1.2, 1.0], &opts);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn respects_infeasible_region() {
        // Minimum of x^2 + y^2 restricted to x >= 1.
        let f = |x: &[f64]| if x[0] < 1.0 { f64::INFINITY } else { x[0] * x[0] + x[1] * x[1] };
        let m = nelder_mead(f, &[2.0, 0.5], &SearchOptions { xtol: 1e-9, ftol: 1e-14, max_evals: 10_000, ..Default::default() });
        assert!((m.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn higher_dimensional_quadratic() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v - 0.1 * i as f64).powi(2)).sum();
        let m = nelder_mead(f, &[0.0; 8], &SearchOptions { xtol: 1e-8, ftol: 1e-16, max_evals: 50_000, ..Default::default() });
        assert!(m.value < 1e-10, "{}", m.value);
    }
}

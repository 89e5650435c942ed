//! Nelder–Mead simplex search.

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when the spread of objective values is below `ftol·|f_best|`
    /// (plus a tiny absolute floor).
    pub ftol: f64,
    /// ...or when the simplex has shrunk below this size.
    pub xtol: f64,
    pub step: f64,
}

fn safe(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

pub(crate) fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let eval = |x: &[f64]| safe(f(x));
    let mut evals = 0;
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    pts.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.step;
        let fx = eval(&x);
        pts.push((x, fx));
    }
    evals += n + 1;
    let mut converged = false;
    while evals < opts.max_evals {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (pts[0].1, pts[n].1);
        let size = pts[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&pts[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (worst - best <= opts.ftol * best.abs() + 1e-300 && best.is_finite()) || size <= opts.xtol {
            converged = best.is_finite();
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| pts[..n].iter().map(|p| p.0[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < best {
            let xe = along(-2.0);
            let fe = eval(&xe);
            evals += 1;
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < pts[n - 1].1 {
            pts[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let x = along(-0.5);
            let fx = eval(&x);
            (x, fx)
        } else {
            let x = along(0.5);
            let fx = eval(&x);
            (x, fx)
        };
        evals += 1;
        if fc < fr.min(worst) {
            pts[n] = (xc, fc);
            continue;
        }
        let x_best = pts[0].0.clone();
        for p in pts.iter_mut().skip(1) {
            p.0 = p.0.iter().zip(&x_best).map(|(x, b)| b + 0.5 * (x - b)).collect();
            p.1 = eval(&p.0);
        }
        evals += n;
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = pts.swap_remove(0);
    SimplexResult { x, f, evals, converged }
}

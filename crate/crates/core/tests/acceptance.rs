//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines always reach stdout.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subordination::mixing::{mixing_cf, phi_mix_density_gamma, phi_mix_mass, phi_mix_stable, small_s_ratio, IntervalSet};
use subordination::quadrature::{integrate, integrate_line, QuadOptions};
use subordination::recover::{
    empirical_cf, fit_subordinator, ou_invert, psi_curve, recover_from_path, symmetric_grid, CFSample, FitOptions,
    SubordinatorFamily,
};
use subordination::simulate::{sample_basis_grid, sample_lss, sample_subordinated, Kernel, SimConfig, TimeGrid};
use subordination::subordinate::{cell_log_cf, cf_from_triplet, compose_cf, subordinate_triplet, Rect, SeedCell, SeedField};
use subordination::{LevyMeasure, LevyTriplet, SubordinatorPair};

type Outcome = Result<String, String>;

fn gaussian() -> LevyTriplet {
    LevyTriplet::gaussian(0.0, 1.0).unwrap()
}

fn gamma_pair(a: f64, l: f64) -> SubordinatorPair {
    SubordinatorPair::new(0.0, LevyMeasure::gamma(a, l).unwrap()).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn two_path_cf() -> Outcome {
    let fixtures = [
        (gaussian(), gamma_pair(2.0, 3.0)),
        (
            LevyTriplet::poisson(1.0, 1.0).unwrap(),
            SubordinatorPair::new(0.0, LevyMeasure::atom(1.0, 1.0).unwrap()).unwrap(),
        ),
        (gaussian(), SubordinatorPair::drift(1.5).unwrap()),
    ];
    let grid = symmetric_grid(10.0, 100).unwrap();
    let mut worst = 0.0f64;
    for (mu, pair) in &fixtures {
        let st = subordinate_triplet(mu, pair).map_err(|e| e.to_string())?;
        for &t in &grid {
            let a = cf_from_triplet(&st, t).map_err(|e| e.to_string())?;
            let b = compose_cf(mu, pair, t).map_err(|e| e.to_string())?;
            worst = worst.max((a - b).norm());
        }
    }
    check(worst <= 1e-6, format!("max |Δ| = {worst:.2e} over 3 fixtures × 201 θ"))
}

fn gamma_mixing_closed_form() -> Outcome {
    let lambda = 1.3;
    let rho = LevyMeasure::gamma(1.5, 2.0).unwrap();
    let mu = LevyTriplet::gamma_law(1.0, lambda).unwrap();
    let opts = QuadOptions::default().with_abs_tol(1e-12);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let (lo, hi) = (0.1 * (k + 1) as f64, 0.1 * (k + 2) as f64);
        let dens = integrate(|x: f64| phi_mix_density_gamma(lambda, &rho, x).unwrap(), lo, hi, &opts)
            .map_err(|e| e.to_string())?
            .value;
        let generic = phi_mix_mass(&mu, &rho, &IntervalSet::interval(lo, hi).unwrap())
            .map_err(|e| e.to_string())?
            .value;
        worst = worst.max((dens - generic).abs());
    }
    check(worst <= 1e-8, format!("max |Δ| = {worst:.2e} over 50 intervals"))
}

fn stable_scaling() -> Outcome {
    let rho = LevyMeasure::gamma(1.0, 1.0).unwrap();
    let bases = [
        (LevyTriplet::symmetric_stable_law(1.0, 0.5).unwrap(), 1.0),
        (LevyTriplet::gaussian(0.0, 1.3).unwrap(), 2.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for (mu, alpha) in &bases {
        let mixer = phi_mix_stable(mu, *alpha, &rho).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let a: f64 = rng.random_range(0.05..4.0);
            let b = a + rng.random_range(0.05..3.0);
            let set = if rng.random::<bool>() {
                IntervalSet::interval(a, b)
            } else {
                IntervalSet::interval(-b, -a)
            }
            .unwrap();
            let fast = mixer.mass(&set).map_err(|e| e.to_string())?.value;
            let slow = phi_mix_mass(mu, &rho, &set).map_err(|e| e.to_string())?.value;
            worst = worst.max((fast - slow).abs());
        }
    }
    check(worst <= 1e-8, format!("max |Δ| = {worst:.2e} over 2 bases × 20 intervals"))
}

/// Density of `∫ N(m s, s) ρ(ds)` for a compound-exponential `ρ`.
fn mixed_density(x: f64, m: f64, rate: f64, eta: f64) -> f64 {
    let opts = QuadOptions::default().with_abs_tol(1e-14);
    integrate_line(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            rate * eta * (-eta * s).exp() * (-(x - m * s).powi(2) / (2.0 * s)).exp() / (2.0 * PI * s).sqrt()
        },
        0.0,
        f64::INFINITY,
        &opts,
    )
    .unwrap()
    .value
}

fn finite_mixing_cf() -> Outcome {
    let m = 0.3;
    let mu = LevyTriplet::gaussian(m, 1.0).unwrap();
    let atoms = [(0.5, 1.0), (2.0, 0.3)];
    let fixtures: Vec<(LevyMeasure, Box<dyn Fn(f64) -> f64>)> = vec![
        (
            LevyMeasure::atomic(atoms.to_vec()).unwrap(),
            Box::new(move |x: f64| {
                atoms
                    .iter()
                    .map(|(s, w)| w * (-(x - m * s).powi(2) / (2.0 * s)).exp() / (2.0 * PI * s).sqrt())
                    .sum()
            }),
        ),
        (
            LevyMeasure::compound_exponential(2.0, 1.5).unwrap(),
            Box::new(move |x: f64| mixed_density(x, m, 2.0, 1.5)),
        ),
    ];
    let opts = QuadOptions::default().with_abs_tol(1e-11);
    let mut worst = 0.0f64;
    for (rho, density) in &fixtures {
        for k in -5..=5 {
            let t = k as f64;
            let direct = integrate_line(
                |x: f64| Complex64::new(0.0, t * x).exp() * density(x),
                f64::NEG_INFINITY,
                f64::INFINITY,
                &opts,
            )
            .map_err(|e| e.to_string())?
            .value;
            let closed = mixing_cf(&mu, rho, t).map_err(|e| e.to_string())?;
            worst = worst.max((direct - closed).norm());
        }
    }
    check(worst <= 1e-6, format!("max |Δ| = {worst:.2e} over 2 fixtures × 11 θ"))
}

fn small_time_constant() -> Outcome {
    let g = gaussian();
    let s = [1e-2, 1e-3, 1e-4];
    let r: Vec<f64> = s.iter().map(|&x| small_s_ratio(&g, x).unwrap()).collect();
    // linear extrapolation to s = 0 through the two smallest points
    let limit = r[2] - (r[1] - r[2]) * s[2] / (s[1] - s[2]);
    check(
        (limit - 1.0).abs() <= 1e-3,
        format!("ratios {:?}, extrapolated {limit:.6}", r.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>()),
    )
}

fn vg_path(n: usize, seed: u64) -> subordination::simulate::PathSample {
    let grid = TimeGrid::new(0.0, 1.0, n).unwrap();
    sample_subordinated(&gaussian(), &gamma_pair(2.0, 3.0), &grid, &SimConfig::with_seed(seed))
        .unwrap()
        .remove(0)
}

fn monte_carlo_law() -> Outcome {
    let n = 100_000;
    let inc = vg_path(n, 1).increments();
    let grid = symmetric_grid(5.0, 20).unwrap();
    let ecf = empirical_cf(&inc, &grid).map_err(|e| e.to_string())?;
    let pair = gamma_pair(2.0, 3.0);
    let worst = grid
        .iter()
        .zip(ecf.values())
        .map(|(&t, v)| (v - compose_cf(&gaussian(), &pair, t).unwrap().exp()).norm())
        .fold(0.0, f64::max);
    let bound = 4.0 / (n as f64).sqrt();
    check(worst <= bound, format!("sup |ECF - φ| = {worst:.4} (bound {bound:.4})"))
}

fn noiseless_recovery() -> Outcome {
    let mu = gaussian();
    let cf = CFSample::analytic(&mu, &gamma_pair(2.0, 3.0), symmetric_grid(10.0, 50).unwrap()).unwrap();
    let curve = psi_curve(&mu, &cf).map_err(|e| e.to_string())?;
    let fit = fit_subordinator(&curve, SubordinatorFamily::Gamma, &FitOptions::default()).map_err(|e| e.to_string())?;
    let err = (fit.params[0] / 2.0 - 1.0).abs().max((fit.params[1] / 3.0 - 1.0).abs());
    check(
        err < 1e-6 && fit.objective < 1e-12,
        format!("params {:?}, rel err {err:.2e}, objective {:.2e}", fit.params, fit.objective),
    )
}

fn end_to_end_recovery() -> Outcome {
    let path = vg_path(100_000, 1);
    let opts = FitOptions {
        weighted: true,
        ..FitOptions::default()
    };
    let fit = recover_from_path(&path, &gaussian(), SubordinatorFamily::Gamma, &opts).map_err(|e| e.to_string())?;
    let err = (fit.params[0] / 2.0 - 1.0).abs().max((fit.params[1] / 3.0 - 1.0).abs());
    check(err < 0.05, format!("params ({:.4}, {:.4}), rel err {err:.4}", fit.params[0], fit.params[1]))
}

fn injectivity() -> Outcome {
    let grid = symmetric_grid(10.0, 50).unwrap();
    let sep = |f: &dyn Fn(f64) -> Complex64, g: &dyn Fn(f64) -> Complex64| {
        grid.iter().map(|&t| (f(t) - g(t)).norm()).fold(0.0, f64::max)
    };
    let g = gaussian();
    // time changes with equal mean
    let (p, q) = (gamma_pair(2.0, 3.0), gamma_pair(4.0, 6.0));
    let s_pair = sep(&|t| compose_cf(&g, &p, t).unwrap(), &|t| compose_cf(&g, &q, t).unwrap());
    // base laws with equal mean
    let g2 = LevyTriplet::gaussian(0.0, 1.2).unwrap();
    let s_base = sep(&|t| compose_cf(&g, &p, t).unwrap(), &|t| compose_cf(&g2, &p, t).unwrap());
    // seed fields differing in one cell
    let cell = |pair: SubordinatorPair, x: f64| SeedCell {
        rect: Rect::new(x, 0.0, x + 1.0, 1.0).unwrap(),
        pair,
        weight: 1.0,
    };
    let f1 = SeedField::new(vec![cell(p.clone(), 0.0), cell(gamma_pair(1.0, 1.0), 1.0)]).unwrap();
    let f2 = SeedField::new(vec![cell(q.clone(), 0.0), cell(gamma_pair(1.0, 1.0), 1.0)]).unwrap();
    let s_field = f1
        .cells()
        .iter()
        .zip(f2.cells())
        .map(|(a, b)| sep(&|t| cell_log_cf(&g, a, t).unwrap(), &|t| cell_log_cf(&g, b, t).unwrap()))
        .fold(0.0, f64::max);

    let cf = CFSample::analytic(&g, &p, grid.clone()).unwrap();
    let curve = psi_curve(&g, &cf).map_err(|e| e.to_string())?;
    let confounder: f64 = curve
        .points
        .iter()
        .map(|pt| (pt.psi_hat - q.laplace_exponent(pt.z).unwrap()).norm_sqr())
        .sum();
    let truth: f64 = curve
        .points
        .iter()
        .map(|pt| (pt.psi_hat - p.laplace_exponent(pt.z).unwrap()).norm_sqr())
        .sum();
    let opts = FitOptions::default();
    let right = fit_subordinator(&curve, SubordinatorFamily::Gamma, &opts).map_err(|e| e.to_string())?;
    let mut cross = Vec::new();
    for fam in [
        SubordinatorFamily::OneSidedStable { alpha: None },
        SubordinatorFamily::CompoundExponential,
    ] {
        // a non-converged wrong-family fit also counts as rejection
        let obj = fit_subordinator(&curve, fam, &opts).map(|f| f.objective).unwrap_or(f64::INFINITY);
        cross.push(obj);
    }
    let ok = s_pair > 0.01
        && s_base > 0.01
        && s_field > 0.01
        && confounder >= 10.0 * truth
        && cross.iter().all(|&c| c >= 10.0 * right.objective);
    check(
        ok,
        format!(
            "separations {s_pair:.3}/{s_base:.3}/{s_field:.3}; confounder obj {confounder:.2e} vs {truth:.2e}; \
             cross-family {:.2e}, {:.2e} vs gamma {:.2e}",
            cross[0], cross[1], right.objective
        ),
    )
}

fn ou_error(dt: f64) -> f64 {
    let grid = TimeGrid::new(0.0, dt, (10.0 / dt).round() as usize).unwrap();
    let s = sample_lss(Kernel::Exp, &gaussian(), &gamma_pair(1.0, 1.0), &grid, 25.0, &SimConfig::with_seed(5))
        .unwrap()
        .remove(0);
    let rec = ou_invert(&s.path).unwrap();
    let err: f64 = rec.iter().zip(&s.driver).map(|(a, b)| (a - b).abs()).sum::<f64>() / rec.len() as f64;
    let scale: f64 = s.driver.iter().map(|d| d.abs()).sum::<f64>() / rec.len() as f64;
    err / scale
}

fn ou_inversion() -> Outcome {
    let e: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&dt| ou_error(dt)).collect();
    check(
        e[2] < 0.02 && e[1] < e[0] && e[2] < e[1],
        format!("relative errors at dt = 4e-3, 2e-3, 1e-3: {:.2e}, {:.2e}, {:.2e}", e[0], e[1], e[2]),
    )
}

fn basis_simulation() -> Outcome {
    let pairs = [
        gamma_pair(1.0, 1.0),
        gamma_pair(2.0, 3.0),
        SubordinatorPair::new(0.5, LevyMeasure::gamma(0.5, 1.0).unwrap()).unwrap(),
        gamma_pair(3.0, 2.0),
    ];
    let cells: Vec<SeedCell> = pairs
        .iter()
        .enumerate()
        .map(|(k, pair)| SeedCell {
            rect: Rect::new((k % 2) as f64, (k / 2) as f64, (k % 2 + 1) as f64, (k / 2 + 1) as f64).unwrap(),
            pair: pair.clone(),
            weight: if k == 3 { 2.0 } else { 1.0 },
        })
        .collect();
    let field = SeedField::new(cells).unwrap();
    let n = 50_000;
    let g = gaussian();
    let mut reps = sample_basis_grid(&g, &field, &SimConfig::with_seed(21).paths(n)).map_err(|e| e.to_string())?;
    let mut additive = true;
    for f in reps.iter_mut() {
        for parts in [vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]] {
            let expected = parts.iter().map(|&i| f.cells[i].value).fold(0.0, |a, b| a + b);
            let u = f.add_union(&parts).map_err(|e| e.to_string())?;
            additive &= u.value == expected;
        }
    }
    let theta = symmetric_grid(3.0, 10).unwrap();
    let mut worst = 0.0f64;
    for (i, cell) in field.cells().iter().enumerate() {
        let values: Vec<f64> = reps.iter().map(|f| f.cells[i].value).collect();
        let ecf = empirical_cf(&values, &theta).map_err(|e| e.to_string())?;
        for (&t, v) in theta.iter().zip(ecf.values()) {
            worst = worst.max((v - cell_log_cf(&g, cell, t).unwrap().exp()).norm());
        }
    }
    let bound = 4.0 / (n as f64).sqrt();
    check(
        additive && worst <= bound,
        format!("unions exact: {additive}; sup |ECF - φ| = {worst:.4} (bound {bound:.4})"),
    )
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("two-path CF agreement", 30, two_path_cf),
        ("gamma mixing closed form", 10, gamma_mixing_closed_form),
        ("stable scaling identity", 5, stable_scaling),
        ("finite-mixing CF identity", 5, finite_mixing_cf),
        ("small-time constant", 2, small_time_constant),
        ("Monte Carlo law of L_T1", 30, monte_carlo_law),
        ("noiseless recovery", 10, noiseless_recovery),
        ("end-to-end recovery", 60, end_to_end_recovery),
        ("injectivity witnesses", 20, injectivity),
        ("OU inversion", 30, ou_inversion),
        ("basis simulation", 30, basis_simulation),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  [{:.2}s / {}s]  {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit,
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

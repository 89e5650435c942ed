use std::time::Instant;

use serde::Serialize;
use subordination::mixing::{phi_mix_mass, IntervalSet};
use subordination::recover::{recover_from_increments, FitOptions, SubordinatorFamily};
use subordination::simulate::{
    sample_basis_grid, sample_levy, sample_lss, sample_subordinated, sample_subordinator, PathSample, SimConfig, TimeGrid,
};
use subordination::subordinate::{compose_cf, subordinate_triplet};

use crate::error::CliError;
use crate::output::{num, numbered, path_csv, read_path_csv, series_csv, write_atomic};
use crate::spec::ModelSpec;
use crate::{Opts, Process};

fn model(o: &Opts) -> Result<ModelSpec, CliError> {
    let path = o.model.as_ref().ok_or_else(|| CliError::Spec("--model is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    ModelSpec::parse(&text)
}

/// `theta` if given, else `steps + 1` points from min to max.
fn theta_grid(o: &Opts, steps: usize) -> Result<Vec<f64>, CliError> {
    if let Some(t) = &o.theta {
        return Ok(t.clone());
    }
    let lo = o.theta_min.unwrap_or(-10.0);
    let hi = o.theta_max.unwrap_or(10.0);
    let n = o.theta_steps.unwrap_or(steps);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || n == 0 {
        return Err(CliError::Spec("θ range needs finite min < max and at least one step".into()));
    }
    // exact endpoints, and exact 0 for symmetric ranges with an even count
    Ok((0..=n)
        .map(|j| (lo * (n - j) as f64 + hi * j as f64) / n as f64)
        .collect())
}

fn intervals(o: &Opts) -> Result<Vec<(f64, f64)>, CliError> {
    let edges = o
        .partition
        .clone()
        .unwrap_or_else(|| vec![-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0]);
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Spec("--partition needs at least two increasing edges".into()));
    }
    Ok(edges
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(a, b)| !(*a < 0.0 && *b > 0.0))
        .collect())
}

fn sim_config(o: &Opts) -> SimConfig {
    SimConfig {
        epsilon: o.epsilon,
        seed: o.seed,
        n_paths: o.n_paths,
        ..SimConfig::default()
    }
}

fn time_grid(o: &Opts, default_dt: f64) -> Result<TimeGrid, CliError> {
    let dt = o.dt.unwrap_or(default_dt);
    if !(o.horizon.is_finite() && o.horizon > 0.0) {
        return Err(CliError::Spec("--horizon must be > 0".into()));
    }
    let n = (o.horizon / dt).round().max(1.0) as usize;
    Ok(TimeGrid::new(0.0, dt, n)?)
}

fn write_paths(o: &Opts, paths: &[PathSample]) -> Result<(), CliError> {
    for (k, p) in paths.iter().enumerate() {
        write_atomic(&numbered(&o.out, k, paths.len()), path_csv(p).as_bytes())?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serialises");
    s.push('\n');
    s.into_bytes()
}

pub fn cf(o: &Opts) -> Result<(), CliError> {
    let m = model(o)?;
    let (mu, pair) = (m.levy()?, m.pair()?);
    let rows = theta_grid(o, 200)?
        .into_iter()
        .map(|t| {
            let v = compose_cf(&mu, &pair, t)?;
            Ok(vec![t, v.re, v.im])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_atomic(&o.out, series_csv("theta,re,im", &rows).as_bytes())
}

#[derive(Serialize)]
struct MassRow {
    lo: f64,
    hi: f64,
    mass: f64,
    abs_error: f64,
}

#[derive(Serialize)]
struct TripletReport {
    gamma_bar: f64,
    b_bar: f64,
    nu_bar: Vec<MassRow>,
}

pub fn subordinate(o: &Opts) -> Result<(), CliError> {
    let m = model(o)?;
    let st = subordinate_triplet(&m.levy()?, &m.pair()?)?;
    let nu_bar = intervals(o)?
        .into_iter()
        .map(|(lo, hi)| {
            let r = st.nu_bar_mass(&IntervalSet::interval(lo, hi)?)?;
            Ok(MassRow {
                lo,
                hi,
                mass: r.value,
                abs_error: r.abs_error_estimate,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let report = TripletReport {
        gamma_bar: st.gamma_bar(),
        b_bar: st.b_bar(),
        nu_bar,
    };
    write_atomic(&o.out, &to_json(&report))
}

pub fn mix(o: &Opts) -> Result<(), CliError> {
    let m = model(o)?;
    let (mu, pair) = (m.levy()?, m.pair()?);
    let rows = intervals(o)?
        .into_iter()
        .map(|(lo, hi)| {
            let r = phi_mix_mass(&mu, pair.rho(), &IntervalSet::interval(lo, hi)?)?;
            Ok(vec![lo, hi, r.value])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_atomic(&o.out, series_csv("lo,hi,mass", &rows).as_bytes())
}

pub fn simulate(o: &Opts) -> Result<(), CliError> {
    let m = model(o)?;
    let grid = time_grid(o, 0.01)?;
    let cfg = sim_config(o);
    let paths = match o.process {
        Process::X => sample_subordinated(&m.levy()?, &m.pair()?, &grid, &cfg)?,
        Process::T => sample_subordinator(&m.pair()?, &grid, &cfg)?,
        Process::L => sample_levy(&m.levy()?, &grid, &cfg)?,
    };
    write_paths(o, &paths)
}

fn parse_family(s: &str) -> Result<SubordinatorFamily, CliError> {
    Ok(match s {
        "drift" => SubordinatorFamily::PureDrift,
        "gamma" => SubordinatorFamily::Gamma,
        "stable" => SubordinatorFamily::OneSidedStable { alpha: None },
        "compound-exp" => SubordinatorFamily::CompoundExponential,
        other => match other.strip_prefix("stable:").map(str::parse::<f64>) {
            Some(Ok(a)) => SubordinatorFamily::OneSidedStable { alpha: Some(a) },
            _ => return Err(CliError::Spec(format!("--family: unknown family {other:?}"))),
        },
    })
}

fn family_name(f: SubordinatorFamily) -> String {
    match f {
        SubordinatorFamily::PureDrift => "drift".into(),
        SubordinatorFamily::Gamma => "gamma".into(),
        SubordinatorFamily::OneSidedStable { alpha: None } => "stable".into(),
        SubordinatorFamily::OneSidedStable { alpha: Some(a) } => format!("stable:{a}"),
        SubordinatorFamily::CompoundExponential => "compound-exp".into(),
    }
}

#[derive(Serialize)]
struct RecoveryReport {
    family: String,
    params: Vec<f64>,
    beta0: f64,
    objective: f64,
    n_starts_converged: usize,
    residual_max: f64,
    theta: Vec<f64>,
    /// `[re, im]` per θ.
    residuals: Vec<[f64; 2]>,
    n_obs: usize,
    spacing: f64,
    seed: u64,
    wall_time_s: f64,
}

/// Increments and their common spacing from `t,value` files.
fn observed_increments(o: &Opts) -> Result<(Vec<f64>, f64), CliError> {
    let mut inc = Vec::new();
    let mut spacing: Option<f64> = None;
    for p in &o.paths {
        let (t, v) = read_path_csv(p)?;
        if t.len() < 2 {
            return Err(CliError::Spec(format!("{}: need at least two rows", p.display())));
        }
        let dt = t[1] - t[0];
        let uneven = t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0));
        if uneven || spacing.is_some_and(|s| (s - dt).abs() > 1e-9 * s) {
            return Err(CliError::Spec(format!("{}: paths must share one uniform spacing", p.display())));
        }
        spacing = Some(dt);
        inc.extend(v.windows(2).map(|w| w[1] - w[0]));
    }
    Ok((inc, spacing.expect("at least one path")))
}

pub fn recover(o: &Opts) -> Result<(), CliError> {
    let start = Instant::now();
    let m = model(o)?;
    let mu = m.levy()?;
    let family = parse_family(&o.family)?;
    let (increments, spacing) = if o.paths.is_empty() {
        let dt = o.dt.unwrap_or(1.0);
        let grid = TimeGrid::new(0.0, dt, o.n_obs)?;
        let cfg = SimConfig {
            n_paths: 1,
            ..sim_config(o)
        };
        let path = sample_subordinated(&mu, &m.pair()?, &grid, &cfg)?.remove(0);
        (path.increments(), dt)
    } else {
        observed_increments(o)?
    };
    let options = FitOptions {
        seed: o.seed,
        n_starts: o.starts,
        weighted: o.weighted,
        with_drift: o.with_drift,
        theta: theta_grid(o, 100)?,
        ..FitOptions::default()
    };
    let fit = recover_from_increments(&increments, spacing, &mu, family, &options)?;
    let report = RecoveryReport {
        family: family_name(fit.family),
        params: fit.params.clone(),
        beta0: fit.beta0_hat,
        objective: fit.objective,
        n_starts_converged: fit.n_starts_converged,
        residual_max: fit.residual_max,
        theta: fit.theta.clone(),
        residuals: fit.residuals.iter().map(|r| [r.re, r.im]).collect(),
        n_obs: increments.len(),
        spacing,
        seed: o.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_atomic(&o.out, &to_json(&report))
}

pub fn basis_sim(o: &Opts) -> Result<(), CliError> {
    let m = model(o)?;
    let (field, unions) = m.field()?;
    let fields = sample_basis_grid(&m.levy()?, &field, &sim_config(o))?;
    for (k, mut f) in fields.into_iter().enumerate() {
        for u in unions {
            f.add_union(u)?;
        }
        let rows: Vec<Vec<f64>> = f
            .cells
            .iter()
            .map(|c| (c.rect, c.value))
            .chain(f.unions.iter().map(|u| (u.rect, u.value)))
            .map(|(r, v)| vec![r.x0, r.y0, r.x1, r.y1, v])
            .collect();
        write_atomic(
            &numbered(&o.out, k, o.n_paths),
            series_csv("x0,y0,x1,y1,value", &rows).as_bytes(),
        )?;
    }
    Ok(())
}

pub fn lss_sim(o: &Opts) -> Result<(), CliError> {
    let m = model(o)?;
    let grid = time_grid(o, 0.01)?;
    let out = sample_lss(m.kernel()?, &m.levy()?, &m.pair()?, &grid, o.burn_in, &sim_config(o))?;
    let n = out.len();
    for (k, s) in out.iter().enumerate() {
        write_atomic(&numbered(&o.out, k, n), path_csv(&s.path).as_bytes())?;
        if let Some(d) = &o.driver_out {
            let mut text = String::from("t,value\n");
            for (i, x) in s.driver.iter().enumerate() {
                text.push_str(&format!("{},{}\n", num(grid.time(i)), num(*x)));
            }
            write_atomic(&numbered(d, k, n), text.as_bytes())?;
        }
    }
    Ok(())
}


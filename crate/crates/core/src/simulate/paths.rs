use rayon::prelude::*;

use super::samplers::{LevySampler, SubordinatorSampler};
use super::{substream, PathSample, SimConfig, TimeGrid};
use crate::error::Result;
use crate::levy::{LevyTriplet, SubordinatorPair};

fn build_paths<F>(grid: &TimeGrid, cfg: &SimConfig, step: F) -> Result<Vec<PathSample>>
where
    F: Fn(u64, u64) -> Result<f64> + Sync,
{
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|stream| {
            let mut values = Vec::with_capacity(grid.n_steps() + 1);
            let mut acc = 0.0;
            values.push(acc);
            for j in 0..grid.n_steps() as u64 {
                acc += step(stream, j)?;
                values.push(acc);
            }
            Ok(PathSample {
                grid: *grid,
                values,
                seed: cfg.seed,
                stream_id: stream,
            })
        })
        .collect()
}

/// `cfg.n_paths` subordinator paths started at 0; path `k` uses stream `k`.
pub fn sample_subordinator(pair: &SubordinatorPair, grid: &TimeGrid, cfg: &SimConfig) -> Result<Vec<PathSample>> {
    let sampler = SubordinatorSampler::new(pair, cfg, grid.horizon())?;
    let dt = grid.dt();
    build_paths(grid, cfg, |stream, j| sampler.sample(dt, &mut substream(cfg.seed, stream, j)))
}

/// `cfg.n_paths` Lévy paths started at 0.
pub fn sample_levy(t: &LevyTriplet, grid: &TimeGrid, cfg: &SimConfig) -> Result<Vec<PathSample>> {
    let sampler = LevySampler::new(t, cfg, grid.horizon())?;
    let dt = grid.dt();
    build_paths(grid, cfg, |stream, j| sampler.sample(dt, &mut substream(cfg.seed, stream, j)))
}

/// Paths of `X_t = L_{T_t}` together with the clock `T` that produced them.
///
/// Each step draws `ΔT` and then `ΔX ~ μ_L^{ΔT}`, exactly when `μ_L` has a
/// tagged family and otherwise from the truncated Lévy–Itô construction run
/// over the random duration `ΔT`.
pub fn sample_subordinated_with_clock(
    mu_l: &LevyTriplet,
    pair: &SubordinatorPair,
    grid: &TimeGrid,
    cfg: &SimConfig,
) -> Result<Vec<(PathSample, PathSample)>> {
    let clock = SubordinatorSampler::new(pair, cfg, grid.horizon())?;
    let horizon = pair.mean().unwrap_or(f64::INFINITY) * grid.horizon();
    let base = LevySampler::new(mu_l, cfg, if horizon.is_finite() { horizon } else { grid.horizon() })?;
    let dt = grid.dt();
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|stream| {
            let n = grid.n_steps();
            let mut x = Vec::with_capacity(n + 1);
            let mut t = Vec::with_capacity(n + 1);
            let (mut xa, mut ta) = (0.0, 0.0);
            x.push(xa);
            t.push(ta);
            for j in 0..n as u64 {
                let mut rng = substream(cfg.seed, stream, j);
                let d_t = clock.sample(dt, &mut rng)?;
                xa += base.sample(d_t, &mut rng)?;
                ta += d_t;
                x.push(xa);
                t.push(ta);
            }
            let mk = |values| PathSample {
                grid: *grid,
                values,
                seed: cfg.seed,
                stream_id: stream,
            };
            Ok((mk(x), mk(t)))
        })
        .collect()
}

pub fn sample_subordinated(
    mu_l: &LevyTriplet,
    pair: &SubordinatorPair,
    grid: &TimeGrid,
    cfg: &SimConfig,
) -> Result<Vec<PathSample>> {
    Ok(sample_subordinated_with_clock(mu_l, pair, grid, cfg)?
        .into_iter()
        .map(|(x, _)| x)
        .collect())
}

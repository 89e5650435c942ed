use rayon::prelude::*;

use super::samplers::{LevySampler, SubordinatorSampler};
use super::{substream, PathSample, SimConfig, TimeGrid};
use crate::error::{Error, Result};
use crate::levy::{LevyTriplet, SubordinatorPair};

/// Moving-average kernels; both vanish for `x <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `e^{-x}`.
    Exp,
    /// `e^{-x} x^α`, `α > -1`.
    Gamma { alpha: f64 },
}

impl Kernel {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Kernel::Exp => (-x).exp(),
            Kernel::Gamma { alpha } => (-x).exp() * x.powf(alpha),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Kernel::Gamma { alpha } = *self {
            if !(alpha.is_finite() && alpha > -1.0) {
                return Err(Error::invalid(format!("gamma kernel needs α > -1, got {alpha}")));
            }
        }
        Ok(())
    }

    fn is_exponential(&self) -> bool {
        matches!(*self, Kernel::Exp | Kernel::Gamma { alpha: 0.0 })
    }
}

/// An LSS path and the driving increments `ΔX_i` over `[t_i, t_{i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LssSample {
    pub path: PathSample,
    pub driver: Vec<f64>,
}

/// `Y_{t_i} = Σ_{s_j < t_i} f(t_i - s_j) ΔX_{s_j}` with `X = L_T` simulated on
/// a grid of the same spacing that starts `burn_in` before `t0`.
///
/// For the exponential kernel the sum is evaluated by the exact recursion
/// `Y_{i+1} = e^{-dt} (Y_i + ΔX_i)`; other kernels sum over lags up to
/// `burn_in`.
pub fn sample_lss(
    kernel: Kernel,
    mu_l: &LevyTriplet,
    pair: &SubordinatorPair,
    grid: &TimeGrid,
    burn_in: f64,
    cfg: &SimConfig,
) -> Result<Vec<LssSample>> {
    kernel.validate()?;
    if !(burn_in.is_finite() && burn_in > 0.0) {
        return Err(Error::ConfigError("burn-in must be finite and > 0".into()));
    }
    let tail = kernel.eval(burn_in);
    if tail > 1e-8 {
        return Err(Error::ConfigError(format!(
            "burn-in {burn_in} too short: kernel still {tail:e} there"
        )));
    }
    let dt = grid.dt();
    let n_burn = (burn_in / dt).ceil() as usize;
    let n_total = n_burn + grid.n_steps();
    let clock = SubordinatorSampler::new(pair, cfg, dt * n_total as f64)?;
    let base = LevySampler::new(mu_l, cfg, dt * n_total as f64)?;
    let weights: Vec<f64> = if kernel.is_exponential() {
        Vec::new()
    } else {
        (0..=n_burn).map(|k| kernel.eval(k as f64 * dt)).collect()
    };
    let decay = (-dt).exp();
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|stream| {
            let dx = (0..n_total as u64)
                .map(|j| {
                    let mut rng = substream(cfg.seed, stream, j);
                    let d_t = clock.sample(dt, &mut rng)?;
                    base.sample(d_t, &mut rng)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mut values = Vec::with_capacity(grid.n_steps() + 1);
            if kernel.is_exponential() {
                let mut y = 0.0;
                for (m, d) in dx.iter().enumerate() {
                    if m >= n_burn {
                        values.push(y);
                    }
                    y = decay * (y + d);
                }
                values.push(y);
            } else {
                for i in 0..=grid.n_steps() {
                    let m = n_burn + i;
                    let lo = m.saturating_sub(n_burn);
                    let y: f64 = (lo..m).map(|j| weights[m - j] * dx[j]).sum();
                    values.push(y);
                }
            }
            Ok(LssSample {
                path: PathSample {
                    grid: *grid,
                    values,
                    seed: cfg.seed,
                    stream_id: stream,
                },
                driver: dx[n_burn..].to_vec(),
            })
        })
        .collect()
}

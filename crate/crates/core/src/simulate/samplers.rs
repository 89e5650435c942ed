use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::{SimConfig, SmallJumpMode};
use crate::error::{Error, Result};
use crate::levy::power::positive_stable;
use crate::levy::{LevyMeasure, LevyTriplet, PowerLaw, SubordinatorPair, TruncationConvention};
use crate::mixing::support_bound;
use crate::quadrature::QuadOptions;

/// Upper bound on the expected number of simulated jumps when the
/// truncation level is chosen automatically.
const MAX_JUMPS: f64 = 1e6;
const EPS_FLOOR: f64 = 1e-12;

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    }
}

/// Halves `ε` from 1 until `neglected(ε) < target`, without letting the
/// expected jump count over `horizon` exceed `MAX_JUMPS`.
fn auto_epsilon<N, T>(neglected: N, tail_rate: T, horizon: f64, target: f64) -> Result<f64>
where
    N: Fn(f64) -> Result<f64>,
    T: Fn(f64) -> Result<f64>,
{
    let mut eps = 1.0;
    while eps > EPS_FLOOR {
        if neglected(eps)? < target {
            return Ok(eps);
        }
        let next = eps / 2.0;
        if tail_rate(next)? * horizon.max(1.0) > MAX_JUMPS {
            return Ok(eps);
        }
        eps = next;
    }
    Ok(eps)
}

/// Draws subordinator increments over arbitrary durations.
#[derive(Debug, Clone)]
pub(crate) struct SubordinatorSampler {
    beta0: f64,
    kind: SubKind,
}

#[derive(Debug, Clone)]
enum SubKind {
    Drift,
    Gamma { shape: f64, rate: f64 },
    Stable { alpha: f64, kappa_per_time: f64 },
    Compound { rho: LevyMeasure, eps: f64, tail_rate: f64, compensation: f64 },
}

impl SubordinatorSampler {
    pub(crate) fn new(pair: &SubordinatorPair, cfg: &SimConfig, horizon: f64) -> Result<Self> {
        cfg.validate()?;
        let rho = pair.rho();
        let opts = QuadOptions::default();
        let kind = match (rho, cfg.exact) {
            (LevyMeasure::Zero, _) => SubKind::Drift,
            (LevyMeasure::Gamma { shape, rate }, true) => SubKind::Gamma {
                shape: *shape,
                rate: *rate,
            },
            (LevyMeasure::OneSidedStable { alpha, scale }, true) if *alpha < 1.0 => SubKind::Stable {
                alpha: *alpha,
                kappa_per_time: scale * statrs::function::gamma::gamma(1.0 - alpha) / alpha,
            },
            _ => {
                let sup = support_bound(rho);
                let eps = match cfg.epsilon {
                    Some(e) => {
                        if sup.is_some_and(|s| e >= s) {
                            return Err(Error::ConfigError(format!(
                                "epsilon {e} is not below the largest jump {}",
                                sup.unwrap_or(0.0)
                            )));
                        }
                        e
                    }
                    None => {
                        let cap = sup.map(|s| s / 2.0).unwrap_or(1.0);
                        auto_epsilon(
                            |e| rho.window_moment(1, 0.0, e.min(cap), &opts),
                            |e| rho.tail_mass(e.min(cap), &opts),
                            horizon,
                            1e-6 * horizon.max(f64::MIN_POSITIVE),
                        )?
                        .min(cap)
                    }
                };
                SubKind::Compound {
                    rho: rho.clone(),
                    eps,
                    tail_rate: rho.tail_mass(eps, &opts)?,
                    compensation: rho.window_moment(1, 0.0, eps, &opts)?,
                }
            }
        };
        Ok(SubordinatorSampler {
            beta0: pair.beta0(),
            kind,
        })
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, duration: f64, rng: &mut R) -> Result<f64> {
        if duration <= 0.0 {
            return Ok(0.0);
        }
        let jumps = match &self.kind {
            SubKind::Drift => 0.0,
            SubKind::Gamma { shape, rate } => PowerLaw::Gamma {
                shape: shape * duration,
                rate: *rate,
            }
            .sample(rng),
            SubKind::Stable { alpha, kappa_per_time } => positive_stable(*alpha, kappa_per_time * duration, rng),
            SubKind::Compound {
                rho,
                eps,
                tail_rate,
                compensation,
            } => {
                let n = poisson_count(tail_rate * duration, rng);
                let mut sum = compensation * duration;
                for _ in 0..n {
                    sum += rho.sample_jump_above(*eps, rng)?;
                }
                sum
            }
        };
        Ok(self.beta0 * duration + jumps)
    }
}

/// Draws increments `μ^r` of a Lévy process over arbitrary durations `r`.
#[derive(Debug, Clone)]
pub(crate) enum LevySampler {
    Exact(LevyTriplet),
    Ito {
        drift: f64,
        b: f64,
        nu: LevyMeasure,
        eps: f64,
        tail_rate: f64,
        small_var: f64,
    },
}

impl LevySampler {
    pub(crate) fn new(t: &LevyTriplet, cfg: &SimConfig, horizon: f64) -> Result<Self> {
        cfg.validate()?;
        if cfg.exact && t.family().is_some() {
            return Ok(LevySampler::Exact(t.clone()));
        }
        let std = t.convert(TruncationConvention::Standard)?;
        let nu = std.nu().clone();
        let opts = QuadOptions::default();
        if nu.is_zero() {
            return Ok(LevySampler::Ito {
                drift: std.gamma(),
                b: std.b(),
                nu,
                eps: 1.0,
                tail_rate: 0.0,
                small_var: 0.0,
            });
        }
        let sup = support_bound(&nu);
        let eps = match cfg.epsilon {
            Some(e) => {
                if sup.is_some_and(|s| e >= s) {
                    return Err(Error::ConfigError(format!("epsilon {e} is not below the largest jump")));
                }
                e
            }
            None => {
                let cap = sup.map(|s| s / 2.0).unwrap_or(1.0);
                auto_epsilon(
                    |e| nu.window_moment(2, 0.0, e.min(cap), &opts),
                    |e| nu.tail_mass(e.min(cap), &opts),
                    horizon,
                    1e-6 * horizon.max(f64::MIN_POSITIVE),
                )?
                .min(cap)
            }
        };
        // compensator of jumps in ε < |x| <= 1, mean of uncompensated 1 < |x| <= ε
        let correction = if eps < 1.0 {
            -nu.window_moment(1, eps, 1.0, &opts)?
        } else if eps > 1.0 {
            nu.window_moment(1, 1.0, eps, &opts)?
        } else {
            0.0
        };
        let small_var = match cfg.small_jump_mode {
            SmallJumpMode::DriftOnly => 0.0,
            SmallJumpMode::GaussianSubstitute => nu.window_moment(2, 0.0, eps, &opts)?,
        };
        Ok(LevySampler::Ito {
            drift: std.gamma() + correction,
            b: std.b(),
            tail_rate: nu.tail_mass(eps, &opts)?,
            nu,
            eps,
            small_var,
        })
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, duration: f64, rng: &mut R) -> Result<f64> {
        if duration <= 0.0 {
            return Ok(0.0);
        }
        match self {
            LevySampler::Exact(t) => Ok(PowerLaw::of(t, duration)?.sample(rng)),
            LevySampler::Ito {
                drift,
                b,
                nu,
                eps,
                tail_rate,
                small_var,
            } => {
                let mut x = drift * duration;
                let var = (b + small_var) * duration;
                if var > 0.0 {
                    x += Normal::new(0.0, var.sqrt()).expect("finite variance").sample(rng);
                }
                let n = poisson_count(tail_rate * duration, rng);
                for _ in 0..n {
                    x += nu.sample_jump_above(*eps, rng)?;
                }
                Ok(x)
            }
        }
    }
}

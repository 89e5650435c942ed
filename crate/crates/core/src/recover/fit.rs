use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cf::{default_theta_grid, empirical_cf, unwrap_log_cf, CFSample};
use super::simplex::{minimize, SimplexOptions};
use crate::error::{Error, Result};
use crate::levy::{LevyMeasure, LevyTriplet, SubordinatorPair};
use crate::simulate::PathSample;

/// One sample `(z, ψ̂(z))` of the time change's Laplace exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiPoint {
    pub theta: f64,
    /// `φ_L(θ)`, with `Re z <= 0`.
    pub z: Complex64,
    pub psi_hat: Complex64,
    /// `|cf|` at this point, used for variance weights.
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiCurve {
    pub points: Vec<PsiPoint>,
    pub n_obs: usize,
}

/// Pairs `(φ_L(θ_j), log cf(θ_j))`: samples of `ψ_T` along the curve
/// `{φ_L(θ)}`.
pub fn psi_curve(mu_l: &LevyTriplet, cf: &CFSample) -> Result<PsiCurve> {
    if mu_l.is_zero_law() {
        return Err(Error::DegenerateBaseProcess);
    }
    let h = unwrap_log_cf(cf)?;
    let points = cf
        .theta()
        .iter()
        .zip(h)
        .zip(cf.values())
        .map(|((&theta, psi_hat), v)| {
            let z = mu_l.char_exponent(theta)?;
            Ok(PsiPoint {
                theta,
                z: Complex64::new(z.re.min(0.0), z.im),
                psi_hat,
                modulus: v.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PsiCurve {
        points,
        n_obs: cf.n_obs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubordinatorFamily {
    /// `T_t = β₀ t`.
    PureDrift,
    /// Jump measure `a s^{-1} e^{-λs}`; params `(a, λ)`.
    Gamma,
    /// Jump measure `c s^{-1-α}`; params `(α, c)`, with `α` free in `(0, 1)`
    /// or held fixed.
    OneSidedStable { alpha: Option<f64> },
    /// Compound Poisson with exponential jumps; params `(rate, jump rate)`.
    CompoundExponential,
}

impl SubordinatorFamily {
    fn validate(&self) -> Result<()> {
        if let SubordinatorFamily::OneSidedStable { alpha: Some(a) } = *self {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::invalid(format!("subordinator stable index must lie in (0,1), got {a}")));
            }
        }
        Ok(())
    }

    /// Free coordinates of the search (drift excluded).
    fn dim(&self) -> usize {
        match self {
            SubordinatorFamily::PureDrift => 0,
            SubordinatorFamily::OneSidedStable { alpha: Some(_) } => 1,
            _ => 2,
        }
    }

    /// Unconstrained coordinates to family parameters.
    fn params(&self, u: &[f64]) -> Vec<f64> {
        match *self {
            SubordinatorFamily::PureDrift => Vec::new(),
            SubordinatorFamily::OneSidedStable { alpha: Some(a) } => vec![a, u[0].exp()],
            SubordinatorFamily::OneSidedStable { alpha: None } => vec![1.0 / (1.0 + (-u[0]).exp()), u[1].exp()],
            SubordinatorFamily::Gamma | SubordinatorFamily::CompoundExponential => vec![u[0].exp(), u[1].exp()],
        }
    }

    pub fn measure(&self, params: &[f64]) -> Result<LevyMeasure> {
        match self {
            SubordinatorFamily::PureDrift => Ok(LevyMeasure::Zero),
            SubordinatorFamily::Gamma => LevyMeasure::gamma(params[0], params[1]),
            SubordinatorFamily::OneSidedStable { .. } => {
                if !(params[0] > 0.0 && params[0] < 1.0) {
                    return Err(Error::domain("stable index left (0,1)"));
                }
                LevyMeasure::one_sided_stable(params[0], params[1])
            }
            SubordinatorFamily::CompoundExponential => LevyMeasure::compound_exponential(params[0], params[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub seed: u64,
    pub n_starts: usize,
    /// Objective evaluations allowed per start.
    pub max_evals: usize,
    /// Weight residuals by the inverse asymptotic variance of the empirical
    /// log-CF.
    pub weighted: bool,
    /// Fit a drift `β₀ >= 0` alongside the jump part. Off by default: with
    /// noisy curves the drift trades off against the jump parameters.
    pub with_drift: bool,
    /// Observation spacing: the curve is matched to `spacing · ψ_T`.
    pub spacing: f64,
    /// θ grid used when the CF is built from data.
    pub theta: Vec<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            seed: 0,
            n_starts: 8,
            max_evals: 20_000,
            weighted: false,
            with_drift: false,
            spacing: 1.0,
            theta: default_theta_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: SubordinatorFamily,
    pub params: Vec<f64>,
    pub beta0_hat: f64,
    /// Weighted sum of squared residuals at the returned parameters.
    pub objective: f64,
    pub n_starts_converged: usize,
    pub residual_max: f64,
    pub theta: Vec<f64>,
    pub residuals: Vec<Complex64>,
}

impl FitResult {
    /// The fitted pair per unit time.
    pub fn pair(&self) -> Result<SubordinatorPair> {
        SubordinatorPair::new(self.beta0_hat, self.family.measure(&self.params)?)
    }
}

const FTOL: f64 = 1e-10;

struct Problem<'a> {
    points: &'a [PsiPoint],
    weights: Vec<f64>,
    spacing: f64,
    with_drift: bool,
}

impl Problem<'_> {
    /// Jump-part residuals `h - Δ ∫(e^{zs}-1)ρ(ds)`.
    fn jump_residuals(&self, rho: &LevyMeasure) -> Result<Vec<Complex64>> {
        self.points
            .iter()
            .map(|p| Ok(p.psi_hat - rho.cumulant(p.z, false)? * self.spacing))
            .collect()
    }

    /// Best `β₀ >= 0` for given jump residuals, and the final residuals.
    fn profile_drift(&self, r: Vec<Complex64>) -> (f64, Vec<Complex64>) {
        if !self.with_drift {
            return (0.0, r);
        }
        let (mut num, mut den) = (0.0, 0.0);
        for ((p, w), rj) in self.points.iter().zip(&self.weights).zip(&r) {
            let dz = p.z * self.spacing;
            num += w * (dz.conj() * rj).re;
            den += w * dz.norm_sqr();
        }
        let beta0 = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
        let res = self
            .points
            .iter()
            .zip(r)
            .map(|(p, rj)| rj - p.z * (self.spacing * beta0))
            .collect();
        (beta0, res)
    }

    fn objective(&self, res: &[Complex64]) -> f64 {
        res.iter().zip(&self.weights).map(|(r, w)| w * r.norm_sqr()).sum()
    }

    fn evaluate(&self, rho: &LevyMeasure) -> Result<(f64, Vec<Complex64>, f64)> {
        let (beta0, res) = self.profile_drift(self.jump_residuals(rho)?);
        let obj = self.objective(&res);
        Ok((beta0, res, obj))
    }
}

/// Least-squares fit of a parametric subordinator to a `ψ̂` curve.
///
/// The drift enters linearly and is solved exactly for each jump-parameter
/// candidate; the jump parameters are searched by a multi-start simplex in
/// log (or logistic, for a free stable index) coordinates.
pub fn fit_subordinator(curve: &PsiCurve, family: SubordinatorFamily, options: &FitOptions) -> Result<FitResult> {
    family.validate()?;
    if !(options.spacing.is_finite() && options.spacing > 0.0) {
        return Err(Error::invalid("spacing must be finite and > 0"));
    }
    if options.n_starts == 0 || options.max_evals == 0 {
        return Err(Error::ConfigError("need at least one start and one evaluation".into()));
    }
    let with_drift = options.with_drift || family == SubordinatorFamily::PureDrift;
    let n_params = family.dim() + usize::from(with_drift);
    let need = 3 * n_params.max(1);
    if curve.points.len() < need {
        return Err(Error::InsufficientPoints {
            have: curve.points.len(),
            need,
        });
    }
    let weights = curve
        .points
        .iter()
        .map(|p| {
            if options.weighted && curve.n_obs > 0 {
                let m2 = p.modulus * p.modulus;
                m2 / (1.0 - m2).max(1e-8)
            } else {
                1.0
            }
        })
        .collect();
    let problem = Problem {
        points: &curve.points,
        weights,
        spacing: options.spacing,
        with_drift,
    };
    let finish = |params: Vec<f64>, n_conv: usize| -> Result<FitResult> {
        let (beta0_hat, residuals, objective) = problem.evaluate(&family.measure(&params)?)?;
        Ok(FitResult {
            family,
            params,
            beta0_hat,
            objective,
            n_starts_converged: n_conv,
            residual_max: residuals.iter().map(|r| r.norm()).fold(0.0, f64::max),
            theta: curve.points.iter().map(|p| p.theta).collect(),
            residuals,
        })
    };
    if family == SubordinatorFamily::PureDrift {
        return finish(Vec::new(), 1);
    }

    let dim = family.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let starts: Vec<Vec<f64>> = (0..options.n_starts)
        .map(|k| {
            (0..dim)
                .map(|_| if k == 0 { 0.0 } else { rng.random_range(-2.5..2.5) })
                .collect()
        })
        .collect();
    let cost = |u: &[f64]| -> f64 {
        family
            .measure(&family.params(u))
            .and_then(|rho| problem.evaluate(&rho))
            .map(|(_, _, obj)| obj)
            .unwrap_or(f64::INFINITY)
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|u0| {
            let mut opts = SimplexOptions {
                max_evals: options.max_evals,
                ftol: FTOL,
                xtol: 1e-12,
                step: 0.5,
            };
            let mut run = minimize(cost, u0, &opts);
            let mut used = run.evals;
            // restart from the optimum to escape a collapsed simplex
            while run.converged && used < options.max_evals {
                opts.max_evals = options.max_evals - used;
                opts.step = 0.05;
                let again = minimize(cost, &run.x, &opts);
                used += again.evals;
                let improved = again.f < run.f * (1.0 - 1e-9);
                let conv = again.converged;
                if again.f <= run.f {
                    run = again;
                }
                run.converged = conv;
                if !improved {
                    break;
                }
            }
            run
        })
        .collect();
    let n_conv = runs.iter().filter(|r| r.converged).count();
    let best = runs
        .iter()
        .filter(|r| r.converged)
        .fold(None::<&super::simplex::SimplexResult>, |acc, r| match acc {
            Some(a) if a.f <= r.f => Some(a),
            _ => Some(r),
        });
    match best {
        Some(r) => finish(family.params(&r.x), n_conv),
        None => Err(Error::NonConvergence {
            best_objective: runs.iter().map(|r| r.f).fold(f64::INFINITY, f64::min),
        }),
    }
}

/// Fits `family` to increments observed at spacing `spacing`.
pub fn recover_from_increments(
    increments: &[f64],
    spacing: f64,
    mu_l: &LevyTriplet,
    family: SubordinatorFamily,
    options: &FitOptions,
) -> Result<FitResult> {
    let cf = empirical_cf(increments, &options.theta)?;
    let cf = cf.trimmed(cf.threshold());
    let curve = psi_curve(mu_l, &cf)?;
    fit_subordinator(
        &curve,
        family,
        &FitOptions {
            spacing,
            ..options.clone()
        },
    )
}

/// Increments → empirical CF → `ψ̂` curve → fit, at the path's grid spacing.
pub fn recover_from_path(
    path: &PathSample,
    mu_l: &LevyTriplet,
    family: SubordinatorFamily,
    options: &FitOptions,
) -> Result<FitResult> {
    recover_from_increments(&path.increments(), path.grid.dt(), mu_l, family, options)
}

//! Convolution powers `μ^s` of tagged infinitely divisible laws.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Normal, Poisson, StandardNormal};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::levy::measure::LevyMeasure;
use crate::levy::triplet::{LawFamily, LevyTriplet};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{
    erfc, gamma_interval, normal_cdf, normal_interval, normal_pdf, poisson_pmf, poisson_upper_index, reg_gamma_lower,
    reg_gamma_upper,
};

/// The law `μ^s` for one fixed `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerLaw {
    Point(f64),
    Normal { mean: f64, variance: f64 },
    Gamma { shape: f64, rate: f64 },
    /// `jump · N` with `N ~ Poisson(mean)`.
    ScaledPoisson { mean: f64, jump: f64 },
    /// Symmetric stable with `E e^{iθX} = exp(-σ^α |θ|^α)`.
    SymmetricStable { alpha: f64, sigma: f64 },
    /// Positive stable with `E e^{-uX} = exp(-κ u^α)`, `α ∈ (0,1)`.
    PositiveStable { alpha: f64, kappa: f64 },
}

/// `∫_0^∞ (1 - cos u) u^{-α-1} du`, written without negative gamma arguments.
pub(crate) fn symmetric_stable_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-15 {
        PI / 2.0
    } else if alpha < 1.0 {
        gamma(1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
    } else {
        gamma(2.0 - alpha) / (1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
    }
}

impl PowerLaw {
    /// `μ^s` for a triplet with a family tag.
    pub fn of(mu: &LevyTriplet, s: f64) -> Result<PowerLaw> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::invalid(format!("convolution power must be finite and >= 0, got {s}")));
        }
        let family = mu
            .family()
            .ok_or_else(|| Error::unsupported("convolution powers need a tagged family"))?;
        if s == 0.0 {
            return Ok(PowerLaw::Point(0.0));
        }
        let law = match (family, mu.nu()) {
            (LawFamily::Delta, _) => PowerLaw::Point(mu.gamma() * s),
            (LawFamily::Gaussian, _) => PowerLaw::Normal {
                mean: mu.gamma() * s,
                variance: mu.b() * s,
            },
            (LawFamily::GammaLaw, LevyMeasure::Gamma { shape, rate }) => PowerLaw::Gamma {
                shape: shape * s,
                rate: *rate,
            },
            (LawFamily::Poisson, LevyMeasure::FiniteAtomic(atoms)) => PowerLaw::ScaledPoisson {
                mean: atoms[0].mass * s,
                jump: atoms[0].position,
            },
            (LawFamily::SymmetricStableLaw, LevyMeasure::SymmetricStable { alpha, scale }) => {
                let k = 2.0 * scale * symmetric_stable_constant(*alpha) * s;
                PowerLaw::SymmetricStable {
                    alpha: *alpha,
                    sigma: k.powf(1.0 / alpha),
                }
            }
            (LawFamily::OneSidedStableLaw, LevyMeasure::OneSidedStable { alpha, scale }) => PowerLaw::PositiveStable {
                alpha: *alpha,
                kappa: s * scale * gamma(1.0 - alpha) / alpha,
            },
            _ => return Err(Error::unsupported("family tag does not match the Lévy measure")),
        };
        Ok(law)
    }

    /// `P(lo < X <= hi, X != 0)`.
    pub fn mass(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(hi > lo) {
            return Ok(0.0);
        }
        let v = match *self {
            PowerLaw::Point(x) => {
                if x != 0.0 && x > lo && x <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            PowerLaw::Normal { mean, variance } => {
                if variance == 0.0 {
                    return PowerLaw::Point(mean).mass(lo, hi);
                }
                let sd = variance.sqrt();
                normal_interval((lo - mean) / sd, (hi - mean) / sd)
            }
            PowerLaw::Gamma { shape, rate } => gamma_interval(shape, rate * lo, rate * hi),
            PowerLaw::ScaledPoisson { mean, jump } => {
                let (a, b) = if jump > 0.0 { (lo / jump, hi / jump) } else { (hi / jump, lo / jump) };
                // integer k >= 1 with a < k <= b (or a <= k < b for negative jumps)
                let upper = poisson_upper_index(mean) as f64;
                let mut total = 0.0;
                let k0 = (a.max(0.0).floor() as u64).max(1);
                let mut k = k0;
                while (k as f64) <= b.min(upper) {
                    let kf = k as f64;
                    let inside = if jump > 0.0 { kf > a && kf <= b } else { kf >= a && kf < b };
                    if inside {
                        total += poisson_pmf(k, mean);
                    }
                    k += 1;
                }
                total
            }
            PowerLaw::SymmetricStable { alpha, sigma } => {
                if (alpha - 1.0).abs() < 1e-15 {
                    cauchy_interval(sigma, lo, hi)
                } else {
                    return Err(Error::unsupported(format!(
                        "interval probabilities of symmetric stable laws are only available for index 1, got {alpha}"
                    )));
                }
            }
            PowerLaw::PositiveStable { alpha, kappa } => {
                if (alpha - 0.5).abs() < 1e-15 {
                    levy_interval(kappa * kappa / 2.0, lo, hi)
                } else {
                    return Err(Error::unsupported(format!(
                        "interval probabilities of positive stable laws are only available for index 1/2, got {alpha}"
                    )));
                }
            }
        };
        Ok(v)
    }

    /// `E[X; 0 < |X| <= 1]`.
    pub fn truncated_mean(&self) -> Result<f64> {
        let v = match *self {
            PowerLaw::Point(x) => {
                if x.abs() <= 1.0 {
                    x
                } else {
                    0.0
                }
            }
            PowerLaw::Normal { mean, variance } => {
                if variance == 0.0 {
                    return PowerLaw::Point(mean).truncated_mean();
                }
                if mean == 0.0 {
                    return Ok(0.0);
                }
                let sd = variance.sqrt();
                let a = (-1.0 - mean) / sd;
                let b = (1.0 - mean) / sd;
                mean * normal_interval(a, b) + sd * (normal_pdf(a) - normal_pdf(b))
            }
            PowerLaw::Gamma { shape, rate } => shape / rate * reg_gamma_lower(shape + 1.0, rate),
            PowerLaw::ScaledPoisson { mean, jump } => {
                let kmax = (1.0 / jump.abs()).floor() as u64;
                (1..=kmax.min(poisson_upper_index(mean)))
                    .map(|k| k as f64 * jump * poisson_pmf(k, mean))
                    .sum()
            }
            PowerLaw::SymmetricStable { .. } => 0.0,
            PowerLaw::PositiveStable { alpha, kappa } => {
                if (alpha - 0.5).abs() < 1e-15 {
                    let sigma = kappa * kappa / 2.0;
                    levy_density_integral(sigma, |x| x)?
                } else {
                    return Err(Error::unsupported("truncated mean of a positive stable law needs index 1/2"));
                }
            }
        };
        Ok(v)
    }

    /// `E[1 ∧ X²]`.
    pub fn one_wedge_sq(&self) -> Result<f64> {
        let v = match *self {
            PowerLaw::Point(x) => (x * x).min(1.0),
            PowerLaw::Normal { mean, variance } => {
                if variance == 0.0 {
                    return PowerLaw::Point(mean).one_wedge_sq();
                }
                let sd = variance.sqrt();
                let a = (-1.0 - mean) / sd;
                let b = (1.0 - mean) / sd;
                let inner = (mean * mean + variance) * normal_interval(a, b)
                    + 2.0 * mean * sd * (normal_pdf(a) - normal_pdf(b))
                    + variance * (a * normal_pdf(a) - b * normal_pdf(b));
                let outer = normal_cdf(a) + normal_interval(b, f64::INFINITY);
                inner + outer
            }
            PowerLaw::Gamma { shape, rate } => {
                shape * (shape + 1.0) / (rate * rate) * reg_gamma_lower(shape + 2.0, rate)
                    + reg_gamma_upper(shape, rate)
            }
            PowerLaw::ScaledPoisson { mean, jump } => {
                let kmax = poisson_upper_index(mean);
                let mut total = 0.0;
                for k in 1..=kmax {
                    let x = k as f64 * jump;
                    total += (x * x).min(1.0) * poisson_pmf(k, mean);
                }
                total
            }
            PowerLaw::SymmetricStable { alpha, sigma } => {
                if (alpha - 1.0).abs() < 1e-15 {
                    let g = sigma;
                    let at = (1.0 / g).atan();
                    2.0 * g / PI * (1.0 - g * at) + 1.0 - 2.0 / PI * at
                } else {
                    return Err(Error::unsupported("E[1∧X²] of a symmetric stable law needs index 1"));
                }
            }
            PowerLaw::PositiveStable { alpha, kappa } => {
                if (alpha - 0.5).abs() < 1e-15 {
                    let sigma = kappa * kappa / 2.0;
                    levy_density_integral(sigma, |x| x * x)? + levy_interval(sigma, 1.0, f64::INFINITY)
                } else {
                    return Err(Error::unsupported("E[1∧X²] of a positive stable law needs index 1/2"));
                }
            }
        };
        Ok(v)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PowerLaw::Point(x) => x,
            PowerLaw::Normal { mean, variance } => {
                if variance == 0.0 {
                    mean
                } else {
                    Normal::new(mean, variance.sqrt()).expect("finite normal").sample(rng)
                }
            }
            PowerLaw::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate).expect("positive gamma").sample(rng),
            PowerLaw::ScaledPoisson { mean, jump } => {
                if mean <= 0.0 {
                    0.0
                } else {
                    let n: f64 = Poisson::new(mean).expect("positive mean").sample(rng);
                    n * jump
                }
            }
            PowerLaw::SymmetricStable { alpha, sigma } => sigma * standard_symmetric_stable(alpha, rng),
            PowerLaw::PositiveStable { alpha, kappa } => positive_stable(alpha, kappa, rng),
        }
    }
}

fn cauchy_interval(scale: f64, lo: f64, hi: f64) -> f64 {
    let f = |x: f64| {
        if x == f64::INFINITY {
            0.5
        } else if x == f64::NEG_INFINITY {
            -0.5
        } else {
            (x / scale).atan() / PI
        }
    };
    f(hi) - f(lo)
}

/// Lévy distribution with `E e^{-uX} = exp(-√(2σu))`: `P(X <= x) = erfc(√(σ/2x))`.
fn levy_cdf(sigma: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        erfc((sigma / (2.0 * x)).sqrt())
    }
}

fn levy_interval(sigma: f64, lo: f64, hi: f64) -> f64 {
    (levy_cdf(sigma, hi) - levy_cdf(sigma, lo)).max(0.0)
}

/// `∫_0^1 g(x) f_σ(x) dx` for the Lévy density.
fn levy_density_integral<G: Fn(f64) -> f64>(sigma: f64, g: G) -> Result<f64> {
    let density = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (sigma / (2.0 * PI)).sqrt() * x.powf(-1.5) * (-sigma / (2.0 * x)).exp()
        }
    };
    Ok(integrate(|x| g(x) * density(x), 0.0, 1.0, &QuadOptions::default())?.value)
}

/// Chambers–Mallows–Stuck draw with `E e^{iθX} = exp(-|θ|^α)`.
pub(crate) fn standard_symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    if (alpha - 1.0).abs() < 1e-15 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Kanter's representation of the positive stable law `E e^{-uX} = exp(-κu^α)`.
pub(crate) fn positive_stable<R: Rng + ?Sized>(alpha: f64, kappa: f64, rng: &mut R) -> f64 {
    if (alpha - 0.5).abs() < 1e-15 {
        let z: f64 = StandardNormal.sample(rng);
        return kappa * kappa / 2.0 / (z * z);
    }
    let u = loop {
        let u = PI * rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let w: f64 = Exp1.sample(rng);
    let a = (alpha * u).sin().powf(alpha / (1.0 - alpha)) * ((1.0 - alpha) * u).sin() / u.sin().powf(1.0 / (1.0 - alpha));
    kappa.powf(1.0 / alpha) * (a / w).powf((1.0 - alpha) / alpha)
}

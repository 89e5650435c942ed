use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::levy::measure::{ExtendedReal, LevyMeasure, MeasureClass, Support};
use crate::quadrature::QuadOptions;

/// Truncation function used in the Lévy–Khintchine exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruncationConvention {
    /// `τ(x) = x 1_{|x| <= 1}`.
    Standard,
    /// `τ₀(x) = 0`; only for measures with `∫(1∧|x|) dν < ∞`.
    Zero,
}

/// Parametric laws whose convolution powers `μ^s` are available in closed
/// form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawFamily {
    Gaussian,
    GammaLaw,
    Poisson,
    SymmetricStableLaw,
    OneSidedStableLaw,
    Delta,
}

/// Characteristic triplet `(γ, b, ν)` of an infinitely divisible law on ℝ.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriplet {
    gamma: f64,
    b: f64,
    nu: LevyMeasure,
    convention: TruncationConvention,
    family: Option<LawFamily>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

impl LevyTriplet {
    pub fn new(gamma: f64, b: f64, nu: LevyMeasure, convention: TruncationConvention) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid("drift must be finite"));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::invalid(format!("Gaussian variance must be finite and >= 0, got {b}")));
        }
        nu.validate()?;
        if convention == TruncationConvention::Zero && !nu.integral_one_wedge(1)?.is_finite() {
            return Err(Error::NotFiniteVariation);
        }
        let mut t = LevyTriplet {
            gamma,
            b,
            nu,
            convention,
            family: None,
        };
        t.family = t.infer_family();
        Ok(t)
    }

    /// `N(mean, variance)`; `variance = 0` gives the point mass at `mean`.
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        Self::new(mean, variance, LevyMeasure::Zero, TruncationConvention::Standard)
    }

    pub fn delta(position: f64) -> Result<Self> {
        Self::gaussian(position, 0.0)
    }

    /// Gamma law with the given shape and rate (`shape = 1` is exponential).
    pub fn gamma_law(shape: f64, rate: f64) -> Result<Self> {
        let nu = LevyMeasure::gamma(shape, rate)?;
        Self::new(0.0, 0.0, nu, TruncationConvention::Zero)?.convert(TruncationConvention::Standard)
    }

    /// `jump · Poisson(rate)`.
    pub fn poisson(rate: f64, jump: f64) -> Result<Self> {
        let nu = LevyMeasure::atom(jump, rate)?;
        Self::new(0.0, 0.0, nu, TruncationConvention::Zero)?.convert(TruncationConvention::Standard)
    }

    /// Symmetric strictly stable law with Lévy density `c |x|^{-α-1}`.
    pub fn symmetric_stable_law(alpha: f64, scale: f64) -> Result<Self> {
        let nu = LevyMeasure::symmetric_stable(alpha, scale)?;
        Self::new(0.0, 0.0, nu, TruncationConvention::Standard)
    }

    /// Strictly stable law on `(0, ∞)`, Lévy density `c x^{-α-1}`, `α ∈ (0,1)`.
    pub fn one_sided_stable_law(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("a one-sided stable law needs index in (0,1)"));
        }
        let nu = LevyMeasure::one_sided_stable(alpha, scale)?;
        Self::new(0.0, 0.0, nu, TruncationConvention::Zero)?.convert(TruncationConvention::Standard)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn nu(&self) -> &LevyMeasure {
        &self.nu
    }

    pub fn convention(&self) -> TruncationConvention {
        self.convention
    }

    pub fn family(&self) -> Option<LawFamily> {
        self.family
    }

    /// `β₀ = γ - ∫_{|x|<=1} x ν(dx)` (the drift under the zero truncation).
    pub fn drift0(&self) -> Result<f64> {
        match self.convention {
            TruncationConvention::Zero => Ok(self.gamma),
            TruncationConvention::Standard => Ok(self.gamma - self.nu.truncated_mean()?),
        }
    }

    /// Drift under the standard truncation.
    pub fn standard_drift(&self) -> Result<f64> {
        match self.convention {
            TruncationConvention::Standard => Ok(self.gamma),
            TruncationConvention::Zero => Ok(self.gamma + self.nu.truncated_mean()?),
        }
    }

    /// True for the point mass at zero.
    pub fn is_zero_law(&self) -> bool {
        self.gamma == 0.0 && self.b == 0.0 && self.nu.is_zero()
    }

    /// True when the law is a point mass.
    pub fn is_degenerate(&self) -> bool {
        self.b == 0.0 && self.nu.is_zero()
    }

    /// Symmetric about the origin: zero standard drift and symmetric `ν`.
    pub fn is_symmetric(&self) -> bool {
        self.nu.is_symmetric() && self.standard_drift().map(|g| g == 0.0).unwrap_or(false)
    }

    fn infer_family(&self) -> Option<LawFamily> {
        if self.nu.is_zero() {
            return Some(if self.b == 0.0 {
                LawFamily::Delta
            } else {
                LawFamily::Gaussian
            });
        }
        if self.b != 0.0 {
            return None;
        }
        match &self.nu {
            LevyMeasure::SymmetricStable { .. } => {
                (self.convention == TruncationConvention::Standard && self.gamma == 0.0)
                    .then_some(LawFamily::SymmetricStableLaw)
            }
            LevyMeasure::Gamma { .. } => {
                close(self.drift0().ok()?, 0.0).then_some(LawFamily::GammaLaw)
            }
            LevyMeasure::OneSidedStable { alpha, .. } if *alpha < 1.0 => {
                close(self.drift0().ok()?, 0.0).then_some(LawFamily::OneSidedStableLaw)
            }
            LevyMeasure::FiniteAtomic(atoms) if atoms.len() == 1 => {
                close(self.drift0().ok()?, 0.0).then_some(LawFamily::Poisson)
            }
            _ => None,
        }
    }

    /// Same law expressed under another truncation convention.
    pub fn convert(&self, target: TruncationConvention) -> Result<Self> {
        if target == self.convention {
            return Ok(self.clone());
        }
        let m = self.nu.truncated_mean()?;
        let gamma = match target {
            TruncationConvention::Zero => self.gamma - m,
            TruncationConvention::Standard => self.gamma + m,
        };
        Ok(LevyTriplet {
            gamma,
            b: self.b,
            nu: self.nu.clone(),
            convention: target,
            family: self.family,
        })
    }

    /// `log μ̂(θ) = iθγ - bθ²/2 + ∫(e^{iθx} - 1 - iτ(x)θ) ν(dx)`.
    pub fn char_exponent(&self, theta: f64) -> Result<Complex64> {
        if theta == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let z = Complex64::new(0.0, theta);
        let jumps = self.nu.cumulant(z, self.convention == TruncationConvention::Standard)?;
        Ok(Complex64::new(-0.5 * self.b * theta * theta, self.gamma * theta) + jumps)
    }
}

/// Convenience: `char_exponent(t, θ)`.
pub fn char_exponent(t: &LevyTriplet, theta: f64) -> Result<Complex64> {
    t.char_exponent(theta)
}

pub fn truncated_mean(nu: &LevyMeasure) -> Result<f64> {
    nu.truncated_mean()
}

pub fn convert_convention(t: &LevyTriplet, target: TruncationConvention) -> Result<LevyTriplet> {
    t.convert(target)
}

pub fn classify_measure(m: &LevyMeasure) -> Result<MeasureClass> {
    m.classify()
}

pub fn integral_one_wedge(m: &LevyMeasure, power: u32) -> Result<ExtendedReal> {
    m.integral_one_wedge(power)
}

/// Drift-plus-Lévy-measure pair `(β₀, ρ)₀` of a subordinator law.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPair {
    beta0: f64,
    rho: LevyMeasure,
}

impl SubordinatorPair {
    pub fn new(beta0: f64, rho: LevyMeasure) -> Result<Self> {
        if !(beta0.is_finite() && beta0 >= 0.0) {
            return Err(Error::invalid(format!("subordinator drift must be finite and >= 0, got {beta0}")));
        }
        rho.validate()?;
        if !matches!(rho.support(), Support::Positive | Support::Empty) {
            return Err(Error::invalid("subordinator Lévy measure must live on (0, ∞)"));
        }
        match rho.classify()? {
            MeasureClass::FiniteMass | MeasureClass::FiniteVariation => {}
            _ => return Err(Error::invalid("subordinator Lévy measure needs ∫(1∧s) ρ(ds) < ∞")),
        }
        Ok(SubordinatorPair { beta0, rho })
    }

    pub fn drift(beta0: f64) -> Result<Self> {
        Self::new(beta0, LevyMeasure::Zero)
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn rho(&self) -> &LevyMeasure {
        &self.rho
    }

    /// True for the point mass at zero (no drift, no jumps).
    pub fn is_zero(&self) -> bool {
        self.beta0 == 0.0 && self.rho.is_zero()
    }

    /// Convolution of the two subordinator laws: drifts and measures add.
    pub fn plus(&self, other: &SubordinatorPair) -> SubordinatorPair {
        SubordinatorPair {
            beta0: self.beta0 + other.beta0,
            rho: self.rho.plus(&other.rho),
        }
    }

    /// Pair of the law at time `t`: drift and measure scaled by `t >= 0`.
    pub fn scaled(&self, t: f64) -> Result<SubordinatorPair> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("scale factor must be finite and >= 0"));
        }
        if t == 0.0 {
            return Ok(SubordinatorPair {
                beta0: 0.0,
                rho: LevyMeasure::Zero,
            });
        }
        Ok(SubordinatorPair {
            beta0: self.beta0 * t,
            rho: scale_measure(&self.rho, t),
        })
    }

    /// `ψ(z) = β₀ z + ∫₀^∞ (e^{zs} - 1) ρ(ds)` for `Re z <= 0`.
    pub fn laplace_exponent(&self, z: Complex64) -> Result<Complex64> {
        if z.re > 0.0 {
            return Err(Error::domain(format!("Laplace exponent needs Re z <= 0, got {z}")));
        }
        Ok(z * self.beta0 + self.rho.cumulant(z, false)?)
    }

    /// `E T₁ = β₀ + ∫ s ρ(ds)` (may be infinite).
    pub fn mean(&self) -> Result<f64> {
        match self.rho.window_moment(1, 0.0, f64::INFINITY, &QuadOptions::default()) {
            Ok(m) => Ok(self.beta0 + m),
            Err(Error::DomainError(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// The law as a triplet under the zero truncation.
    pub fn to_triplet(&self) -> Result<LevyTriplet> {
        LevyTriplet::new(self.beta0, 0.0, self.rho.clone(), TruncationConvention::Zero)
    }
}

/// `t · ν` for the closed family (`t > 0`).
pub(crate) fn scale_measure(nu: &LevyMeasure, t: f64) -> LevyMeasure {
    use crate::levy::measure::JumpLaw;
    match nu {
        LevyMeasure::Zero => LevyMeasure::Zero,
        LevyMeasure::Gamma { shape, rate } => LevyMeasure::Gamma {
            shape: shape * t,
            rate: *rate,
        },
        LevyMeasure::OneSidedStable { alpha, scale } => LevyMeasure::OneSidedStable {
            alpha: *alpha,
            scale: scale * t,
        },
        LevyMeasure::SymmetricStable { alpha, scale } => LevyMeasure::SymmetricStable {
            alpha: *alpha,
            scale: scale * t,
        },
        LevyMeasure::FiniteAtomic(atoms) => LevyMeasure::FiniteAtomic(
            atoms
                .iter()
                .map(|a| crate::levy::measure::Atom {
                    position: a.position,
                    mass: a.mass * t,
                })
                .collect(),
        ),
        LevyMeasure::FiniteParametric { rate, jumps } => LevyMeasure::FiniteParametric {
            rate: rate * t,
            jumps: match jumps {
                JumpLaw::Exponential { rate } => JumpLaw::Exponential { rate: *rate },
                JumpLaw::Normal { mean, std_dev } => JumpLaw::Normal {
                    mean: *mean,
                    std_dev: *std_dev,
                },
            },
        },
        LevyMeasure::Tabulated(tab) => LevyMeasure::tabulated(
            tab.abscissae().to_vec(),
            tab.values().iter().map(|d| d * t).collect(),
        )
        .expect("scaling keeps a valid table"),
        LevyMeasure::Sum(parts) => LevyMeasure::Sum(parts.iter().map(|p| scale_measure(p, t)).collect()),
    }
}

pub fn laplace_exponent(p: &SubordinatorPair, z: Complex64) -> Result<Complex64> {
    p.laplace_exponent(z)
}

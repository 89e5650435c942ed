use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log, Integral, Integrand, QuadOptions};
use crate::special::{exp_integral_e1, normal_cdf, normal_pdf};

/// A real number or `+∞`, used where divergence must be reported exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    fn add(self, other: ExtendedReal) -> ExtendedReal {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

/// Lévy measure classes, smallest applicable label wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureClass {
    /// Finite total mass.
    FiniteMass,
    /// `∫(1∧|x|) < ∞`.
    FiniteVariation,
    /// `∫(1∧x²) < ∞`.
    Levy,
    NotLevy,
}

/// Which side(s) of the origin carry mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Empty,
    Positive,
    Negative,
    Both,
}

impl Support {
    fn merge(self, other: Support) -> Support {
        use Support::*;
        match (self, other) {
            (Empty, s) | (s, Empty) => s,
            (Positive, Positive) => Positive,
            (Negative, Negative) => Negative,
            _ => Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

/// Jump-size law of a compound Poisson measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpLaw {
    /// Positive jumps with density `η e^{-η x}`.
    Exponential { rate: f64 },
    Normal { mean: f64, std_dev: f64 },
}

/// A density tabulated on a strictly increasing grid that stays on one side
/// of the origin. Linear interpolation between nodes, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    x: Vec<f64>,
    density: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(x: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != density.len() {
            return Err(Error::invalid("tabulated density needs at least two nodes and matching lengths"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("tabulated abscissae must be finite and strictly increasing"));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("tabulated density values must be finite and nonnegative"));
        }
        if x[0] <= 0.0 && x[x.len() - 1] >= 0.0 {
            return Err(Error::invalid("tabulated support must exclude the origin"));
        }
        Ok(TabulatedDensity { x, density })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.density
    }

    fn lower(&self) -> f64 {
        self.x[0]
    }

    fn upper(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn density_at(&self, t: f64) -> f64 {
        if t < self.lower() || t > self.upper() {
            return 0.0;
        }
        let i = self.x.partition_point(|v| *v <= t).clamp(1, self.x.len() - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let (d0, d1) = (self.density[i - 1], self.density[i]);
        d0 + (d1 - d0) * (t - x0) / (x1 - x0)
    }

    /// Trapezoid rule for `∫_{(lo, hi]} f(x) d(x) dx` on the stored grid, with
    /// the window endpoints inserted as extra nodes.
    fn integrate<T: Integrand, F: Fn(f64) -> T>(&self, f: F, lo: f64, hi: f64) -> T {
        let a = lo.max(self.lower());
        let b = hi.min(self.upper());
        if !(b > a) {
            return T::zero();
        }
        let mut nodes = Vec::with_capacity(self.x.len() + 2);
        nodes.push(a);
        nodes.extend(self.x.iter().copied().filter(|v| *v > a && *v < b));
        nodes.push(b);
        let mut acc = T::zero();
        let mut prev = f(nodes[0]) * self.density_at(nodes[0]);
        for w in nodes.windows(2) {
            let next = f(w[1]) * self.density_at(w[1]);
            acc = acc + (prev + next) * (0.5 * (w[1] - w[0]));
            prev = next;
        }
        acc
    }
}

/// Closed family of Lévy measures used throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasure {
    Zero,
    /// Density `a x^{-1} e^{-λx}` on `(0, ∞)`.
    Gamma { shape: f64, rate: f64 },
    /// Density `c x^{-α-1}` on `(0, ∞)`, `α ∈ (0, 2) \ {1}`.
    OneSidedStable { alpha: f64, scale: f64 },
    /// Density `c |x|^{-α-1}` on `ℝ \ {0}`, `α ∈ (0, 2)`.
    SymmetricStable { alpha: f64, scale: f64 },
    FiniteAtomic(Vec<Atom>),
    /// Compound Poisson: total jump rate times a jump law.
    FiniteParametric { rate: f64, jumps: JumpLaw },
    Tabulated(TabulatedDensity),
    /// Sum of measures (convolution of the corresponding laws).
    Sum(Vec<LevyMeasure>),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// `∫_0^∞ (1 - cos u) u^{-α-1} du`.
fn symmetric_stable_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-15 {
        PI / 2.0
    } else {
        gamma_one_minus(alpha) * (PI * alpha / 2.0).cos() / alpha
    }
}

/// `Γ(1 - α)` for `α ∈ (0, 2) \ {1}` without touching negative arguments.
fn gamma_one_minus(alpha: f64) -> f64 {
    if alpha < 1.0 {
        gamma(1.0 - alpha)
    } else {
        gamma(2.0 - alpha) / (1.0 - alpha)
    }
}

/// `Γ(-α)` for `α ∈ (0, 2) \ {1}`.
fn gamma_neg(alpha: f64) -> f64 {
    gamma_one_minus(alpha) / (-alpha)
}

fn power_moment(scale: f64, exponent: f64, lo: f64, hi: f64) -> Result<f64> {
    // ∫_lo^hi scale x^{exponent - 1} dx
    if exponent < 0.0 && lo == 0.0 {
        return Err(Error::NotFiniteVariation);
    }
    if exponent > 0.0 && hi.is_infinite() {
        return Err(Error::domain("power-law moment diverges at infinity"));
    }
    let h = if hi.is_infinite() { 0.0 } else { hi.powf(exponent) };
    let l = if lo == 0.0 { 0.0 } else { lo.powf(exponent) };
    Ok(scale * (h - l) / exponent)
}

fn normal_truncated_mean(mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    // E[J; lo < J <= hi] for J ~ N(mean, sd²)
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let pa = if a.is_infinite() { 0.0 } else { normal_pdf(a) };
    let pb = if b.is_infinite() { 0.0 } else { normal_pdf(b) };
    mean * (normal_cdf(b) - normal_cdf(a)) + sd * (pa - pb)
}

impl LevyMeasure {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        positive("gamma shape", shape)?;
        positive("gamma rate", rate)?;
        Ok(LevyMeasure::Gamma { shape, rate })
    }

    pub fn one_sided_stable(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || (alpha - 1.0).abs() < 1e-12 {
            return Err(Error::invalid(format!("one-sided stable index must lie in (0,2) without 1, got {alpha}")));
        }
        positive("stable scale", scale)?;
        Ok(LevyMeasure::OneSidedStable { alpha, scale })
    }

    pub fn symmetric_stable(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(format!("symmetric stable index must lie in (0,2), got {alpha}")));
        }
        positive("stable scale", scale)?;
        Ok(LevyMeasure::SymmetricStable { alpha, scale })
    }

    pub fn atom(position: f64, mass: f64) -> Result<Self> {
        Self::atomic(vec![(position, mass)])
    }

    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("atomic measure needs at least one atom"));
        }
        let atoms = atoms
            .into_iter()
            .map(|(position, mass)| {
                if !position.is_finite() || position == 0.0 {
                    return Err(Error::invalid(format!("atom position must be finite and nonzero, got {position}")));
                }
                positive("atom mass", mass)?;
                Ok(Atom { position, mass })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevyMeasure::FiniteAtomic(atoms))
    }

    pub fn compound_exponential(rate: f64, jump_rate: f64) -> Result<Self> {
        positive("jump intensity", rate)?;
        positive("exponential jump rate", jump_rate)?;
        Ok(LevyMeasure::FiniteParametric {
            rate,
            jumps: JumpLaw::Exponential { rate: jump_rate },
        })
    }

    pub fn compound_normal(rate: f64, mean: f64, std_dev: f64) -> Result<Self> {
        positive("jump intensity", rate)?;
        positive("normal jump standard deviation", std_dev)?;
        if !mean.is_finite() {
            return Err(Error::invalid("normal jump mean must be finite"));
        }
        Ok(LevyMeasure::FiniteParametric {
            rate,
            jumps: JumpLaw::Normal { mean, std_dev },
        })
    }

    pub fn tabulated(x: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        Ok(LevyMeasure::Tabulated(TabulatedDensity::new(x, density)?))
    }

    /// Sum of two measures; the Lévy measure of the convolution of the laws.
    pub fn plus(&self, other: &LevyMeasure) -> LevyMeasure {
        let mut parts = Vec::new();
        for m in [self, other] {
            match m {
                LevyMeasure::Zero => {}
                LevyMeasure::Sum(v) => parts.extend(v.iter().cloned()),
                m => parts.push(m.clone()),
            }
        }
        match parts.len() {
            0 => LevyMeasure::Zero,
            1 => parts.pop().expect("one part"),
            _ => LevyMeasure::Sum(parts),
        }
    }

    /// Re-checks parameter constraints (useful for values built by hand).
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure::Zero => Ok(()),
            LevyMeasure::Gamma { shape, rate } => Self::gamma(*shape, *rate).map(|_| ()),
            LevyMeasure::OneSidedStable { alpha, scale } => Self::one_sided_stable(*alpha, *scale).map(|_| ()),
            LevyMeasure::SymmetricStable { alpha, scale } => Self::symmetric_stable(*alpha, *scale).map(|_| ()),
            LevyMeasure::FiniteAtomic(atoms) => {
                Self::atomic(atoms.iter().map(|a| (a.position, a.mass)).collect()).map(|_| ())
            }
            LevyMeasure::FiniteParametric { rate, jumps } => match jumps {
                JumpLaw::Exponential { rate: eta } => Self::compound_exponential(*rate, *eta).map(|_| ()),
                JumpLaw::Normal { mean, std_dev } => Self::compound_normal(*rate, *mean, *std_dev).map(|_| ()),
            },
            LevyMeasure::Tabulated(t) => TabulatedDensity::new(t.x.clone(), t.density.clone()).map(|_| ()),
            LevyMeasure::Sum(parts) => parts.iter().try_for_each(|p| p.validate()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LevyMeasure::Zero => true,
            LevyMeasure::Sum(parts) => parts.iter().all(|p| p.is_zero()),
            _ => false,
        }
    }

    pub fn support(&self) -> Support {
        match self {
            LevyMeasure::Zero => Support::Empty,
            LevyMeasure::Gamma { .. } | LevyMeasure::OneSidedStable { .. } => Support::Positive,
            LevyMeasure::SymmetricStable { .. } => Support::Both,
            LevyMeasure::FiniteAtomic(atoms) => atoms.iter().fold(Support::Empty, |s, a| {
                s.merge(if a.position > 0.0 { Support::Positive } else { Support::Negative })
            }),
            LevyMeasure::FiniteParametric { jumps, .. } => match jumps {
                JumpLaw::Exponential { .. } => Support::Positive,
                JumpLaw::Normal { .. } => Support::Both,
            },
            LevyMeasure::Tabulated(t) => {
                if t.lower() > 0.0 {
                    Support::Positive
                } else {
                    Support::Negative
                }
            }
            LevyMeasure::Sum(parts) => parts.iter().fold(Support::Empty, |s, p| s.merge(p.support())),
        }
    }

    /// True when the measure is invariant under `x ↦ -x`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            LevyMeasure::Zero | LevyMeasure::SymmetricStable { .. } => true,
            LevyMeasure::FiniteParametric {
                jumps: JumpLaw::Normal { mean, .. },
                ..
            } => *mean == 0.0,
            LevyMeasure::FiniteAtomic(atoms) => {
                let key = |a: &Atom| (a.position.abs().to_bits(), a.mass.to_bits());
                let mut pos: Vec<_> = atoms.iter().filter(|a| a.position > 0.0).map(key).collect();
                let mut neg: Vec<_> = atoms.iter().filter(|a| a.position < 0.0).map(key).collect();
                pos.sort_unstable();
                neg.sort_unstable();
                pos == neg
            }
            LevyMeasure::Sum(parts) => parts.iter().all(|p| p.is_symmetric()),
            _ => false,
        }
    }

    /// Density at `x ≠ 0` for absolutely continuous families.
    fn density(&self, x: f64) -> f64 {
        match *self {
            LevyMeasure::Gamma { shape, rate } if x > 0.0 => shape * (-rate * x).exp() / x,
            LevyMeasure::OneSidedStable { alpha, scale } if x > 0.0 => scale * x.powf(-alpha - 1.0),
            LevyMeasure::SymmetricStable { alpha, scale } if x != 0.0 => scale * x.abs().powf(-alpha - 1.0),
            LevyMeasure::FiniteParametric { rate, jumps } => match jumps {
                JumpLaw::Exponential { rate: eta } if x > 0.0 => rate * eta * (-eta * x).exp(),
                JumpLaw::Normal { mean, std_dev } => rate * normal_pdf((x - mean) / std_dev) / std_dev,
                _ => 0.0,
            },
            _ => 0.0,
        }
    }

    /// `∫_{(lo, hi] \ {0}} f dν` by adaptive quadrature (log coordinates on
    /// each side of the origin), exact sums for atoms and the trapezoid rule
    /// for tabulated densities.
    pub fn integrate<T, F>(&self, f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<Integral<T>>
    where
        T: Integrand,
        F: Fn(f64) -> T,
    {
        self.integrate_dyn(&f, lo, hi, opts)
    }

    fn integrate_dyn<T: Integrand>(
        &self,
        f: &dyn Fn(f64) -> T,
        lo: f64,
        hi: f64,
        opts: &QuadOptions,
    ) -> Result<Integral<T>> {
        if !(hi > lo) {
            return Ok(Integral::zero());
        }
        match self {
            LevyMeasure::Zero => Ok(Integral::zero()),
            LevyMeasure::FiniteAtomic(atoms) => {
                let value = atoms
                    .iter()
                    .filter(|a| a.position > lo && a.position <= hi)
                    .fold(T::zero(), |acc, a| acc + f(a.position) * a.mass);
                Ok(Integral { value, abs_error: 0.0 })
            }
            LevyMeasure::Tabulated(t) => {
                let value = t.integrate(f, lo, hi);
                if !value.is_finite_value() {
                    return Err(Error::QuadratureFailure {
                        estimate: value.magnitude(),
                        abs_error: f64::INFINITY,
                    });
                }
                Ok(Integral { value, abs_error: 0.0 })
            }
            LevyMeasure::Sum(parts) => parts
                .iter()
                .try_fold(Integral::zero(), |acc, p| Ok(acc.combine(p.integrate_dyn(f, lo, hi, opts)?))),
            _ => {
                let support = self.support();
                let mut total = Integral::zero();
                if hi > 0.0 && matches!(support, Support::Positive | Support::Both) {
                    let a = lo.max(0.0);
                    let g = |x: f64| f(x) * self.density(x);
                    total = total.combine(integrate_log(g, a, hi, opts)?);
                }
                if lo < 0.0 && matches!(support, Support::Negative | Support::Both) {
                    let b = hi.min(0.0);
                    let g = |y: f64| f(-y) * self.density(-y);
                    total = total.combine(integrate_log(g, -b, -lo, opts)?);
                }
                Ok(total)
            }
        }
    }

    /// `ν((lo, hi] \ {0})`; `+∞` when the window reaches an origin of
    /// infinite activity.
    pub fn mass(&self, lo: f64, hi: f64, opts: &QuadOptions) -> Result<f64> {
        if !(hi > lo) {
            return Ok(0.0);
        }
        match self {
            LevyMeasure::Sum(parts) => parts.iter().map(|p| p.mass(lo, hi, opts)).sum(),
            LevyMeasure::FiniteAtomic(atoms) => Ok(atoms
                .iter()
                .filter(|a| a.position > lo && a.position <= hi)
                .map(|a| a.mass)
                .sum()),
            LevyMeasure::Tabulated(_) => Ok(self.integrate(|_| 1.0, lo, hi, opts)?.value),
            _ => {
                if !self.total_mass().is_finite() && self.support_touches(lo, hi) {
                    return Ok(f64::INFINITY);
                }
                let pos = if hi > 0.0 {
                    self.window_moment_signed(0, lo.max(0.0), hi, 1.0, opts)?
                } else {
                    0.0
                };
                let neg = if lo < 0.0 {
                    self.window_moment_signed(0, (-hi).max(0.0), -lo, -1.0, opts)?
                } else {
                    0.0
                };
                Ok(pos + neg)
            }
        }
    }

    fn support_touches(&self, lo: f64, hi: f64) -> bool {
        match self.support() {
            Support::Empty => false,
            Support::Positive => lo <= 0.0 && hi > 0.0,
            Support::Negative => lo < 0.0 && hi >= 0.0,
            Support::Both => lo <= 0.0 && hi >= 0.0,
        }
    }

    /// `∫_{(lo,hi]} x^k ν(dx)` restricted to one side of the origin:
    /// `side = 1` integrates over `x ∈ (lo, hi]`, `side = -1` over
    /// `-x ∈ (lo, hi]`; `0 <= lo < hi <= ∞`.
    fn window_moment_signed(&self, k: i32, lo: f64, hi: f64, side: f64, opts: &QuadOptions) -> Result<f64> {
        if !(hi > lo) {
            return Ok(0.0);
        }
        let kf = k as f64;
        let sign_k = if side < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        match *self {
            LevyMeasure::Zero => Ok(0.0),
            LevyMeasure::Gamma { shape, rate } => {
                if side < 0.0 {
                    return Ok(0.0);
                }
                let e = |x: f64| if x.is_infinite() { 0.0 } else { (-rate * x).exp() };
                match k {
                    0 => {
                        if lo == 0.0 {
                            Ok(f64::INFINITY)
                        } else {
                            let upper = if hi.is_infinite() { 0.0 } else { exp_integral_e1(rate * hi) };
                            Ok(shape * (exp_integral_e1(rate * lo) - upper))
                        }
                    }
                    1 => Ok(shape * (e(lo) - e(hi)) / rate),
                    _ => {
                        let g = |x: f64| if x.is_infinite() { 0.0 } else { e(x) * (1.0 + rate * x) };
                        Ok(shape * (g(lo) - g(hi)) / (rate * rate))
                    }
                }
            }
            LevyMeasure::OneSidedStable { alpha, scale } => {
                if side < 0.0 {
                    return Ok(0.0);
                }
                if k == 0 && lo == 0.0 {
                    return Ok(f64::INFINITY);
                }
                power_moment(scale, kf - alpha, lo, hi)
            }
            LevyMeasure::SymmetricStable { alpha, scale } => {
                if k == 0 && lo == 0.0 {
                    return Ok(f64::INFINITY);
                }
                Ok(sign_k * power_moment(scale, kf - alpha, lo, hi)?)
            }
            LevyMeasure::FiniteAtomic(ref atoms) => Ok(atoms
                .iter()
                .filter(|a| a.position * side > lo && a.position * side <= hi)
                .map(|a| a.mass * a.position.powi(k))
                .sum()),
            LevyMeasure::FiniteParametric {
                rate,
                jumps: JumpLaw::Exponential { rate: eta },
            } => {
                if side < 0.0 {
                    return Ok(0.0);
                }
                let g = |x: f64| -> f64 {
                    if x.is_infinite() {
                        return 0.0;
                    }
                    let e = (-eta * x).exp();
                    match k {
                        0 => e,
                        1 => e * (x + 1.0 / eta),
                        _ => e * (x * x + 2.0 * x / eta + 2.0 / (eta * eta)),
                    }
                };
                Ok(rate * (g(lo) - g(hi)))
            }
            LevyMeasure::FiniteParametric {
                rate,
                jumps: JumpLaw::Normal { mean, std_dev },
            } if k <= 1 => {
                let (a, b) = if side > 0.0 { (lo, hi) } else { (-hi, -lo) };
                if k == 0 {
                    let za = (a - mean) / std_dev;
                    let zb = (b - mean) / std_dev;
                    Ok(rate * crate::special::normal_interval(za, zb))
                } else {
                    Ok(rate * normal_truncated_mean(mean, std_dev, a, b))
                }
            }
            LevyMeasure::Sum(ref parts) => parts
                .iter()
                .map(|p| p.window_moment_signed(k, lo, hi, side, opts))
                .sum(),
            _ => {
                let (a, b) = if side > 0.0 { (lo, hi) } else { (-hi, -lo) };
                Ok(self.integrate(|x: f64| x.powi(k), a, b, opts)?.value)
            }
        }
    }

    /// `∫_{lo < |x| <= hi} x^k ν(dx)` for `k ∈ {0, 1, 2}` and `0 <= lo < hi`.
    ///
    /// Divergence at the origin is reported as `NotFiniteVariation` for odd
    /// moments and as `+∞` for the mass (`k = 0`).
    pub fn window_moment(&self, k: i32, lo: f64, hi: f64, opts: &QuadOptions) -> Result<f64> {
        if !(0..=2).contains(&k) {
            return Err(Error::invalid("window moments are defined for k = 0, 1, 2"));
        }
        if !(lo >= 0.0 && hi > lo) {
            return Ok(0.0);
        }
        if let LevyMeasure::SymmetricStable { alpha, .. } = *self {
            if k == 1 {
                return if lo == 0.0 && alpha >= 1.0 {
                    Err(Error::NotFiniteVariation)
                } else {
                    Ok(0.0)
                };
            }
        }
        if let LevyMeasure::Sum(parts) = self {
            return parts.iter().map(|p| p.window_moment(k, lo, hi, opts)).sum();
        }
        Ok(self.window_moment_signed(k, lo, hi, 1.0, opts)? + self.window_moment_signed(k, lo, hi, -1.0, opts)?)
    }

    /// `ν({|x| > r})` for `r > 0`.
    pub fn tail_mass(&self, r: f64, opts: &QuadOptions) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::invalid("tail threshold must be > 0"));
        }
        self.window_moment(0, r, f64::INFINITY, opts)
    }

    /// `∫_{|x| <= 1} x ν(dx)`; requires finite variation near the origin.
    pub fn truncated_mean(&self) -> Result<f64> {
        let opts = QuadOptions::default();
        match self.integral_one_wedge(1)? {
            ExtendedReal::Infinite => Err(Error::NotFiniteVariation),
            ExtendedReal::Finite(_) => self.window_moment(1, 0.0, 1.0, &opts),
        }
    }

    /// Total mass `ν(ℝ)`, decided analytically per family.
    pub fn total_mass(&self) -> ExtendedReal {
        match self {
            LevyMeasure::Zero => ExtendedReal::Finite(0.0),
            LevyMeasure::Gamma { .. } | LevyMeasure::OneSidedStable { .. } | LevyMeasure::SymmetricStable { .. } => {
                ExtendedReal::Infinite
            }
            LevyMeasure::FiniteAtomic(atoms) => ExtendedReal::Finite(atoms.iter().map(|a| a.mass).sum()),
            LevyMeasure::FiniteParametric { rate, .. } => ExtendedReal::Finite(*rate),
            LevyMeasure::Tabulated(t) => ExtendedReal::Finite(t.integrate(|_| 1.0, f64::NEG_INFINITY, f64::INFINITY)),
            LevyMeasure::Sum(parts) => parts
                .iter()
                .fold(ExtendedReal::Finite(0.0), |acc, p| acc.add(p.total_mass())),
        }
    }

    /// `∫(1 ∧ |x|^power) dν` for `power ∈ {1, 2}`; divergence is decided
    /// analytically from the family parameters.
    pub fn integral_one_wedge(&self, power: u32) -> Result<ExtendedReal> {
        if power != 1 && power != 2 {
            return Err(Error::invalid("power must be 1 or 2"));
        }
        let p = power as f64;
        let opts = QuadOptions::default();
        let v = match self {
            LevyMeasure::Zero => ExtendedReal::Finite(0.0),
            LevyMeasure::OneSidedStable { alpha, scale } | LevyMeasure::SymmetricStable { alpha, scale } => {
                let sides = if matches!(self, LevyMeasure::SymmetricStable { .. }) { 2.0 } else { 1.0 };
                if *alpha >= p {
                    ExtendedReal::Infinite
                } else {
                    ExtendedReal::Finite(sides * scale * (1.0 / (p - alpha) + 1.0 / alpha))
                }
            }
            LevyMeasure::FiniteAtomic(atoms) => {
                ExtendedReal::Finite(atoms.iter().map(|a| a.mass * a.position.abs().powf(p).min(1.0)).sum())
            }
            LevyMeasure::Sum(parts) => {
                let mut acc = ExtendedReal::Finite(0.0);
                for part in parts {
                    acc = acc.add(part.integral_one_wedge(power)?);
                }
                acc
            }
            _ => {
                let r = self.integrate(|x: f64| x.abs().powf(p).min(1.0), f64::NEG_INFINITY, f64::INFINITY, &opts)?;
                ExtendedReal::Finite(r.value)
            }
        };
        Ok(v)
    }

    pub fn classify(&self) -> Result<MeasureClass> {
        if self.total_mass().is_finite() {
            return Ok(MeasureClass::FiniteMass);
        }
        if self.integral_one_wedge(1)?.is_finite() {
            return Ok(MeasureClass::FiniteVariation);
        }
        if self.integral_one_wedge(2)?.is_finite() {
            return Ok(MeasureClass::Levy);
        }
        Ok(MeasureClass::NotLevy)
    }

    /// `∫ (e^{zx} - 1 - z x 1_{|x|<=1}) ν(dx)` when `truncated`, otherwise
    /// `∫ (e^{zx} - 1) ν(dx)`. `z` must keep `Re(z x) <= 0` on the support.
    pub fn cumulant(&self, z: Complex64, truncated: bool) -> Result<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        if z == zero {
            return Ok(zero);
        }
        let trunc = |m1: f64| if truncated { z * m1 } else { zero };
        let v = match *self {
            LevyMeasure::Zero => zero,
            LevyMeasure::Gamma { shape, rate } => {
                if z.re >= rate {
                    return Err(Error::domain("gamma cumulant needs Re z < rate"));
                }
                let m1 = shape * (1.0 - (-rate).exp()) / rate;
                -shape * (Complex64::new(1.0, 0.0) - z / rate).ln() - trunc(m1)
            }
            LevyMeasure::OneSidedStable { alpha, scale } => {
                if z.re > 0.0 {
                    return Err(Error::domain("one-sided stable cumulant needs Re z <= 0"));
                }
                if !truncated && alpha > 1.0 {
                    return Err(Error::NotFiniteVariation);
                }
                let base = scale * gamma_neg(alpha) * (-z).powf(alpha);
                // untruncated: ∫(e^{zx}-1)ν; truncated adds back -z ∫_0^1 x ν
                if truncated {
                    base + z * scale / (alpha - 1.0)
                } else {
                    base
                }
            }
            LevyMeasure::SymmetricStable { alpha, scale } => {
                if z.re != 0.0 {
                    return Err(Error::domain("symmetric stable cumulant is defined on the imaginary axis only"));
                }
                if !truncated && alpha >= 1.0 {
                    return Err(Error::NotFiniteVariation);
                }
                let theta = z.im;
                Complex64::new(-2.0 * scale * symmetric_stable_constant(alpha) * theta.abs().powf(alpha), 0.0)
            }
            LevyMeasure::FiniteAtomic(ref atoms) => atoms.iter().fold(zero, |acc, a| {
                let x = a.position;
                let mut term = (z * x).exp() - 1.0;
                if truncated && x.abs() <= 1.0 {
                    term -= z * x;
                }
                acc + term * a.mass
            }),
            LevyMeasure::FiniteParametric { rate, jumps } => match jumps {
                JumpLaw::Exponential { rate: eta } => {
                    if z.re >= eta {
                        return Err(Error::domain("exponential-jump cumulant needs Re z < jump rate"));
                    }
                    let m1 = rate * (1.0 - (-eta).exp() * (1.0 + eta)) / eta;
                    rate * z / (eta - z) - trunc(m1)
                }
                JumpLaw::Normal { mean, std_dev } => {
                    let m1 = rate * normal_truncated_mean(mean, std_dev, -1.0, 1.0);
                    rate * ((z * mean + z * z * (std_dev * std_dev / 2.0)).exp() - 1.0) - trunc(m1)
                }
            },
            LevyMeasure::Tabulated(ref t) => {
                let f = |x: f64| {
                    let mut term = (z * x).exp() - 1.0;
                    if truncated && x.abs() <= 1.0 {
                        term -= z * x;
                    }
                    term
                };
                // split at ±1 so the truncation kink sits on a node
                let value = t.integrate(f, f64::NEG_INFINITY, -1.0)
                    + t.integrate(f, -1.0, 1.0)
                    + t.integrate(f, 1.0, f64::INFINITY);
                if !(value.re.is_finite() && value.im.is_finite()) {
                    return Err(Error::QuadratureFailure {
                        estimate: value.norm(),
                        abs_error: f64::INFINITY,
                    });
                }
                value
            }
            LevyMeasure::Sum(ref parts) => {
                let mut acc = zero;
                for p in parts {
                    acc += p.cumulant(z, truncated)?;
                }
                acc
            }
        };
        Ok(v)
    }

    /// Draws one jump with `|x| > eps` from the normalized restriction of
    /// the measure.
    pub fn sample_jump_above<R: Rng + ?Sized>(&self, eps: f64, rng: &mut R) -> Result<f64> {
        let opts = QuadOptions::default();
        match *self {
            LevyMeasure::Zero => Err(Error::ConfigError("zero measure has no jumps".into())),
            LevyMeasure::Gamma { shape, rate } => Ok(sample_gamma_measure_tail(shape, rate, eps, rng)),
            LevyMeasure::OneSidedStable { alpha, .. } => {
                let u: f64 = open01(rng);
                Ok(eps * u.powf(-1.0 / alpha))
            }
            LevyMeasure::SymmetricStable { alpha, .. } => {
                let u: f64 = open01(rng);
                let x = eps * u.powf(-1.0 / alpha);
                Ok(if rng.random::<bool>() { x } else { -x })
            }
            LevyMeasure::FiniteAtomic(ref atoms) => {
                let eligible: Vec<&Atom> = atoms.iter().filter(|a| a.position.abs() > eps).collect();
                let total: f64 = eligible.iter().map(|a| a.mass).sum();
                if eligible.is_empty() {
                    return Err(Error::ConfigError(format!("no atoms above jump threshold {eps}")));
                }
                let mut u = rng.random::<f64>() * total;
                for a in &eligible {
                    if u < a.mass {
                        return Ok(a.position);
                    }
                    u -= a.mass;
                }
                Ok(eligible[eligible.len() - 1].position)
            }
            LevyMeasure::FiniteParametric { jumps, .. } => match jumps {
                JumpLaw::Exponential { rate } => {
                    let e: f64 = Exp::new(rate).expect("validated rate").sample(rng);
                    Ok(eps.max(0.0) + e)
                }
                JumpLaw::Normal { mean, std_dev } => {
                    let n = Normal::new(mean, std_dev).expect("validated normal");
                    for _ in 0..1_000_000 {
                        let x = n.sample(rng);
                        if x.abs() > eps {
                            return Ok(x);
                        }
                    }
                    Err(Error::ConfigError(format!("normal jumps almost never exceed {eps}")))
                }
            },
            LevyMeasure::Tabulated(ref t) => {
                let lo = t.lower().abs().min(t.upper().abs());
                let hi = t.lower().abs().max(t.upper().abs());
                if eps >= hi {
                    return Err(Error::ConfigError(format!("jump threshold {eps} exceeds tabulated support")));
                }
                let dmax = t.density.iter().cloned().fold(0.0, f64::max);
                let a = eps.max(lo);
                let sign = if t.lower() > 0.0 { 1.0 } else { -1.0 };
                for _ in 0..10_000_000 {
                    let x = a + (hi - a) * rng.random::<f64>();
                    if rng.random::<f64>() * dmax <= t.density_at(sign * x) {
                        return Ok(sign * x);
                    }
                }
                Err(Error::ConfigError("tabulated jump sampler did not accept".into()))
            }
            LevyMeasure::Sum(ref parts) => {
                let masses = parts
                    .iter()
                    .map(|p| p.tail_mass(eps, &opts))
                    .collect::<Result<Vec<_>>>()?;
                let total: f64 = masses.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::ConfigError(format!("no mass above jump threshold {eps}")));
                }
                let mut u = rng.random::<f64>() * total;
                for (p, m) in parts.iter().zip(&masses) {
                    if u < *m {
                        return p.sample_jump_above(eps, rng);
                    }
                    u -= m;
                }
                parts[parts.len() - 1].sample_jump_above(eps, rng)
            }
        }
    }
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Exact draw from `x^{-1} e^{-λx}` restricted to `(eps, ∞)`.
fn sample_gamma_measure_tail<R: Rng + ?Sized>(shape: f64, rate: f64, eps: f64, rng: &mut R) -> f64 {
    let knee = 1.0 / rate;
    let exp1 = Exp::new(rate).expect("validated rate");
    let tail_from = |start: f64, rng: &mut R| loop {
        let x = start + exp1.sample(rng);
        if rng.random::<f64>() * x <= start {
            return x;
        }
    };
    if eps >= knee {
        return tail_from(eps, rng);
    }
    let mass_head = shape * (exp_integral_e1(rate * eps) - exp_integral_e1(1.0));
    let mass_tail = shape * exp_integral_e1(1.0);
    if rng.random::<f64>() * (mass_head + mass_tail) < mass_tail {
        return tail_from(knee, rng);
    }
    loop {
        // log-uniform proposal on (eps, knee], accept with e^{-λx}
        let u: f64 = rng.random();
        let x = eps * (knee / eps).powf(u);
        if rng.random::<f64>() <= (-rate * x).exp() {
            return x;
        }
    }
}

//! Lévy mixing `Φ_μ(ρ)(A) = ∫₀^∞ μ^s(A) ρ(ds)`.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::levy::{LawFamily, LevyMeasure, LevyTriplet, MeasureClass, PowerLaw, Support};
use crate::quadrature::{Integral, QuadOptions};
use crate::special::normal_interval;

/// Tail level below which `ρ((S, ∞))` is dropped.
pub const TAIL_TOL: f64 = 1e-10;

/// Finite union of disjoint half-open intervals `(a, b]` none of which
/// straddles the origin. An endpoint may sit at 0; the point 0 itself is
/// never counted.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if a.is_nan() || b.is_nan() || !(b > a) {
                return Err(Error::invalid(format!("interval ({a}, {b}] is empty or malformed")));
            }
            if a < 0.0 && b > 0.0 {
                return Err(Error::invalid(format!("interval ({a}, {b}] contains the origin")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::invalid("intervals overlap"));
            }
        }
        Ok(IntervalSet { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// True when 0 lies in the closure of the set.
    pub fn touches_zero(&self) -> bool {
        self.intervals.iter().any(|&(a, b)| a == 0.0 || b == 0.0)
    }

    fn mass_by<F: Fn(f64, f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        self.intervals.iter().map(|&(a, b)| f(a, b)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Upper cut `S` of the `s`-integral.
    pub truncation_point: f64,
}

fn positive_support(rho: &LevyMeasure) -> bool {
    matches!(rho.support(), Support::Positive | Support::Empty)
}

/// `ρ ∈ M_L1(ℝ⁺)`.
pub(crate) fn in_l1_positive(rho: &LevyMeasure) -> bool {
    positive_support(rho)
        && matches!(
            rho.classify(),
            Ok(MeasureClass::FiniteMass) | Ok(MeasureClass::FiniteVariation)
        )
}

/// Smallest convenient `S` with `ρ((S, ∞)) < tol`.
pub(crate) fn tail_cut(rho: &LevyMeasure, tol: f64) -> Result<f64> {
    let opts = QuadOptions::default();
    if let Some(sup) = support_bound(rho) {
        return Ok(sup);
    }
    let mut s: f64 = 1.0;
    for _ in 0..200 {
        if rho.window_moment(0, s, f64::INFINITY, &opts)? < tol {
            return Ok(s);
        }
        s *= 2.0;
    }
    Err(Error::domain("Lévy measure tail does not decay"))
}

/// Largest point of a compactly supported measure, if known.
pub(crate) fn support_bound(rho: &LevyMeasure) -> Option<f64> {
    match rho {
        LevyMeasure::Zero => Some(0.0),
        LevyMeasure::FiniteAtomic(atoms) => Some(atoms.iter().map(|a| a.position.abs()).fold(0.0, f64::max)),
        LevyMeasure::Tabulated(t) => Some(t.abscissae().iter().map(|x| x.abs()).fold(0.0, f64::max)),
        LevyMeasure::Sum(parts) => parts
            .iter()
            .map(support_bound)
            .try_fold(0.0f64, |acc, b| b.map(|b| acc.max(b))),
        _ => None,
    }
}

/// `∫_{(0, S]} g(s) ρ(ds)` plus the tail bound `ρ((S,∞)) · sup|g|`.
fn mix_integral<G: Fn(f64) -> f64>(rho: &LevyMeasure, g: G, bound: f64) -> Result<MixResult> {
    let opts = QuadOptions::default();
    let s_cut = tail_cut(rho, TAIL_TOL)?;
    if s_cut == 0.0 {
        return Ok(MixResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            truncation_point: 0.0,
        });
    }
    let Integral { value, abs_error } = rho.integrate(&g, 0.0, s_cut, &opts)?;
    let tail = rho.window_moment(0, s_cut, f64::INFINITY, &opts)?;
    Ok(MixResult {
        value,
        abs_error_estimate: abs_error + tail * bound,
        truncation_point: s_cut,
    })
}

/// `Φ_μ(ρ)(A)` through the closed-form convolution powers of `μ`.
pub fn phi_mix_mass(mu: &LevyTriplet, rho: &LevyMeasure, set: &IntervalSet) -> Result<MixResult> {
    if !positive_support(rho) {
        return Err(Error::domain("mixing measure must live on (0, ∞)"));
    }
    let class = rho.classify()?;
    if class == MeasureClass::NotLevy {
        return Err(Error::domain("mixing measure is not a Lévy measure"));
    }
    let l1 = matches!(class, MeasureClass::FiniteMass | MeasureClass::FiniteVariation);
    if !l1 && set.touches_zero() {
        return Err(Error::domain("mixing measure is not in M_L1 and the set reaches the origin"));
    }
    if rho.is_zero() {
        return Ok(MixResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            truncation_point: 0.0,
        });
    }
    if mu.family() == Some(LawFamily::Delta) {
        return delta_mix(mu.gamma(), rho, set);
    }
    // surface UnsupportedFamily before integrating
    let probe = PowerLaw::of(mu, 1.0)?;
    for &(a, b) in set.intervals() {
        probe.mass(a, b)?;
    }
    let g = |s: f64| {
        let law = PowerLaw::of(mu, s).expect("checked family");
        set.mass_by(|a, b| law.mass(a, b)).unwrap_or(f64::NAN)
    };
    let mut r = mix_integral(rho, g, 1.0)?;
    r.value = r.value.max(0.0);
    Ok(r)
}

/// `Φ_{δ_γ}(ρ)(A) = ρ(γ⁻¹ A)`.
fn delta_mix(gamma: f64, rho: &LevyMeasure, set: &IntervalSet) -> Result<MixResult> {
    let opts = QuadOptions::default();
    if gamma == 0.0 {
        return Ok(MixResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            truncation_point: 0.0,
        });
    }
    let value = match rho {
        LevyMeasure::FiniteAtomic(atoms) => atoms
            .iter()
            .filter(|at| {
                let x = gamma * at.position;
                set.intervals().iter().any(|&(a, b)| x > a && x <= b)
            })
            .map(|at| at.mass)
            .sum(),
        _ => set.mass_by(|a, b| {
            let (lo, hi) = if gamma > 0.0 { (a / gamma, b / gamma) } else { (b / gamma, a / gamma) };
            rho.mass(lo.max(0.0), hi, &opts)
        })?,
    };
    Ok(MixResult {
        value,
        abs_error_estimate: 0.0,
        truncation_point: support_bound(rho).unwrap_or(f64::INFINITY),
    })
}

/// Density of `Φ_μ(ρ)` for `μ = Exp(λ)`:
/// `f(x) = e^{-λx}/x ∫₀^∞ (λx)^s / Γ(s) ρ(ds)`, with `f(0) = 0`.
pub fn phi_mix_density_gamma(lambda: f64, rho: &LevyMeasure, x: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("gamma rate must be finite and > 0"));
    }
    if !in_l1_positive(rho) {
        return Err(Error::domain("mixing measure must lie in M_L1(ℝ⁺)"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("gamma mixing density is defined on x >= 0, got {x}")));
    }
    if x == 0.0 || rho.is_zero() {
        return Ok(0.0);
    }
    let lx = (lambda * x).ln();
    let g = |s: f64| (s * lx - ln_gamma(s)).exp();
    let inner = rho.integrate(g, 0.0, f64::INFINITY, &QuadOptions::default())?.value;
    Ok((-lambda * x).exp() / x * inner)
}

/// Reference law `μ = μ^1` of a strictly stable base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StableBase {
    /// Symmetric Cauchy with the given scale.
    Cauchy { scale: f64 },
    /// Centred Gaussian with the given variance.
    Gaussian { variance: f64 },
    /// Lévy distribution, `P(X <= x) = erfc(√(σ/2x))`.
    Levy { sigma: f64 },
}

impl StableBase {
    fn mass(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            StableBase::Cauchy { scale } => {
                let f = |x: f64| (x / scale).atan();
                (f(hi) - f(lo)) / std::f64::consts::PI
            }
            StableBase::Gaussian { variance } => {
                let sd = variance.sqrt();
                normal_interval(lo / sd, hi / sd)
            }
            StableBase::Levy { sigma } => {
                let cdf = |x: f64| {
                    if x <= 0.0 {
                        0.0
                    } else if x.is_infinite() {
                        1.0
                    } else {
                        crate::special::erfc((sigma / (2.0 * x)).sqrt())
                    }
                };
                (cdf(hi) - cdf(lo)).max(0.0)
            }
        }
    }
}

/// `Φ_μ(ρ)` for strictly α-stable `μ`, evaluated as `∫ μ(r⁻¹A) ρ_α(dr)`
/// with `ρ_α` the image of `ρ` under `s ↦ s^{1/α}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableMixer {
    base: StableBase,
    alpha: f64,
    rho: LevyMeasure,
}

/// `∫(1 ∧ s^p) ρ(ds)` is finite (analytic for stable measures).
fn power_wedge_finite(rho: &LevyMeasure, p: f64) -> Result<bool> {
    Ok(match rho {
        LevyMeasure::Zero | LevyMeasure::FiniteAtomic(_) | LevyMeasure::FiniteParametric { .. } => true,
        LevyMeasure::Tabulated(_) => rho.total_mass().is_finite(),
        LevyMeasure::Gamma { .. } => true,
        LevyMeasure::OneSidedStable { alpha, .. } | LevyMeasure::SymmetricStable { alpha, .. } => p > *alpha,
        LevyMeasure::Sum(parts) => {
            for part in parts {
                if !power_wedge_finite(part, p)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

pub fn phi_mix_stable(mu: &LevyTriplet, alpha: f64, rho: &LevyMeasure) -> Result<StableMixer> {
    let base = match (mu.family(), mu.nu()) {
        (Some(LawFamily::SymmetricStableLaw), LevyMeasure::SymmetricStable { alpha: a, scale }) if *a == alpha => {
            if alpha != 1.0 {
                return Err(Error::unsupported(format!("no reference CDF for symmetric stable index {alpha}")));
            }
            StableBase::Cauchy {
                scale: std::f64::consts::PI * scale,
            }
        }
        (Some(LawFamily::Gaussian), _) if alpha == 2.0 => {
            if mu.gamma() != 0.0 {
                return Err(Error::invalid("Gaussian base must be centred to be strictly stable"));
            }
            StableBase::Gaussian { variance: mu.b() }
        }
        (Some(LawFamily::OneSidedStableLaw), LevyMeasure::OneSidedStable { alpha: a, scale }) if *a == alpha => {
            if alpha != 0.5 {
                return Err(Error::unsupported(format!("no reference CDF for one-sided stable index {alpha}")));
            }
            let kappa = scale * statrs::function::gamma::gamma(0.5) / 0.5;
            StableBase::Levy {
                sigma: kappa * kappa / 2.0,
            }
        }
        _ => {
            if ![0.5, 1.0, 2.0].contains(&alpha) {
                return Err(Error::unsupported(format!("stable index {alpha} has no reference CDF")));
            }
            return Err(Error::invalid(format!("base law is not strictly {alpha}-stable")));
        }
    };
    if !positive_support(rho) {
        return Err(Error::domain("mixing measure must live on (0, ∞)"));
    }
    if !power_wedge_finite(rho, 1.0 / alpha)? || !matches!(rho.classify()?, MeasureClass::FiniteMass | MeasureClass::FiniteVariation | MeasureClass::Levy) {
        return Err(Error::domain("pushforward of the mixing measure is not in M_L1"));
    }
    Ok(StableMixer {
        base,
        alpha,
        rho: rho.clone(),
    })
}

impl StableMixer {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn base(&self) -> StableBase {
        self.base
    }

    pub fn mass(&self, set: &IntervalSet) -> Result<MixResult> {
        if self.rho.is_zero() {
            return Ok(MixResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                truncation_point: 0.0,
            });
        }
        let p = 1.0 / self.alpha;
        let g = |s: f64| {
            let r = s.powf(p);
            set.intervals().iter().map(|&(a, b)| self.base.mass(a / r, b / r)).sum::<f64>()
        };
        let mut res = mix_integral(&self.rho, g, 1.0)?;
        res.value = res.value.max(0.0);
        Ok(res)
    }
}

/// `∫₀^∞ e^{s φ_μ(θ)} ρ(ds)`, the Fourier transform of `Φ_μ(ρ)` for finite `ρ`
/// (the point mass that `μ^s` may place at 0 included).
pub fn mixing_cf(mu: &LevyTriplet, rho: &LevyMeasure, theta: f64) -> Result<Complex64> {
    if !positive_support(rho) {
        return Err(Error::domain("mixing measure must live on (0, ∞)"));
    }
    let total = rho
        .total_mass()
        .finite()
        .ok_or_else(|| Error::domain("the Fourier identity for the mixture needs a finite mixing measure"))?;
    let phi = mu.char_exponent(theta)?;
    Ok(rho.cumulant(phi, false)? + total)
}

/// `(1/s) ∫(1 ∧ x²) μ^s(dx)`, which tends to `b + ∫(1 ∧ x²) ν(dx)` as `s ↓ 0`.
pub fn small_s_ratio(mu: &LevyTriplet, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::invalid("s must be finite and > 0"));
    }
    if mu.is_degenerate() {
        return Err(Error::domain("small-time ratio needs a non-degenerate law"));
    }
    Ok(PowerLaw::of(mu, s)?.one_wedge_sq()? / s)
}

/// Domain of `Φ_μ`: `M_L1(ℝ⁺)` for non-degenerate `μ`, all of `M_L(ℝ⁺)` for
/// `δ_γ` with `γ ≠ 0`, and nothing for `δ_0`.
pub fn check_domain(mu: &LevyTriplet, rho: &LevyMeasure) -> bool {
    if !positive_support(rho) {
        return false;
    }
    if mu.is_degenerate() {
        mu.gamma() != 0.0 && !matches!(rho.classify(), Ok(MeasureClass::NotLevy) | Err(_))
    } else {
        in_l1_positive(rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_log};
    use crate::special::normal_pdf;

    #[test]
    fn interval_set_validation() {
        assert!(IntervalSet::interval(-1.0, 1.0).is_err());
        assert!(IntervalSet::new(vec![(1.0, 3.0), (2.0, 4.0)]).is_err());
        let s = IntervalSet::new(vec![(2.0, 3.0), (-1.0, 0.0)]).unwrap();
        assert_eq!(s.intervals(), &[(-1.0, 0.0), (2.0, 3.0)]);
        assert!(s.touches_zero());
    }

    #[test]
    fn delta_mixing_is_rescaling() {
        let mu = LevyTriplet::delta(2.0).unwrap();
        let rho = LevyMeasure::atom(3.0, 1.0).unwrap();
        let r = phi_mix_mass(&mu, &rho, &IntervalSet::interval(5.9, 6.1).unwrap()).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn single_point_mixing_of_exponential() {
        let mu = LevyTriplet::gamma_law(1.0, 1.0).unwrap();
        let rho = LevyMeasure::atom(1.0, 1.0).unwrap();
        let r = phi_mix_mass(&mu, &rho, &IntervalSet::interval(0.0, f64::INFINITY).unwrap()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_gamma_mixing_matches_two_dimensional_quadrature() {
        let mu = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let rho = LevyMeasure::gamma(1.0, 1.0).unwrap();
        let r = phi_mix_mass(&mu, &rho, &IntervalSet::interval(1.0, 2.0).unwrap()).unwrap();
        let opts = QuadOptions::default();
        let inner = |s: f64| {
            integrate(|x: f64| normal_pdf(x / s.sqrt()) / s.sqrt(), 1.0, 2.0, &opts)
                .unwrap()
                .value
        };
        let oracle = integrate_log(|s: f64| inner(s) * (-s).exp() / s, 0.0, f64::INFINITY, &opts)
            .unwrap()
            .value;
        assert!((r.value - oracle).abs() < 1e-9, "{} vs {oracle}", r.value);
    }

    #[test]
    fn gamma_density_examples() {
        let one = LevyMeasure::atom(1.0, 1.0).unwrap();
        assert!((phi_mix_density_gamma(1.0, &one, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let two = LevyMeasure::atom(2.0, 1.0).unwrap();
        assert!((phi_mix_density_gamma(1.0, &two, 2.0).unwrap() - 2.0 * (-2f64).exp()).abs() < 1e-15);
        assert_eq!(phi_mix_density_gamma(1.0, &two, 0.0).unwrap(), 0.0);
        assert!(phi_mix_density_gamma(1.0, &two, -1.0).is_err());

        let rho = LevyMeasure::compound_exponential(1.0, 1.0).unwrap();
        let opts = QuadOptions::default();
        let oracle = (-1f64).exp()
            * crate::quadrature::integrate_line(
                |s: f64| (-s).exp() / statrs::function::gamma::gamma(s),
                0.0,
                f64::INFINITY,
                &opts,
            )
            .unwrap()
            .value;
        assert!((phi_mix_density_gamma(1.0, &rho, 1.0).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn stable_mixer_examples() {
        let cauchy = LevyTriplet::symmetric_stable_law(1.0, 1.0 / std::f64::consts::PI).unwrap();
        let rho = LevyMeasure::atom(2.0, 1.0).unwrap();
        let m = phi_mix_stable(&cauchy, 1.0, &rho).unwrap();
        let set = IntervalSet::interval(0.5, 3.0).unwrap();
        let exact = ((3.0f64 / 2.0).atan() - (0.5f64 / 2.0).atan()) / std::f64::consts::PI;
        assert!((m.mass(&set).unwrap().value - exact).abs() < 1e-15);

        let levy = LevyTriplet::one_sided_stable_law(0.5, 1.0).unwrap();
        let one = LevyMeasure::atom(1.0, 1.0).unwrap();
        let m = phi_mix_stable(&levy, 0.5, &one).unwrap();
        let generic = phi_mix_mass(&levy, &one, &set).unwrap().value;
        assert!((m.mass(&set).unwrap().value - generic).abs() < 1e-15);

        let other = LevyTriplet::symmetric_stable_law(1.5, 1.0).unwrap();
        assert!(matches!(phi_mix_stable(&other, 1.5, &one), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn stable_mixer_rejects_heavy_pushforward() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let rho = LevyMeasure::one_sided_stable(0.6, 1.0).unwrap();
        assert!(matches!(phi_mix_stable(&g, 2.0, &rho), Err(Error::DomainError(_))));
    }

    #[test]
    fn mixing_cf_examples() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let one = LevyMeasure::atom(1.0, 1.0).unwrap();
        assert!((mixing_cf(&g, &one, 2.0).unwrap() - Complex64::new((-2f64).exp(), 0.0)).norm() < 1e-15);
        let m = LevyMeasure::atom(0.7, 3.0).unwrap();
        assert_eq!(mixing_cf(&g, &m, 0.0).unwrap(), Complex64::new(3.0, 0.0));
        let two = LevyMeasure::atomic(vec![(1.0, 1.0), (2.0, 1.0)]).unwrap();
        let expected = (-0.5f64).exp() + (-1f64).exp();
        assert!((mixing_cf(&g, &two, 1.0).unwrap().re - expected).abs() < 1e-15);
        let inf = LevyMeasure::gamma(1.0, 1.0).unwrap();
        assert!(matches!(mixing_cf(&g, &inf, 1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn small_s_ratio_examples() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        assert!((small_s_ratio(&g, 1e-4).unwrap() - 1.0).abs() < 1e-3);
        assert!(small_s_ratio(&LevyTriplet::delta(1.0).unwrap(), 1e-3).is_err());
        let gl = LevyTriplet::gamma_law(1.0, 1.0).unwrap();
        let limit = gl.nu().integral_one_wedge(2).unwrap().finite().unwrap();
        let r3 = small_s_ratio(&gl, 1e-3).unwrap();
        let r4 = small_s_ratio(&gl, 1e-4).unwrap();
        assert!((r4 - limit).abs() < (r3 - limit).abs());
        assert!((r4 - limit).abs() < 1e-3 * limit.max(1.0) * 10.0);
    }

    #[test]
    fn domain_examples() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        assert!(check_domain(&g, &LevyMeasure::gamma(1.0, 1.0).unwrap()));
        assert!(!check_domain(&g, &LevyMeasure::one_sided_stable(1.5, 1.0).unwrap()));
        let d0 = LevyTriplet::delta(0.0).unwrap();
        assert!(!check_domain(&d0, &LevyMeasure::atom(1.0, 1.0).unwrap()));
        let d1 = LevyTriplet::delta(1.0).unwrap();
        assert!(check_domain(&d1, &LevyMeasure::one_sided_stable(1.5, 1.0).unwrap()));
    }
}

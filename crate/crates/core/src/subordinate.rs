//! Triplet and characteristic-function maps of subordination, and the
//! cell-wise version for Lévy bases with piecewise-constant seeds.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::levy::{LevyTriplet, PowerLaw, SubordinatorPair, TruncationConvention};
use crate::mixing::{check_domain, phi_mix_mass, tail_cut, IntervalSet, MixResult, TAIL_TOL};
use crate::quadrature::QuadOptions;
use crate::special::cexpm1;

/// Characteristic triplet `(γ̄, b̄, ν̄)` of `L_{T_1}` with `ν̄ = β₀ν + Φ_{μ_L}(ρ)`
/// kept as an interval-mass evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatedTriplet {
    gamma_bar: f64,
    b_bar: f64,
    mu_l: LevyTriplet,
    pair: SubordinatorPair,
}

impl SubordinatedTriplet {
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn b_bar(&self) -> f64 {
        self.b_bar
    }

    /// The base law (standard truncation).
    pub fn mu_l(&self) -> &LevyTriplet {
        &self.mu_l
    }

    pub fn pair(&self) -> &SubordinatorPair {
        &self.pair
    }

    /// `ν̄(A)`.
    pub fn nu_bar_mass(&self, set: &IntervalSet) -> Result<MixResult> {
        let opts = QuadOptions::default();
        let beta0 = self.pair.beta0();
        let mut drift_part = 0.0;
        if beta0 > 0.0 {
            for &(a, b) in set.intervals() {
                drift_part += self.mu_l.nu().mass(a, b, &opts)?;
            }
        }
        let mut mix = if self.pair.rho().is_zero() {
            MixResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                truncation_point: 0.0,
            }
        } else {
            phi_mix_mass(&self.mu_l, self.pair.rho(), set)?
        };
        mix.value += beta0 * drift_part;
        Ok(mix)
    }
}

/// `s ↦ E[X_s; 0 < |X_s| <= 1]` under `μ^s`.
fn small_mean(mu: &LevyTriplet, s: f64) -> Result<f64> {
    PowerLaw::of(mu, s)?.truncated_mean()
}

/// Triplet of the subordinated law.
pub fn subordinate_triplet(mu_l: &LevyTriplet, pair: &SubordinatorPair) -> Result<SubordinatedTriplet> {
    let rho = pair.rho();
    if !rho.is_zero() && !check_domain(mu_l, rho) {
        return Err(Error::domain("subordinator Lévy measure lies outside the domain of the mixing map"));
    }
    let mu = mu_l.convert(TruncationConvention::Standard)?;
    let beta0 = pair.beta0();
    let b_bar = mu.b() * beta0;
    let mut gamma_bar = mu.gamma() * beta0;
    if !rho.is_zero() && !mu.is_symmetric() {
        small_mean(&mu, 1.0)?;
        let s_cut = tail_cut(rho, TAIL_TOL)?;
        let g = |s: f64| small_mean(&mu, s).unwrap_or(f64::NAN);
        gamma_bar += rho.integrate(g, 0.0, s_cut, &QuadOptions::default())?.value;
    }
    Ok(SubordinatedTriplet {
        gamma_bar,
        b_bar,
        mu_l: mu,
        pair: pair.clone(),
    })
}

/// `log Λ̂(θ) = ψ_T(φ_L(θ))`.
pub fn compose_cf(mu_l: &LevyTriplet, pair: &SubordinatorPair, theta: f64) -> Result<Complex64> {
    pair.laplace_exponent(mu_l.char_exponent(theta)?)
}

/// Lévy–Khintchine exponent evaluated directly from `(γ̄, b̄, ν̄)`.
pub fn cf_from_triplet(st: &SubordinatedTriplet, theta: f64) -> Result<Complex64> {
    if theta == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mu = &st.mu_l;
    let beta0 = st.pair.beta0();
    let rho = st.pair.rho();
    let i_theta = Complex64::new(0.0, theta);
    let mut v = Complex64::new(-0.5 * st.b_bar * theta * theta, st.gamma_bar * theta);
    if beta0 > 0.0 && !mu.nu().is_zero() {
        v += mu.nu().cumulant(i_theta, true)? * beta0;
    }
    if !rho.is_zero() {
        let phi = mu.char_exponent(theta)?;
        let symmetric = mu.is_symmetric();
        if !symmetric {
            small_mean(mu, 1.0)?;
        }
        let g = |s: f64| {
            let m1 = if symmetric { 0.0 } else { small_mean(mu, s).unwrap_or(f64::NAN) };
            cexpm1(phi * s) - i_theta * m1
        };
        v += rho.integrate(g, 0.0, f64::INFINITY, &QuadOptions::default())?.value;
    }
    Ok(v)
}

/// Axis-parallel rectangle `[x0, x1] × [y0, y1]`; one-dimensional cells use
/// `y ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) || !(x1 > x0 && y1 > y0) {
            return Err(Error::invalid(format!("degenerate rectangle [{x0},{x1}]x[{y0},{y1}]")));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(a, 0.0, b, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// Overlap with positive area.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedCell {
    pub rect: Rect,
    pub pair: SubordinatorPair,
    /// Density `c` of the control measure on the cell.
    pub weight: f64,
}

impl SeedCell {
    /// Control mass `c · |A|` of the cell.
    pub fn control(&self) -> f64 {
        self.weight * self.rect.area()
    }
}

/// Piecewise-constant seed of a subordinator Lévy basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedField {
    cells: Vec<SeedCell>,
}

impl SeedField {
    pub fn new(cells: Vec<SeedCell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, c) in cells.iter().enumerate() {
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(Error::invalid(format!("cell {i}: control weight must be finite and > 0")));
            }
            for (j, d) in cells.iter().enumerate().skip(i + 1) {
                if c.rect.overlaps(&d.rect) {
                    return Err(Error::invalid(format!("cells {i} and {j} overlap")));
                }
            }
        }
        Ok(SeedField { cells })
    }

    pub fn cells(&self) -> &[SeedCell] {
        &self.cells
    }
}

/// Quadruplet of the subordinated basis on one cell: the control measure is
/// unchanged and the seed is the subordinated triplet of the cell's pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTriplet {
    pub rect: Rect,
    pub weight: f64,
    pub triplet: SubordinatedTriplet,
}

impl CellTriplet {
    /// Log-CF of `L_T(A)`: `c |A| ψ_T(φ_L(θ))`.
    pub fn log_cf(&self, theta: f64) -> Result<Complex64> {
        Ok(compose_cf(&self.triplet.mu_l, &self.triplet.pair, theta)? * (self.weight * self.rect.area()))
    }
}

pub fn basis_quadruplet(mu_l: &LevyTriplet, field: &SeedField) -> Result<Vec<CellTriplet>> {
    field
        .cells
        .par_iter()
        .map(|c| {
            Ok(CellTriplet {
                rect: c.rect,
                weight: c.weight,
                triplet: subordinate_triplet(mu_l, &c.pair)?,
            })
        })
        .collect()
}

/// Log-CF of `L_T(A)` for one seed cell.
pub fn cell_log_cf(mu_l: &LevyTriplet, cell: &SeedCell, theta: f64) -> Result<Complex64> {
    Ok(compose_cf(mu_l, &cell.pair, theta)? * cell.control())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyMeasure;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn pure_drift_time_change_scales_triplet() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let st = subordinate_triplet(&g, &SubordinatorPair::drift(2.0).unwrap()).unwrap();
        assert_eq!((st.gamma_bar(), st.b_bar()), (0.0, 2.0));
        let set = IntervalSet::interval(0.1, 5.0).unwrap();
        assert_eq!(st.nu_bar_mass(&set).unwrap().value, 0.0);
    }

    #[test]
    fn poisson_by_poisson() {
        let p = LevyTriplet::new(1.0, 0.0, LevyMeasure::atom(1.0, 1.0).unwrap(), TruncationConvention::Standard)
            .unwrap();
        let pair = SubordinatorPair::new(0.0, LevyMeasure::atom(1.0, 1.0).unwrap()).unwrap();
        let st = subordinate_triplet(&p, &pair).unwrap();
        let e = (-1f64).exp();
        assert!((st.gamma_bar() - e).abs() < 1e-15);
        let mut fact = 1.0;
        for k in 1..6 {
            fact *= k as f64;
            let set = IntervalSet::interval(k as f64 - 0.5, k as f64 + 0.5).unwrap();
            assert!((st.nu_bar_mass(&set).unwrap().value - e / fact).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_examples() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let vg = SubordinatorPair::new(0.0, LevyMeasure::gamma(1.0, 1.0).unwrap()).unwrap();
        let v = compose_cf(&g, &vg, 2f64.sqrt()).unwrap();
        assert!(close(v, Complex64::new(0.5f64.ln(), 0.0), 1e-14));

        let t = LevyTriplet::gamma_law(2.0, 1.5).unwrap();
        let id = SubordinatorPair::drift(1.0).unwrap();
        assert!(close(compose_cf(&t, &id, 0.8).unwrap(), t.char_exponent(0.8).unwrap(), 1e-15));

        let drift = LevyTriplet::delta(1.0).unwrap();
        let pt = SubordinatorPair::new(0.3, LevyMeasure::gamma(2.0, 3.0).unwrap()).unwrap();
        let expected = pt.laplace_exponent(Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(compose_cf(&drift, &pt, 1.0).unwrap(), expected);
    }

    #[test]
    fn two_paths_agree() {
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let p = LevyTriplet::new(1.0, 0.0, LevyMeasure::atom(1.0, 1.0).unwrap(), TruncationConvention::Standard)
            .unwrap();
        let gl = LevyTriplet::gamma_law(1.5, 2.0).unwrap();
        let cases = [
            (g.clone(), SubordinatorPair::new(0.0, LevyMeasure::gamma(2.0, 3.0).unwrap()).unwrap(), 1e-6),
            (p.clone(), SubordinatorPair::new(0.0, LevyMeasure::atom(1.0, 1.0).unwrap()).unwrap(), 1e-8),
            (g, SubordinatorPair::drift(1.7).unwrap(), 1e-14),
            (gl, SubordinatorPair::new(0.4, LevyMeasure::compound_exponential(2.0, 1.0).unwrap()).unwrap(), 1e-6),
        ];
        for (mu, pair, tol) in &cases {
            let st = subordinate_triplet(mu, pair).unwrap();
            for &theta in &[-7.0, -1.0, 0.3, std::f64::consts::PI, 9.5] {
                let a = cf_from_triplet(&st, theta).unwrap();
                let b = compose_cf(mu, pair, theta).unwrap();
                assert!(close(a, b, *tol), "{mu:?} {pair:?} θ={theta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn seed_field_validation_and_cells() {
        let pair = SubordinatorPair::new(0.0, LevyMeasure::gamma(1.0, 1.0).unwrap()).unwrap();
        let a = Rect::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let b = Rect::new(0.5, 0.5, 1.5, 1.5).unwrap();
        let bad = SeedField::new(vec![
            SeedCell { rect: a, pair: pair.clone(), weight: 1.0 },
            SeedCell { rect: b, pair: pair.clone(), weight: 1.0 },
        ]);
        assert!(bad.is_err());
        let c = Rect::new(1.0, 0.0, 2.0, 2.0).unwrap();
        let field = SeedField::new(vec![
            SeedCell { rect: a, pair: pair.clone(), weight: 1.0 },
            SeedCell { rect: c, pair: pair.clone(), weight: 0.5 },
        ])
        .unwrap();
        let g = LevyTriplet::gaussian(0.0, 1.0).unwrap();
        let q = basis_quadruplet(&g, &field).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[1].weight, 0.5);
        let v = q[0].log_cf(1.0).unwrap();
        assert_eq!(v, compose_cf(&g, &pair, 1.0).unwrap());
        assert_eq!(q[1].log_cf(1.0).unwrap(), cell_log_cf(&g, &field.cells()[1], 1.0).unwrap());
    }
}

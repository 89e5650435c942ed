//! Adaptive Gauss–Kronrod quadrature (7-point Gauss / 15-point Kronrod panels).
//!
//! Infinite ranges are mapped onto `(0, 1]` with `x = a + (1 - t) / t`, and
//! integrals over the positive half-line can be taken in logarithmic
//! coordinates (`x = e^u`), which removes `x^{-1}`-type singularities at the
//! origin that Lévy densities typically carry.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real or complex.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: f64,
}

impl<T: Integrand> Integral<T> {
    pub fn zero() -> Self {
        Integral {
            value: T::zero(),
            abs_error: 0.0,
        }
    }

    pub fn combine(self, other: Integral<T>) -> Self {
        Integral {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Integral {
            value: self.value * k,
            abs_error: self.abs_error * k.abs(),
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod_panel<T: Integrand, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod = kronrod + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Panel { a, b, value, error }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("finite integration limits expected"));
    }
    if a == b {
        return Ok(Integral::zero());
    }
    if b < a {
        return integrate(f, b, a, opts).map(|r| r.scale(-1.0));
    }
    let mut panels = vec![kronrod_panel(&f, a, b)];
    loop {
        let (value, error) = panels.iter().fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite_value() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: value.magnitude(),
                abs_error: error,
            });
        }
        let tol = opts.abs_tol.max(opts.rel_tol * value.magnitude());
        if error <= tol {
            return Ok(Integral { value, abs_error: error });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if panels.len() + 2 > opts.max_subdivisions || mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureFailure {
                estimate: value.magnitude(),
                abs_error: error,
            });
        }
        panels.push(kronrod_panel(&f, p.a, mid));
        panels.push(kronrod_panel(&f, mid, p.b));
    }
}

/// Integrates `f` over `[a, b]` where either limit may be infinite.
pub fn integrate_line<T, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    line_impl(&f, a, b, opts)
}

fn line_impl<T: Integrand>(f: &dyn Fn(f64) -> T, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral<T>> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::invalid("NaN integration limit"));
    }
    if a >= b {
        if a == b {
            return Ok(Integral::zero());
        }
        return line_impl(f, b, a, opts).map(|r| r.scale(-1.0));
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate(f, a, b, opts),
        (true, false) => {
            let g = |t: f64| {
                let x = a + (1.0 - t) / t;
                if x.is_finite() {
                    f(x) * (1.0 / (t * t))
                } else {
                    T::zero()
                }
            };
            integrate(g, 0.0, 1.0, opts)
        }
        (false, true) => {
            let g = |t: f64| {
                let x = b - (1.0 - t) / t;
                if x.is_finite() {
                    f(x) * (1.0 / (t * t))
                } else {
                    T::zero()
                }
            };
            integrate(g, 0.0, 1.0, opts)
        }
        (false, false) => {
            let left = line_impl(f, f64::NEG_INFINITY, 0.0, opts)?;
            let right = line_impl(f, 0.0, f64::INFINITY, opts)?;
            Ok(left.combine(right))
        }
    }
}

/// Integrates `f` over `(a, b)` with `0 <= a < b <= inf` in logarithmic
/// coordinates `x = e^u`. Points where `e^u` under- or overflows contribute
/// nothing.
pub fn integrate_log<T, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    if !(a >= 0.0 && b > a) {
        if a == b {
            return Ok(Integral::zero());
        }
        return Err(Error::invalid(format!("log-scale integration needs 0 <= a < b, got ({a}, {b})")));
    }
    let g = |u: f64| {
        let x = u.exp();
        if x == 0.0 || !x.is_finite() {
            return T::zero();
        }
        let v = f(x) * x;
        // overflow of a singular density far out in the tails
        if !v.is_finite_value() && !(1e-100..=1e100).contains(&x) {
            T::zero()
        } else {
            v
        }
    };
    let lo = if a == 0.0 { f64::NEG_INFINITY } else { a.ln() };
    let hi = b.ln();
    if lo.is_infinite() && hi.is_infinite() {
        let left = integrate_line(&g, f64::NEG_INFINITY, 0.0, opts)?;
        let right = integrate_line(&g, 0.0, f64::INFINITY, opts)?;
        return Ok(left.combine(right));
    }
    integrate_line(g, lo, hi, opts)
}

//! Special functions not covered by `statrs`, plus tail-stable wrappers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Lentz continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

pub use libm::erfc;

use num_complex::Complex64;

/// `e^w - 1` without cancellation for small `|w|`.
pub fn cexpm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    let cos_m1 = -2.0 * half * half;
    Complex64::new(w.re.exp_m1() * w.im.cos() + cos_m1, w.re.exp() * w.im.sin())
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `P(lo < Z <= hi)` for a standard normal `Z`, evaluated in whichever tail
/// avoids cancellation.
pub fn normal_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= 0.0 {
        0.5 * (erfc(lo * FRAC_1_SQRT_2) - erfc(hi * FRAC_1_SQRT_2))
    } else if hi <= 0.0 {
        0.5 * (erfc(-hi * FRAC_1_SQRT_2) - erfc(-lo * FRAC_1_SQRT_2))
    } else {
        1.0 - 0.5 * erfc(-lo * FRAC_1_SQRT_2) - 0.5 * erfc(hi * FRAC_1_SQRT_2)
    }
}

/// Regularized lower incomplete gamma `P(a, x)`, with `P(a, x <= 0) = 0`.
pub fn reg_gamma_lower(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`, with `Q(a, x <= 0) = 1`.
pub fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma_ur(a, x)
    }
}

/// `P(lo < X <= hi)` for `X ~ Gamma(shape, rate = 1)` after scaling.
pub fn gamma_interval(shape: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo || hi <= 0.0 {
        return 0.0;
    }
    let lo = lo.max(0.0);
    if lo > shape {
        (reg_gamma_upper(shape, lo) - reg_gamma_upper(shape, hi)).max(0.0)
    } else {
        (reg_gamma_lower(shape, hi) - reg_gamma_lower(shape, lo)).max(0.0)
    }
}

/// Poisson probability mass `P(N = k)` for mean `m > 0`.
pub fn poisson_pmf(k: u64, m: f64) -> f64 {
    if m <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (k * m.ln() - m - ln_gamma(k + 1.0)).exp()
}

/// Upper summation bound beyond which Poisson masses are negligible.
pub fn poisson_upper_index(m: f64) -> u64 {
    (m + 12.0 * m.sqrt() + 40.0).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_line, QuadOptions};

    #[test]
    fn e1_matches_quadrature() {
        for &x in &[1e-3, 0.2, 1.0, 1.5, 7.0, 30.0] {
            let q = integrate_line(|t: f64| (-t).exp() / t, x, f64::INFINITY, &QuadOptions::default().with_abs_tol(1e-16)).unwrap();
            assert!((exp_integral_e1(x) - q.value).abs() < 1e-12 * q.value.max(1e-3), "x={x}: {} vs {}", exp_integral_e1(x), q.value);
        }
    }

    #[test]
    fn cexpm1_small_arguments() {
        let w = Complex64::new(-1e-12, 3e-12);
        let v = cexpm1(w);
        assert!((v - w - w * w / 2.0).norm() < 1e-27);
        let w = Complex64::new(-0.7, 2.0);
        assert!((cexpm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn normal_interval_tails() {
        let p = normal_interval(-1.0, 1.0);
        assert!((p - 0.682_689_492_137_085_9).abs() < 1e-15, "{p}");
        let far = normal_interval(10.0, 11.0);
        assert!(far > 0.0 && far < 1e-22);
    }

    #[test]
    fn gamma_interval_exponential_case() {
        let p = gamma_interval(1.0, 1.0, 2.0);
        assert!((p - ((-1f64).exp() - (-2f64).exp())).abs() < 1e-15);
    }
}

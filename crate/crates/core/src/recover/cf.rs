use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::levy::{LevyTriplet, SubordinatorPair};
use crate::subordinate::compose_cf;

/// Characteristic-function values on a θ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CFSample {
    theta: Vec<f64>,
    values: Vec<Complex64>,
    /// Sample size behind the values; 0 for exact values.
    n_obs: usize,
}

/// `2n + 1` equally spaced points on `[-max, max]`, with 0 hit exactly.
pub fn symmetric_grid(max: f64, n: usize) -> Result<Vec<f64>> {
    if !(max.is_finite() && max > 0.0) || n == 0 {
        return Err(Error::invalid("grid needs max > 0 and at least one point per side"));
    }
    let h = max / n as f64;
    Ok((0..=2 * n).map(|j| (j as f64 - n as f64) * h).collect())
}

/// 101 points on `[-10, 10]`.
pub fn default_theta_grid() -> Vec<f64> {
    symmetric_grid(10.0, 50).expect("fixed arguments")
}

fn zero_index(theta: &[f64]) -> Result<usize> {
    if theta.is_empty() {
        return Err(Error::EmptyInput);
    }
    if theta.iter().any(|t| !t.is_finite()) || theta.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("θ grid must be finite and strictly increasing"));
    }
    theta
        .iter()
        .position(|&t| t == 0.0)
        .ok_or_else(|| Error::invalid("θ grid must contain 0"))
}

impl CFSample {
    pub fn new(theta: Vec<f64>, mut values: Vec<Complex64>, n_obs: usize) -> Result<Self> {
        let i0 = zero_index(&theta)?;
        if values.len() != theta.len() {
            return Err(Error::invalid("one CF value per grid point"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::invalid("CF values must be finite"));
        }
        values[i0] = Complex64::new(1.0, 0.0);
        Ok(CFSample { theta, values, n_obs })
    }

    /// Exact values `exp(ψ_T(φ_L(θ)))`.
    pub fn analytic(mu_l: &LevyTriplet, pair: &SubordinatorPair, theta: Vec<f64>) -> Result<Self> {
        zero_index(&theta)?;
        let values = theta
            .iter()
            .map(|&t| Ok(compose_cf(mu_l, pair, t)?.exp()))
            .collect::<Result<Vec<_>>>()?;
        CFSample::new(theta, values, 0)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Smallest modulus the log can be taken at reliably.
    pub fn threshold(&self) -> f64 {
        if self.n_obs == 0 {
            f64::MIN_POSITIVE
        } else {
            10.0 / (self.n_obs.max(100) as f64).sqrt()
        }
    }

    /// The contiguous run of grid points around θ = 0 with `|cf| >= threshold`.
    pub fn trimmed(&self, threshold: f64) -> CFSample {
        let i0 = self.zero_index();
        let ok = |i: usize| self.values[i].norm() >= threshold;
        let mut lo = i0;
        while lo > 0 && ok(lo - 1) {
            lo -= 1;
        }
        let mut hi = i0;
        while hi + 1 < self.len() && ok(hi + 1) {
            hi += 1;
        }
        CFSample {
            theta: self.theta[lo..=hi].to_vec(),
            values: self.values[lo..=hi].to_vec(),
            n_obs: self.n_obs,
        }
    }

    fn zero_index(&self) -> usize {
        self.theta.iter().position(|&t| t == 0.0).expect("checked on construction")
    }
}

/// `(1/N) Σ_k exp(iθ x_k)` at every grid point.
pub fn empirical_cf(increments: &[f64], theta: &[f64]) -> Result<CFSample> {
    if increments.is_empty() {
        return Err(Error::EmptyInput);
    }
    zero_index(theta)?;
    let n = increments.len() as f64;
    let values = theta
        .par_iter()
        .map(|&t| {
            let (mut c, mut s) = (0.0, 0.0);
            for x in increments {
                let (sn, cs) = (t * x).sin_cos();
                c += cs;
                s += sn;
            }
            Complex64::new(c / n, s / n)
        })
        .collect();
    CFSample::new(theta.to_vec(), values, increments.len())
}

/// Continuous branch of `log cf` along the grid, equal to 0 at θ = 0.
///
/// Phases are tracked outwards from θ = 0; each step between neighbours must
/// be unambiguous, i.e. strictly inside `(-π, π)`.
pub fn unwrap_log_cf(cf: &CFSample) -> Result<Vec<Complex64>> {
    let threshold = cf.threshold();
    for (index, v) in cf.values.iter().enumerate() {
        let modulus = v.norm();
        if modulus < threshold {
            return Err(Error::NearZeroCf {
                index,
                modulus,
                threshold,
            });
        }
    }
    let i0 = cf.zero_index();
    let n = cf.len();
    let arg: Vec<f64> = cf.values.iter().map(|v| v.arg()).collect();
    let mut phase = vec![0.0; n];
    let step = |from: usize, to: usize, phase: &mut [f64]| -> Result<()> {
        let mut d = arg[to] - arg[from];
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        if d.abs() >= PI - 1e-6 {
            return Err(Error::BranchAmbiguity { index: to, step: d });
        }
        let target = phase[from] + d;
        let k = ((target - arg[to]) / (2.0 * PI)).round();
        phase[to] = arg[to] + 2.0 * PI * k;
        Ok(())
    };
    for j in i0 + 1..n {
        step(j - 1, j, &mut phase)?;
    }
    for j in (0..i0).rev() {
        step(j + 1, j, &mut phase)?;
    }
    Ok(cf
        .values
        .iter()
        .zip(&phase)
        .enumerate()
        .map(|(j, (v, &p))| {
            if j == i0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(v.norm().ln(), p)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyMeasure;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn constant_increments_rotate() {
        let cf = empirical_cf(&[3.0; 5], &[-PI, 0.0, PI]).unwrap();
        assert!((cf.values()[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert_eq!(cf.values()[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn symmetric_pair_gives_cosine() {
        let grid = [-2.0, -0.5, 0.0, 0.7, 3.0];
        let cf = empirical_cf(&[-1.0, 1.0], &grid).unwrap();
        for (t, v) in grid.iter().zip(cf.values()) {
            assert!((v.re - t.cos()).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn normal_sample_cf() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let cf = empirical_cf(&xs, &[0.0, 1.0]).unwrap();
        assert!((cf.values()[1] - Complex64::new((-0.5f64).exp(), 0.0)).norm() < 4.0 / 100_000f64.sqrt());
    }

    #[test]
    fn empty_and_gridless_inputs() {
        assert_eq!(empirical_cf(&[], &[0.0]), Err(Error::EmptyInput));
        assert!(empirical_cf(&[1.0], &[1.0, 2.0]).is_err());
        assert!(empirical_cf(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn positive_values_have_zero_phase() {
        let theta = symmetric_grid(3.0, 10).unwrap();
        let values = theta.iter().map(|t| Complex64::new((-t * t).exp(), 0.0)).collect();
        let h = unwrap_log_cf(&CFSample::new(theta, values, 0).unwrap()).unwrap();
        assert!(h.iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn pure_rotation_unwraps_linearly() {
        let theta = symmetric_grid(20.0, 200).unwrap();
        let values = theta.iter().map(|&t| Complex64::new(0.0, t).exp()).collect();
        let h = unwrap_log_cf(&CFSample::new(theta.clone(), values, 0).unwrap()).unwrap();
        for (t, v) in theta.iter().zip(&h) {
            assert!((v.im - t).abs() < 1e-12 && v.re.abs() < 1e-15);
        }
    }

    #[test]
    fn variance_gamma_log_cf_reproduces_values() {
        let mu = LevyTriplet::gaussian(0.3, 1.0).unwrap();
        let pair = SubordinatorPair::new(0.0, LevyMeasure::gamma(2.0, 3.0).unwrap()).unwrap();
        let cf = CFSample::analytic(&mu, &pair, default_theta_grid()).unwrap();
        let h = unwrap_log_cf(&cf).unwrap();
        for (j, (hj, v)) in h.iter().zip(cf.values()).enumerate() {
            assert!((hj.exp() - v).norm() < 1e-12);
            let exact = compose_cf(&mu, &pair, cf.theta()[j]).unwrap();
            assert!((hj - exact).norm() < 1e-9);
        }
    }

    #[test]
    fn coarse_grid_is_ambiguous() {
        let theta = symmetric_grid(2.0 * PI, 10).unwrap();
        let cf = empirical_cf(&[5.0; 10], &theta).unwrap();
        assert!(matches!(unwrap_log_cf(&cf), Err(Error::BranchAmbiguity { .. })));
    }

    #[test]
    fn small_modulus_is_rejected() {
        let theta = vec![0.0, 1.0];
        let cf = CFSample::new(theta, vec![Complex64::new(1.0, 0.0), Complex64::new(0.01, 0.0)], 10_000).unwrap();
        assert!(matches!(unwrap_log_cf(&cf), Err(Error::NearZeroCf { index: 1, .. })));
        let t = cf.trimmed(cf.threshold());
        assert_eq!(t.theta(), &[0.0]);
    }
}

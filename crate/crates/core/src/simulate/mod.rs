//! Monte Carlo simulation: subordinators, Lévy paths, subordinated paths,
//! Lévy-basis grid fields and Lévy semistationary processes.
//!
//! Every random draw comes from a ChaCha8 substream keyed by
//! `(seed, stream_id, step)`, so results do not depend on thread count or on
//! the order in which paths are generated.

mod field;
mod lss;
mod paths;
mod samplers;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use field::{sample_basis_grid, FieldCell, FieldUnion, GridField};
pub use lss::{sample_lss, Kernel, LssSample};
pub use paths::{sample_levy, sample_subordinated, sample_subordinated_with_clock, sample_subordinator};

/// Uniform grid `t0, t0 + dt, …, t0 + n_steps·dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !t0.is_finite() || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("time grid needs finite t0 and dt > 0, got ({t0}, {dt})")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("time grid needs at least one step"));
        }
        Ok(TimeGrid { t0, dt, n_steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| self.time(i)).collect()
    }
}

/// One simulated trajectory on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl PathSample {
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("paths have at least two points")
    }
}

/// Treatment of jumps below the truncation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallJumpMode {
    /// Replace them by their mean.
    #[default]
    DriftOnly,
    /// Also add a Gaussian with their variance (Lévy paths only).
    GaussianSubstitute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Jump truncation level; chosen per run when absent.
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub n_paths: usize,
    pub small_jump_mode: SmallJumpMode,
    /// Use exact increment laws where available. When false every process is
    /// built from truncated jumps.
    pub exact: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            epsilon: None,
            seed: 0,
            n_paths: 1,
            small_jump_mode: SmallJumpMode::DriftOnly,
            exact: true,
        }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        SimConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn paths(mut self, n_paths: usize) -> Self {
        self.n_paths = n_paths;
        self
    }

    pub fn epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::ConfigError(format!("epsilon must be finite and > 0, got {e}")));
            }
        }
        if self.n_paths == 0 {
            return Err(Error::ConfigError("n_paths must be >= 1".into()));
        }
        Ok(())
    }
}

/// Generator for `(seed, stream_id, step)`; each step owns 2^32 words of
/// its stream.
pub fn substream(seed: u64, stream_id: u64, step: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng.set_word_pos((step as u128) << 32);
    rng
}

//! JSON model files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "levy": { "type": "gaussian", "mean": 0.0, "variance": 1.0 },
//!   "subordinator": { "beta0": 0.0, "rho": { "type": "gamma", "shape": 2.0, "rate": 3.0 } }
//! }
//! ```

use serde::Deserialize;
use subordination::simulate::Kernel;
use subordination::subordinate::{Rect, SeedCell, SeedField};
use subordination::{LevyMeasure, LevyTriplet, SubordinatorPair, TruncationConvention};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Zero,
    Gamma { shape: f64, rate: f64 },
    OneSidedStable { alpha: f64, scale: f64 },
    SymmetricStable { alpha: f64, scale: f64 },
    Atomic { atoms: Vec<(f64, f64)> },
    CompoundExponential { rate: f64, jump_rate: f64 },
    CompoundNormal { rate: f64, mean: f64, std_dev: f64 },
    Tabulated { x: Vec<f64>, density: Vec<f64> },
    Sum { parts: Vec<MeasureSpec> },
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum ConventionSpec {
    Standard,
    Zero,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevySpec {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    Delta {
        position: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
    Poisson {
        rate: f64,
        jump: f64,
    },
    SymmetricStable {
        alpha: f64,
        scale: f64,
    },
    OneSidedStable {
        alpha: f64,
        scale: f64,
    },
    Triplet {
        gamma: f64,
        b: f64,
        nu: MeasureSpec,
        #[serde(default = "standard")]
        convention: ConventionSpec,
    },
}

fn standard() -> ConventionSpec {
    ConventionSpec::Standard
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(default)]
    pub beta0: f64,
    #[serde(default)]
    pub rho: Option<MeasureSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    /// `[x0, y0, x1, y1]`
    pub rect: [f64; 4],
    pub subordinator: PairSpec,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub cells: Vec<CellSpec>,
    /// Cell index lists whose sums are reported as extra rows.
    #[serde(default)]
    pub unions: Vec<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Exp,
    Gamma { alpha: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub schema: u32,
    pub levy: LevySpec,
    pub subordinator: PairSpec,
    #[serde(default)]
    pub seed_field: Option<FieldSpec>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
}

/// Prefixes library validation errors with the field they came from.
fn at<T>(field: &str, r: subordination::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Spec(format!("{field}: {e}")))
}

impl MeasureSpec {
    pub fn build(&self, field: &str) -> Result<LevyMeasure, CliError> {
        let m = match self {
            MeasureSpec::Zero => Ok(LevyMeasure::Zero),
            MeasureSpec::Gamma { shape, rate } => LevyMeasure::gamma(*shape, *rate),
            MeasureSpec::OneSidedStable { alpha, scale } => LevyMeasure::one_sided_stable(*alpha, *scale),
            MeasureSpec::SymmetricStable { alpha, scale } => LevyMeasure::symmetric_stable(*alpha, *scale),
            MeasureSpec::Atomic { atoms } => LevyMeasure::atomic(atoms.clone()),
            MeasureSpec::CompoundExponential { rate, jump_rate } => {
                LevyMeasure::compound_exponential(*rate, *jump_rate)
            }
            MeasureSpec::CompoundNormal { rate, mean, std_dev } => {
                LevyMeasure::compound_normal(*rate, *mean, *std_dev)
            }
            MeasureSpec::Tabulated { x, density } => LevyMeasure::tabulated(x.clone(), density.clone()),
            MeasureSpec::Sum { parts } => {
                let mut acc = LevyMeasure::Zero;
                for (i, p) in parts.iter().enumerate() {
                    acc = acc.plus(&p.build(&format!("{field}.parts[{i}]"))?);
                }
                Ok(acc)
            }
        };
        at(field, m)
    }
}

impl LevySpec {
    pub fn build(&self) -> Result<LevyTriplet, CliError> {
        let t = match self {
            LevySpec::Gaussian { mean, variance } => LevyTriplet::gaussian(*mean, *variance),
            LevySpec::Delta { position } => LevyTriplet::delta(*position),
            LevySpec::Gamma { shape, rate } => LevyTriplet::gamma_law(*shape, *rate),
            LevySpec::Poisson { rate, jump } => LevyTriplet::poisson(*rate, *jump),
            LevySpec::SymmetricStable { alpha, scale } => LevyTriplet::symmetric_stable_law(*alpha, *scale),
            LevySpec::OneSidedStable { alpha, scale } => LevyTriplet::one_sided_stable_law(*alpha, *scale),
            LevySpec::Triplet {
                gamma,
                b,
                nu,
                convention,
            } => {
                let conv = match convention {
                    ConventionSpec::Standard => TruncationConvention::Standard,
                    ConventionSpec::Zero => TruncationConvention::Zero,
                };
                LevyTriplet::new(*gamma, *b, nu.build("levy.nu")?, conv)
            }
        };
        at("levy", t)
    }
}

impl PairSpec {
    pub fn build(&self, field: &str) -> Result<SubordinatorPair, CliError> {
        let rho = match &self.rho {
            Some(m) => m.build(&format!("{field}.rho"))?,
            None => LevyMeasure::Zero,
        };
        if !(self.beta0.is_finite() && self.beta0 >= 0.0) {
            return Err(CliError::Spec(format!("{field}.beta0: must be finite and >= 0, got {}", self.beta0)));
        }
        at(field, SubordinatorPair::new(self.beta0, rho))
    }
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: ModelSpec = serde_json::from_str(text).map_err(|e| CliError::Spec(format!("model: {e}")))?;
        if spec.schema != 1 {
            return Err(CliError::Spec(format!("schema: unsupported version {}", spec.schema)));
        }
        Ok(spec)
    }

    pub fn levy(&self) -> Result<LevyTriplet, CliError> {
        self.levy.build()
    }

    pub fn pair(&self) -> Result<SubordinatorPair, CliError> {
        self.subordinator.build("subordinator")
    }

    pub fn field(&self) -> Result<(SeedField, &[Vec<usize>]), CliError> {
        let f = self
            .seed_field
            .as_ref()
            .ok_or_else(|| CliError::Spec("seed_field: required by this command".into()))?;
        let cells = f
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let name = format!("seed_field.cells[{i}]");
                let [x0, y0, x1, y1] = c.rect;
                Ok(SeedCell {
                    rect: at(&format!("{name}.rect"), Rect::new(x0, y0, x1, y1))?,
                    pair: c.subordinator.build(&format!("{name}.subordinator"))?,
                    weight: c.weight,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok((at("seed_field", SeedField::new(cells))?, &f.unions))
    }

    pub fn kernel(&self) -> Result<Kernel, CliError> {
        match self.kernel {
            Some(KernelSpec::Exp) => Ok(Kernel::Exp),
            Some(KernelSpec::Gamma { alpha }) => Ok(Kernel::Gamma { alpha }),
            None => Err(CliError::Spec("kernel: required by this command".into())),
        }
    }
}

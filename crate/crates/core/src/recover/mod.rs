//! Recovery of the time change from observations of `X = L_T` with the
//! base law `μ_L` known.
//!
//! The log-CF of `X₁` equals `ψ_T(φ_L(θ))`, so an estimated CF gives samples
//! of the subordinator's Laplace exponent along the curve `{φ_L(θ)}`; a
//! parametric pair is then fitted there by least squares.

mod cf;
mod fit;
mod ou;
mod simplex;

pub use cf::{default_theta_grid, empirical_cf, symmetric_grid, unwrap_log_cf, CFSample};
pub use fit::{
    fit_subordinator, psi_curve, recover_from_increments, recover_from_path, FitOptions, FitResult, PsiCurve,
    PsiPoint, SubordinatorFamily,
};
pub use ou::{ou_invert, OU_MAX_DT};

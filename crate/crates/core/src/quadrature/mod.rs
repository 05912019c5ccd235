//! Deterministic and stochastic integration engine.
//!
//! Three integrators share one result type:
//!
//! * [`integrate_1d`] / [`integrate_axis`]: globally adaptive 21-point
//!   Gauss-Kronrod on a single axis. The rule is open, so integrable endpoint
//!   singularities are never evaluated.
//! * [`integrate_nd`]: the same rule applied recursively, up to three axes.
//! * [`mc_integrate`]: stratified Monte Carlo with per-stratum random streams,
//!   bit-reproducible regardless of how many worker threads run it.
//!
//! Semi-infinite axes are mapped onto the unit interval by the transform
//! declared on the [`Axis`], so the caller always knows which substitution was
//! used.

mod domain;
mod gauss_kronrod;
mod legendre;
mod monte_carlo;
mod nested;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use domain::{Axis, Domain, TailMap};
pub use gauss_kronrod::{integrate_1d, integrate_axis, AdaptiveOptions};
pub(crate) use gauss_kronrod::adapt_on_axis;
pub use legendre::GaussLegendre;
pub use monte_carlo::{mc_integrate, mc_integrate_vec, stratum_rng, Importance, McOptions};
pub use nested::{integrate_nd, integrate_nd_with};

/// Default evaluation budget for adaptive rules.
pub const DEFAULT_MAX_EVALUATIONS: u64 = 1_000_000;

/// Default sample budget for Monte Carlo.
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

/// Which integrator produced a [`QuadratureResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Adaptive1d,
    Nested2d,
    Nested3d,
    MonteCarlo,
    /// Fixed tensor-product Gauss-Legendre rule.
    FixedProduct,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Adaptive1d => "adaptive-1d",
            Method::Nested2d => "nested-2d",
            Method::Nested3d => "nested-3d",
            Method::MonteCarlo => "monte-carlo",
            Method::FixedProduct => "fixed-product",
        };
        f.write_str(s)
    }
}

/// Value, error estimate and cost of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate. For Monte Carlo this is the standard error of
    /// the stratified mean.
    pub abs_error_estimate: f64,
    pub evaluations: u64,
    pub method: Method,
}

impl QuadratureResult {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }

    /// Multiply value and error by a constant prefactor.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integration did not converge after {evaluations} evaluations (value {value:e}, error estimate {error:e})")]
    NonConvergence {
        value: f64,
        error: f64,
        evaluations: u64,
    },
    #[error("integrand returned a non-finite value {value} at {coordinate:?}")]
    NonFinite { coordinate: Vec<f64>, value: f64 },
    #[error("nested adaptive quadrature supports at most 3 dimensions, got {0}; use mc_integrate for higher dimensions")]
    UnsupportedDimension(usize),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid Monte Carlo options: {0}")]
    InvalidOptions(String),
}

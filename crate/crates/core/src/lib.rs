//! On-axis scintillation index of Gaussian laser beams in weak-to-moderate
//! atmospheric turbulence.
//!
//! The index is assembled from three pieces, all normalized by the vacuum
//! on-axis intensity:
//!
//! * the Rytov-like first-order term `σ1²·L` ([`first_order`]),
//! * the turbulence-induced drop `i1` of the mean on-axis intensity
//!   ([`intensity`]),
//! * the cross term `x2` between first- and second-order fluctuations
//!   ([`cross_term`]),
//!
//! combined as `σ² = (σ1²·L + x2)/(1 + i1)²` by [`pipeline`].
//!
//! ```no_run
//! use scint_core::params::PhysicalParams;
//! use scint_core::pipeline::{scintillation_index, RunOptions};
//!
//! let p = PhysicalParams {
//!     cn2: 5e-15,
//!     l0: 6.3e-3,
//!     outer_scale: f64::INFINITY,
//!     q0: 1.29e7,
//!     z: 1200.0,
//!     r0: 0.01,
//!     lambda_c: f64::INFINITY,
//! };
//! let r = scintillation_index(&p, &RunOptions::default()).unwrap();
//! println!("σ² = {:.4} (Rytov-like {:.4})", r.sigma2_full, r.sigma2_rytov_like);
//! ```

pub mod beam;
pub mod cli;
pub mod covariance;
pub mod cross_term;
pub mod error;
pub mod first_order;
pub mod intensity;
pub mod io;
pub mod kinetic;
pub mod params;
pub mod pipeline;
pub mod quadrature;
pub mod spectrum;

pub use error::{ScintError, Stage};
pub use params::{derive_params, DerivedParams, PhysicalParams};
pub use pipeline::{scintillation_index, sweep, RunOptions, ScintResult, SweepAxis};

/// Version tag recorded in metadata and cache keys.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

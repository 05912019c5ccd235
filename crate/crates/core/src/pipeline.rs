//! Assembly of the scintillation index and parameter sweeps.
//!
//! ```text
//! σ² = (σ1²·L + x2) / (1 + i1)²
//! ```

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cross_term::cross_term_ratio;
use crate::error::{ScintError, Stage};
use crate::first_order::sigma2_first_order;
use crate::intensity::intensity_correction_ratio;
use crate::params::{derive_params, validate_regime, PhysicalParams, RegimeReport};
use crate::quadrature::{McOptions, DEFAULT_MC_SAMPLES};

/// Default relative tolerance of the deterministic integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub rel_tol: f64,
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScintResult {
    pub sigma2_full: f64,
    /// `σ1²L/(1+i1)²`: the cross term switched off.
    pub sigma2_no_df2: f64,
    /// `σ1²L`.
    pub sigma2_rytov_like: f64,
    pub i1_ratio: f64,
    pub x2_ratio: f64,
    pub sigma1_sq: f64,
    pub big_l: f64,
    /// Propagated one-sigma uncertainty of `sigma2_full`.
    pub error_estimate: f64,
    pub x2_precision_ok: bool,
    pub evaluations: u64,
    pub regime: RegimeReport,
}

/// On-axis scintillation index of one parameter point.
pub fn scintillation_index(p: &PhysicalParams, opts: &RunOptions) -> Result<ScintResult, ScintError> {
    let d = derive_params(p)?;
    let regime = validate_regime(&d, p);
    let first = sigma2_first_order(&d, p, opts.rel_tol)?;
    let intensity = intensity_correction_ratio(&d, p, opts.rel_tol)?;
    let cross = cross_term_ratio(&d, p, &McOptions::new(opts.mc_samples, opts.seed))?;

    let denom = 1.0 + intensity.i1_ratio;
    if denom <= 0.0 {
        return Err(ScintError::Consistency {
            stage: Stage::IntensityCorrection,
            detail: format!("mean intensity is depleted beyond zero (1 + i1 = {denom:e})"),
        });
    }
    let rytov_like = first.sigma2_first;
    let denom_sq = denom * denom;
    let full = (rytov_like + cross.x2_ratio) / denom_sq;
    let error_estimate = ((d.sigma1_sq * first.quad.abs_error_estimate / denom_sq).powi(2)
        + (cross.quad.abs_error_estimate / denom_sq).powi(2)
        + (2.0 * full * intensity.quad.abs_error_estimate / denom).powi(2))
    .sqrt();
    Ok(ScintResult {
        sigma2_full: full,
        sigma2_no_df2: rytov_like / denom_sq,
        sigma2_rytov_like: rytov_like,
        i1_ratio: intensity.i1_ratio,
        x2_ratio: cross.x2_ratio,
        sigma1_sq: d.sigma1_sq,
        big_l: first.big_l,
        error_estimate,
        x2_precision_ok: cross.precision_ok,
        evaluations: first.quad.evaluations + intensity.quad.evaluations + cross.quad.evaluations,
        regime,
    })
}

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Z,
    Cn2,
    Sigma1Sq,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Z => "z",
            SweepAxis::Cn2 => "cn2",
            SweepAxis::Sigma1Sq => "sigma1_sq",
        }
    }

    /// Parameter point at grid value `x`. A Rytov-variance axis adjusts
    /// `cn2` at the configured distance.
    pub fn apply(&self, p: &PhysicalParams, x: f64) -> PhysicalParams {
        match self {
            SweepAxis::Z => PhysicalParams { z: x, ..*p },
            SweepAxis::Cn2 => PhysicalParams { cn2: x, ..*p },
            SweepAxis::Sigma1Sq => p.with_sigma1_sq(x),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z" => Ok(SweepAxis::Z),
            "cn2" => Ok(SweepAxis::Cn2),
            "sigma1_sq" => Ok(SweepAxis::Sigma1Sq),
            other => Err(format!("unknown sweep axis '{other}' (expected z, cn2 or sigma1_sq)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub x: f64,
    pub seed: u64,
    pub params: PhysicalParams,
    pub result: Result<ScintResult, ScintError>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep grid must be strictly increasing and finite (entry {index}: {value})")]
    BadGrid { index: usize, value: f64 },
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sweep row `index`.
pub fn row_seed(seed: u64, index: usize) -> u64 {
    seed ^ splitmix64(index as u64)
}

pub fn check_grid(grid: &[f64]) -> Result<(), SweepError> {
    if grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    for (i, &x) in grid.iter().enumerate() {
        if !x.is_finite() || (i > 0 && x <= grid[i - 1]) {
            return Err(SweepError::BadGrid { index: i, value: x });
        }
    }
    Ok(())
}

/// Evaluate every grid point; failures are kept per row.
pub fn sweep(p: &PhysicalParams, axis: SweepAxis, grid: &[f64], opts: &RunOptions) -> Result<Vec<SweepRow>, SweepError> {
    sweep_with(p, axis, grid, opts, scintillation_index)
}

/// [`sweep`] with a custom per-point evaluator, e.g. a caching wrapper.
pub fn sweep_with<F>(
    p: &PhysicalParams,
    axis: SweepAxis,
    grid: &[f64],
    opts: &RunOptions,
    eval: F,
) -> Result<Vec<SweepRow>, SweepError>
where
    F: Fn(&PhysicalParams, &RunOptions) -> Result<ScintResult, ScintError> + Sync,
{
    check_grid(grid)?;
    Ok(grid
        .par_iter()
        .enumerate()
        .map(|(index, &x)| {
            let params = axis.apply(p, x);
            let seed = row_seed(opts.seed, index);
            let row_opts = RunOptions { seed, ..*opts };
            SweepRow {
                index,
                x,
                seed,
                params,
                result: eval(&params, &row_opts),
            }
        })
        .collect())
}

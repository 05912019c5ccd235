//! Channel description and the dimensionless scales derived from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectrum::{collision_frequency, SpectrumParams};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Upper end of the moderate-turbulence range.
pub const MODERATE_LIMIT: f64 = 0.85;
/// Upper end of the weak (Rytov) range.
pub const RYTOV_LIMIT: f64 = 0.3;
/// Smallest `q0·r0` considered safely paraxial.
pub const PARAXIAL_THRESHOLD: f64 = 10.0;
/// `a ≪ b` is read as `a ≤ 0.1·b` in the regime diagnostics.
pub const SCALE_SEPARATION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must not be negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("inner scale l0 = {l0} must be below the outer scale L0 = {outer}")]
    ScaleOrder { l0: f64, outer: f64 },
}

/// Propagation channel and beam. `outer_scale` and `lambda_c` may be
/// `f64::INFINITY`; `cn2 = 0` describes a turbulence-free path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Refractive-index structure constant, m^(−2/3).
    pub cn2: f64,
    /// Inner scale, m.
    pub l0: f64,
    /// Outer scale, m.
    pub outer_scale: f64,
    /// Central wavenumber, 1/m.
    pub q0: f64,
    /// Path length, m.
    pub z: f64,
    /// Aperture radius, m.
    pub r0: f64,
    /// Phase-diffuser coherence length, m.
    pub lambda_c: f64,
}

impl PhysicalParams {
    /// All violated constraints, in field order.
    pub fn violations(&self) -> Vec<ParamError> {
        let mut errs = Vec::new();
        if self.cn2.is_nan() || self.cn2.is_infinite() {
            errs.push(ParamError::NotFinite {
                name: "cn2",
                value: self.cn2,
            });
        } else if self.cn2 < 0.0 {
            errs.push(ParamError::Negative {
                name: "cn2",
                value: self.cn2,
            });
        }
        let required = [("l0", self.l0), ("q0", self.q0), ("z", self.z), ("r0", self.r0)];
        for (name, value) in required {
            if !value.is_finite() {
                errs.push(ParamError::NotFinite { name, value });
            } else if value <= 0.0 {
                errs.push(ParamError::NotPositive { name, value });
            }
        }
        for (name, value) in [("L0", self.outer_scale), ("lambda_c", self.lambda_c)] {
            if value.is_nan() {
                errs.push(ParamError::NotFinite { name, value });
            } else if value <= 0.0 {
                errs.push(ParamError::NotPositive { name, value });
            }
        }
        if self.l0.is_finite() && self.outer_scale.is_finite() && self.l0 >= self.outer_scale && self.l0 > 0.0 {
            errs.push(ParamError::ScaleOrder {
                l0: self.l0,
                outer: self.outer_scale,
            });
        }
        errs
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        match self.violations().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn spectrum(&self) -> SpectrumParams {
        SpectrumParams::new(self.cn2, self.l0, self.outer_scale)
    }

    /// Copy with `cn2` chosen so that the Rytov variance equals `sigma1_sq`.
    pub fn with_sigma1_sq(&self, sigma1_sq: f64) -> Self {
        Self {
            cn2: sigma1_sq / rytov_coefficient(self.q0, self.z),
            ..*self
        }
    }
}

/// `σ1²/Cn²` for the given wavenumber and distance.
pub fn rytov_coefficient(q0: f64, z: f64) -> f64 {
    1.23 * q0.powf(7.0 / 6.0) * z.powf(11.0 / 6.0)
}

/// Scales consumed by every integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Rytov variance `1.23·Cn²·q0^{7/6}·z^{11/6}`.
    pub sigma1_sq: f64,
    /// `r0²·q0/z`.
    pub rho0_sq: f64,
    /// `r1²·q0/z`.
    pub rho1_sq: f64,
    /// Partially coherent radius, m.
    pub r1: f64,
    /// Propagation time `z/c`, s.
    pub t: f64,
    /// Carrier angular frequency `c·q0`, rad/s.
    pub omega0: f64,
    /// Inner-scale damping parameter `q0·l0²/(4π²z)`.
    pub inner_scale_term: f64,
}

impl DerivedParams {
    /// `ρ0²ρ1²`.
    pub fn rho_product(&self) -> f64 {
        self.rho0_sq * self.rho1_sq
    }
}

pub fn derive_params(p: &PhysicalParams) -> Result<DerivedParams, ParamError> {
    p.validate()?;
    let r1_sq = p.r0 * p.r0 / (1.0 + 2.0 * p.r0 * p.r0 / (p.lambda_c * p.lambda_c));
    let fresnel = p.q0 / p.z;
    Ok(DerivedParams {
        sigma1_sq: p.cn2 * rytov_coefficient(p.q0, p.z),
        rho0_sq: p.r0 * p.r0 * fresnel,
        rho1_sq: r1_sq * fresnel,
        r1: r1_sq.sqrt(),
        t: p.z / SPEED_OF_LIGHT,
        omega0: SPEED_OF_LIGHT * p.q0,
        inner_scale_term: p.q0 * p.l0 * p.l0 / (4.0 * std::f64::consts::PI.powi(2) * p.z),
    })
}

/// Validity flags for a parameter point. Never blocks a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub sigma1_sq: f64,
    pub within_moderate: bool,
    pub within_rytov: bool,
    pub time_hierarchy_ok: bool,
    pub messages: Vec<String>,
}

pub fn validate_regime(d: &DerivedParams, p: &PhysicalParams) -> RegimeReport {
    let mut messages = Vec::new();
    let within_moderate = d.sigma1_sq <= MODERATE_LIMIT;
    let within_rytov = d.sigma1_sq < RYTOV_LIMIT;
    if !within_moderate {
        messages.push(format!(
            "Rytov variance {:.3} exceeds the moderate-turbulence bound {MODERATE_LIMIT}",
            d.sigma1_sq
        ));
    }
    if p.q0 * p.r0 < PARAXIAL_THRESHOLD {
        messages.push(format!(
            "q0·r0 = {:.3} is below {PARAXIAL_THRESHOLD}; paraxial optics is doubtful",
            p.q0 * p.r0
        ));
    }
    let k_char = 2.0 * std::f64::consts::PI / p.l0;
    let transit = std::f64::consts::PI / (SPEED_OF_LIGHT * k_char);
    let time_hierarchy_ok = match collision_frequency(&p.spectrum(), d.omega0, k_char) {
        Ok(nu) => {
            let lower = transit <= SCALE_SEPARATION * d.t;
            let upper = nu * d.t <= SCALE_SEPARATION;
            if !lower {
                messages.push(format!(
                    "propagation time {:.3e} s is not long against the eddy transit time {transit:.3e} s",
                    d.t
                ));
            }
            if !upper {
                messages.push(format!(
                    "propagation time {:.3e} s is not short against the collision time {:.3e} s",
                    d.t,
                    1.0 / nu
                ));
            }
            lower && upper
        }
        Err(e) => {
            messages.push(format!("collision frequency unavailable: {e}"));
            false
        }
    };
    RegimeReport {
        sigma1_sq: d.sigma1_sq,
        within_moderate,
        within_rytov,
        time_hierarchy_ok,
        messages,
    }
}

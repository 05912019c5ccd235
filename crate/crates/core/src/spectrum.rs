//! Von Karman refractive-index spectrum with a Gaussian inner-scale cutoff.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::SPEED_OF_LIGHT;

/// Spectral amplitude prefactor of the refractive-index spectrum.
pub const SPECTRUM_PREFACTOR: f64 = 0.033;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("spectrum is singular at k = 0 for an infinite outer scale")]
    SingularOrigin,
    #[error("wavenumber must be finite and non-negative, got {0}")]
    BadWavenumber(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub cn2: f64,
    pub l0: f64,
    /// `1/L0²`; zero encodes an infinite outer scale.
    pub inv_outer_sq: f64,
}

impl SpectrumParams {
    pub fn new(cn2: f64, l0: f64, outer_scale: f64) -> Self {
        Self {
            cn2,
            l0,
            inv_outer_sq: (outer_scale * outer_scale).recip(),
        }
    }

    /// Inner-scale cutoff wavenumber `2π/l0`.
    pub fn k_inner(&self) -> f64 {
        2.0 * PI / self.l0
    }

    /// `ψ(k)`, m³, without the origin check.
    #[inline]
    pub fn eval(&self, k: f64) -> f64 {
        let cut = k * self.l0 / (2.0 * PI);
        SPECTRUM_PREFACTOR * self.cn2 * (-cut * cut).exp() * (k * k + self.inv_outer_sq).powf(-11.0 / 6.0)
    }
}

/// `ψ(k) = 0.033·Cn²·exp(−(k·l0/2π)²)/(k² + L0⁻²)^{11/6}`.
pub fn psi(k: f64, s: &SpectrumParams) -> Result<f64, SpectrumError> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(SpectrumError::BadWavenumber(k));
    }
    if k == 0.0 && s.inv_outer_sq == 0.0 {
        return Err(SpectrumError::SingularOrigin);
    }
    Ok(s.eval(k))
}

/// Collision-rate estimate `ν ≈ (2πω0²/c)·ψ(k′)·k′²`, 1/s.
pub fn collision_frequency(s: &SpectrumParams, omega0: f64, k_char: f64) -> Result<f64, SpectrumError> {
    if !(k_char.is_finite() && k_char > 0.0) {
        return Err(SpectrumError::BadWavenumber(k_char));
    }
    Ok(2.0 * PI * omega0 * omega0 / SPEED_OF_LIGHT * psi(k_char, s)? * k_char * k_char)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_outer_scale_at_origin() {
        let s = SpectrumParams::new(1e-14, 6.3e-3, 10.0);
        let want = 0.033 * 1e-14 * 10f64.powf(11.0 / 3.0);
        assert!((psi(0.0, &s).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn origin_is_singular_without_outer_scale() {
        let s = SpectrumParams::new(1e-14, 6.3e-3, f64::INFINITY);
        assert_eq!(s.inv_outer_sq, 0.0);
        assert_eq!(psi(0.0, &s), Err(SpectrumError::SingularOrigin));
        assert!(psi(-1.0, &s).is_err());
    }

    #[test]
    fn zero_cn2_gives_zero() {
        let s = SpectrumParams::new(0.0, 1e-3, f64::INFINITY);
        assert_eq!(psi(50.0, &s).unwrap(), 0.0);
        assert_eq!(collision_frequency(&s, 3e15, 1e3).unwrap(), 0.0);
    }
}

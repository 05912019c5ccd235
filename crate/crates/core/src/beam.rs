//! Gaussian aperture field and its free-space evolution in normalized units.
//!
//! The boundary photon distribution is `f(r, q) = exp(−a·q² − b·r²)` with
//! `a = r1²/2` and `b = 2/r0²`. Free streaming carries it to
//! `f(r − q·z/q0, q)`, and summing over `q` gives a Gaussian spot whose peak
//! is normalized to 1 at the aperture.

use serde::{Deserialize, Serialize};

use crate::params::{DerivedParams, PhysicalParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamBoundary {
    pub r0: f64,
    pub r1: f64,
    pub q0: f64,
}

impl BeamBoundary {
    pub fn new(r0: f64, r1: f64, q0: f64) -> Self {
        debug_assert!(r1 > 0.0 && r1 <= r0 * (1.0 + 1e-12));
        Self { r0, r1, q0 }
    }

    pub fn from_params(p: &PhysicalParams, d: &DerivedParams) -> Self {
        Self::new(p.r0, d.r1, p.q0)
    }

    /// Width coefficient of the wave-vector Gaussian, `r1²/2`.
    pub fn a(&self) -> f64 {
        0.5 * self.r1 * self.r1
    }

    /// Width coefficient of the spatial Gaussian, `2/r0²`.
    pub fn b(&self) -> f64 {
        2.0 / (self.r0 * self.r0)
    }

    /// Spot of the vacuum beam at distance `z`.
    pub fn at(&self, z: f64) -> BeamSpot {
        let a = self.a();
        let b = self.b();
        let s = z / self.q0;
        let big_a = a + b * s * s;
        BeamSpot {
            z,
            peak: a / big_a,
            gamma: a * b / big_a,
            big_a,
        }
    }
}

/// Vacuum intensity `peak·exp(−gamma·r²)` at one distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpot {
    pub z: f64,
    /// On-axis intensity relative to the aperture, `ρ0²ρ1²/(4 + ρ0²ρ1²)`.
    pub peak: f64,
    /// Gaussian decay rate of the spot, 1/m².
    pub gamma: f64,
    /// `a + b·(z/q0)²`.
    pub big_a: f64,
}

impl BeamSpot {
    #[inline]
    pub fn intensity(&self, r_sq: f64) -> f64 {
        self.peak * (-self.gamma * r_sq).exp()
    }
}

/// Boundary distribution at the aperture, peak 1.
pub fn boundary_pdf(q_perp: [f64; 2], r_perp: [f64; 2], b: &BeamBoundary) -> f64 {
    let q_sq = q_perp[0] * q_perp[0] + q_perp[1] * q_perp[1];
    let r_sq = r_perp[0] * r_perp[0] + r_perp[1] * r_perp[1];
    (-b.a() * q_sq - b.b() * r_sq).exp()
}

/// Vacuum intensity at `(r_perp, z)` relative to the aperture peak.
pub fn vacuum_intensity(r_perp: [f64; 2], z: f64, b: &BeamBoundary) -> f64 {
    b.at(z).intensity(r_perp[0] * r_perp[0] + r_perp[1] * r_perp[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_widths() {
        let b = BeamBoundary::new(0.01, 0.005, 1e7);
        assert_eq!(boundary_pdf([0.0, 0.0], [0.0, 0.0], &b), 1.0);
        let e = (-1.0f64).exp();
        let v = boundary_pdf([2f64.sqrt() / 0.005, 0.0], [0.0, 0.0], &b);
        assert!((v - e).abs() < 1e-15);
        let v = boundary_pdf([0.0, 0.0], [0.01 / 2f64.sqrt(), 0.0], &b);
        assert!((v - e).abs() < 1e-15);
    }

    #[test]
    fn aperture_peak_is_one() {
        let b = BeamBoundary::new(0.01, 0.01, 1e7);
        assert_eq!(vacuum_intensity([0.0, 0.0], 0.0, &b), 1.0);
    }

    #[test]
    fn peak_matches_fresnel_form() {
        let b = BeamBoundary::new(0.01, 0.004, 1e7);
        let z = 700.0;
        let rr = (0.01f64.powi(2) * 1e7 / z) * (0.004f64.powi(2) * 1e7 / z);
        assert!((b.at(z).peak - rr / (4.0 + rr)).abs() < 1e-14);
    }
}

//! Intensity covariance generated by a single thin turbulent layer.
//!
//! A layer at distance `ζ` from the aperture scatters the beam once; the
//! resulting intensity perturbation at the detector plane `z`, for a
//! refractive-index Fourier mode `κ`, is `D(ρ, κ)·n(κ)`. Its two-point
//! covariance on the detector, normalized by the vacuum on-axis intensity, is
//!
//! ```text
//! b(ζ; 0, ρ) = 2π·q0²·∫d²κ ψ(κ)·D(0, κ)·D*(ρ, κ)
//! ```
//!
//! with, for `Δ = z − ζ`, `h = Δ/2q0`:
//!
//! ```text
//! D(0, κ) = 2·exp(−g·κ²)·sin φ
//! D(ρ, κ) = 2i·exp(i(1−ε)κ·ρ)·exp(−γρ² − g·κ²)·sinh(2γh·κ·ρ − iφ)
//! φ = (1−ε)·κ²Δ/2q0
//! ```

use num_complex::Complex64;

use crate::beam::BeamBoundary;

/// Geometry shared by every layer for a fixed detector distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerKernel {
    pub q0: f64,
    pub z: f64,
    a: f64,
    b: f64,
    big_a: f64,
    /// Spot decay rate at the detector.
    pub gamma: f64,
}

impl LayerKernel {
    pub fn new(beam: &BeamBoundary, z: f64) -> Self {
        let spot = beam.at(z);
        Self {
            q0: beam.q0,
            z,
            a: beam.a(),
            b: beam.b(),
            big_a: spot.big_a,
            gamma: spot.gamma,
        }
    }

    /// Layer at distance `zeta` from the aperture.
    pub fn layer(&self, zeta: f64) -> Layer {
        let delta = self.z - zeta;
        let q0 = self.q0;
        Layer {
            delta,
            h: delta / (2.0 * q0),
            eps: self.b * (self.z / q0) * delta / (q0 * self.big_a),
            g: delta * delta * (1.0 + self.a * self.b) / (4.0 * self.big_a * q0 * q0),
            gamma: self.gamma,
            q0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub delta: f64,
    pub h: f64,
    /// Fraction of the free-space phase cancelled by beam curvature.
    pub eps: f64,
    /// Gaussian damping of the mode amplitude, m².
    pub g: f64,
    pub gamma: f64,
    q0: f64,
}

impl Layer {
    #[inline]
    pub fn phase(&self, kappa_sq: f64) -> f64 {
        (1.0 - self.eps) * kappa_sq * self.delta / (2.0 * self.q0)
    }

    /// `D(0, κ)·D(0, κ)`, the on-axis variance density of one mode.
    #[inline]
    pub fn variance_term(&self, kappa: f64) -> f64 {
        let k2 = kappa * kappa;
        let s = self.phase(k2).sin();
        4.0 * (-2.0 * self.g * k2).exp() * s * s
    }

    /// Real part of `D(0, κ)·D*(ρ, κ)` averaged over `±κ`, where `κ·ρ =
    /// kappa·rho·cos_angle`. The imaginary part cancels exactly in the
    /// average.
    #[inline]
    pub fn covariance_term(&self, kappa: f64, rho: f64, cos_angle: f64) -> f64 {
        let k2 = kappa * kappa;
        let dot = kappa * rho * cos_angle;
        let (sp, cp) = self.phase(k2).sin_cos();
        let w = 2.0 * self.gamma * self.h * dot;
        let (su, cu) = ((1.0 - self.eps) * dot).sin_cos();
        // |w| never exceeds γρ² + 2gκ², so both exponents stay ≤ 0.
        let damp = self.gamma * rho * rho + 2.0 * self.g * k2;
        let up = (w - damp).exp();
        let down = (-w - damp).exp();
        let ch = 0.5 * (up + down);
        let sh = 0.5 * (up - down);
        4.0 * sp * (ch * sp * cu - sh * cp * su)
    }

    /// `variance_term(κ) − covariance_term(κ, ρ, cos_angle)` without the
    /// cancellation that ruins the plain difference at small `ρ`.
    pub fn decorrelation_term(&self, kappa: f64, rho: f64, cos_angle: f64) -> f64 {
        let k2 = kappa * kappa;
        let dot = kappa * rho * cos_angle;
        let (sp, cp) = self.phase(k2).sin_cos();
        let w = 2.0 * self.gamma * self.h * dot;
        let u = (1.0 - self.eps) * dot;
        let (su, cu) = u.sin_cos();
        let g2 = 2.0 * self.g * k2;
        let spatial = self.gamma * rho * rho;
        // e0 − ch·cos u with e0 = e^{−2gκ²} and ch = e0·e^{−γρ²}·cosh w
        let loss = if w.abs() <= 1.0 && cu > 0.0 {
            let half_w = (0.5 * w).sinh();
            let half_u = (0.5 * u).sin();
            let log_p = -spatial + (2.0 * half_w * half_w).ln_1p() + (-2.0 * half_u * half_u).ln_1p();
            -(-g2).exp() * log_p.exp_m1()
        } else {
            let damp = spatial + g2;
            (-g2).exp() - 0.5 * ((w - damp).exp() + (-w - damp).exp()) * cu
        };
        let damp = spatial + g2;
        let sh = 0.5 * ((w - damp).exp() - (-w - damp).exp());
        4.0 * sp * (sp * loss + sh * cp * su)
    }

    /// `D(0, κ)·D*(ρ, κ)` for one orientation, kept complex.
    pub fn covariance_complex(&self, kappa: f64, rho: f64, cos_angle: f64) -> Complex64 {
        let k2 = kappa * kappa;
        let dot = kappa * rho * cos_angle;
        let phi = self.phase(k2);
        let d0 = 2.0 * (-self.g * k2).exp() * phi.sin();
        let w = Complex64::new(2.0 * self.gamma * self.h * dot, -phi);
        let amp = (-self.gamma * rho * rho - self.g * k2).exp();
        let d_rho = Complex64::new(0.0, 2.0)
            * Complex64::from_polar(1.0, (1.0 - self.eps) * dot)
            * amp
            * w.sinh();
        d0 * d_rho.conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer() -> Layer {
        let beam = BeamBoundary::new(0.01, 0.008, 1e7);
        LayerKernel::new(&beam, 900.0).layer(300.0)
    }

    #[test]
    fn symmetrized_complex_form_is_real() {
        let l = layer();
        for &(k, r, c) in &[(150.0, 0.004, 0.3), (800.0, 0.02, -0.9), (40.0, 0.0, 1.0)] {
            let sum = l.covariance_complex(k, r, c) + l.covariance_complex(k, r, -c);
            let real = 0.5 * sum.re;
            assert!(sum.im.abs() <= 1e-12 * sum.re.abs().max(1e-300), "{sum}");
            assert!((real - l.covariance_term(k, r, c)).abs() <= 1e-12 * real.abs().max(1e-12));
        }
    }

    #[test]
    fn zero_separation_gives_variance() {
        let l = layer();
        for k in [10.0, 300.0, 2000.0] {
            let v = l.covariance_term(k, 0.0, 0.7);
            assert!((v - l.variance_term(k)).abs() <= 1e-14 * v.abs().max(1e-300));
        }
    }

    #[test]
    fn decorrelation_matches_difference_and_scales_quadratically() {
        let l = layer();
        for &(k, r, c) in &[(150.0, 0.004, 0.3), (800.0, 0.02, -0.9), (300.0, 0.5, 0.1)] {
            let direct = l.variance_term(k) - l.covariance_term(k, r, c);
            let stable = l.decorrelation_term(k, r, c);
            assert!((direct - stable).abs() <= 1e-9 * direct.abs().max(1e-14), "{direct} vs {stable}");
        }
        let a = l.decorrelation_term(400.0, 1e-9, 0.6);
        let b = l.decorrelation_term(400.0, 2e-9, 0.6);
        assert!(a != 0.0 && (b / a - 4.0).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn far_separation_stays_finite() {
        let l = layer();
        let v = l.covariance_term(5e4, 10.0, 1.0);
        assert!(v.is_finite());
    }
}

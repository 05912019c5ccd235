//! Second-order fluctuation cross term `2Σ⟨δf₁·δf₂⟩` at the beam axis.
//!
//! `δf₂` is the collision operator applied to the first-order fluctuation
//! `δf₁`. A kick `κ′` at distance `z′` displaces the fluctuation pattern laid
//! down by the layers `ζ < z′`, so the cross term is a loss/gain difference
//! of single-layer covariances:
//!
//! ```text
//! x2 = −4πq0² ∫₀^z dz′ ∫d²κ′ ψ(κ′) ∫₀^{z′} dζ [b(ζ; 0, 0) − b(ζ; 0, κ′(z−z′)/q0)]
//! ```
//!
//! With `b` from [`crate::covariance`] the integral has five dimensions
//! (`z′`, `ζ`, `|κ′|`, `|κ|` and the angle between `κ` and `κ′`); the joint
//! azimuth drops out by rotational symmetry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::beam::BeamBoundary;
use crate::covariance::LayerKernel;
use crate::error::{ScintError, Stage};
use crate::params::{DerivedParams, PhysicalParams};
use crate::quadrature::{mc_integrate_vec, Axis, Domain, McOptions, QuadratureResult, TailMap};
use crate::spectrum::SpectrumParams;

/// Target standard error relative to `|x2|`.
pub const PRECISION_TARGET: f64 = 0.02;
/// Largest tolerated imaginary residual relative to the real part.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Exponent of the radial power-law proposal.
pub const RADIAL_EXPONENT: f64 = 3.0;
/// Strata along `z′` and `ζ/z′`.
pub const STRATA: [usize; 2] = [16, 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTermResult {
    /// Cross term divided by the squared vacuum on-axis intensity.
    pub x2_ratio: f64,
    pub quad: QuadratureResult,
    pub sample_seed: u64,
    /// Whether the standard error met [`PRECISION_TARGET`].
    pub precision_ok: bool,
    /// Integrated `|Im|` over integrated `|Re|`.
    pub imaginary_residual: f64,
}

/// The cross-term integrand over `(z′, v, |κ′|, |κ|, α)` with `ζ = v·z′`.
#[derive(Debug, Clone, Copy)]
pub struct CrossTermIntegrand {
    kernel: LayerKernel,
    spectrum: SpectrumParams,
    q0: f64,
    z: f64,
    /// Natural radial scale `min(√(q0/z), 2π/l0)`.
    pub k_scale: f64,
}

impl CrossTermIntegrand {
    pub fn new(d: &DerivedParams, p: &PhysicalParams) -> Self {
        let beam = BeamBoundary::from_params(p, d);
        Self {
            kernel: LayerKernel::new(&beam, p.z),
            spectrum: p.spectrum(),
            q0: p.q0,
            z: p.z,
            k_scale: (p.q0 / p.z).sqrt().min(2.0 * PI / p.l0),
        }
    }

    /// Integration domain; radial axes carry the power-law proposal.
    pub fn domain(&self) -> Domain {
        let radial = Axis::semi_infinite_with(
            0.0,
            TailMap::PowerLaw {
                scale: self.k_scale,
                exponent: RADIAL_EXPONENT,
            },
        );
        Domain::new(vec![
            Axis::finite(0.0, self.z),
            Axis::finite(0.0, 1.0),
            radial,
            radial,
            Axis::finite(0.0, 2.0 * PI),
        ])
    }

    fn prefactor(&self) -> f64 {
        // −4πq0² (collision) · 2πq0² (layer covariance) · 2π (κ′ azimuth)
        -4.0 * PI * self.q0 * self.q0 * 2.0 * PI * self.q0 * self.q0 * 2.0 * PI
    }

    /// Real integrand at `x = (z′, v, |κ′|, |κ|, α)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_with_imaginary(x).0
    }

    /// Real integrand and the residual imaginary part of the `±κ`-averaged
    /// complex product (zero when the complex form would overflow).
    pub fn eval_with_imaginary(&self, x: &[f64]) -> (f64, f64) {
        let (zp, v, kp, kk, alpha) = (x[0], x[1], x[2], x[3], x[4]);
        let psi_p = self.spectrum.eval(kp);
        let psi_k = self.spectrum.eval(kk);
        if psi_p == 0.0 || psi_k == 0.0 {
            return (0.0, 0.0);
        }
        let layer = self.kernel.layer(zp * v);
        let rho = kp * (self.z - zp) / self.q0;
        let cos_a = alpha.cos();
        let bracket = layer.decorrelation_term(kk, rho, cos_a);
        let weight = self.prefactor() * kp * psi_p * kk * psi_k * zp;
        let w = 2.0 * layer.gamma * layer.h * kk * rho;
        let imag = if w.abs() < 300.0 {
            let sum = layer.covariance_complex(kk, rho, cos_a) + layer.covariance_complex(kk, rho, -cos_a);
            0.5 * sum.im * weight
        } else {
            0.0
        };
        (weight * bracket, imag)
    }
}

/// Monte Carlo estimate of the cross term over the five-dimensional domain.
pub fn cross_term_ratio(d: &DerivedParams, p: &PhysicalParams, opts: &McOptions) -> Result<CrossTermResult, ScintError> {
    let integrand = CrossTermIntegrand::new(d, p);
    let opts = McOptions {
        strata: if opts.strata.is_empty() {
            STRATA.to_vec()
        } else {
            opts.strata.clone()
        },
        ..opts.clone()
    };
    let parts = mc_integrate_vec(
        |x, out| {
            let (re, im) = integrand.eval_with_imaginary(x);
            out[0] = re;
            out[1] = im.abs();
            out[2] = re.abs();
        },
        3,
        &integrand.domain(),
        &opts,
    )
    .map_err(ScintError::quad(Stage::CrossTerm))?;
    let quad = parts[0];
    let imaginary_residual = if parts[2].value > 0.0 {
        parts[1].value / parts[2].value
    } else {
        0.0
    };
    if imaginary_residual > IMAGINARY_TOLERANCE {
        return Err(ScintError::Consistency {
            stage: Stage::CrossTerm,
            detail: format!("imaginary residual {imaginary_residual:e} exceeds {IMAGINARY_TOLERANCE:e}"),
        });
    }
    let precision_ok = quad.abs_error_estimate <= PRECISION_TARGET * quad.value.abs();
    Ok(CrossTermResult {
        x2_ratio: quad.value,
        quad,
        sample_seed: opts.seed,
        precision_ok: precision_ok || quad.value == 0.0 && quad.abs_error_estimate == 0.0,
        imaginary_residual,
    })
}

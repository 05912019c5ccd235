//! First-order turbulence correction to the on-axis mean intensity.
//!
//! A collision at distance `z′` transfers a transverse kick `κ` that moves
//! the beam by `κ(z − z′)/q0` at the detector. Losses from the unkicked
//! beam minus gains from the displaced one give, relative to the vacuum
//! on-axis intensity,
//!
//! ```text
//! i1 = −4π²q0² ∫₀^z dz′ ∫ κ ψ(κ) [1 − exp(−γκ²(z−z′)²/q0²)] dκ
//! ```
//!
//! where `γ` is the spot decay rate at the detector. The radial integral is
//! taken in `t = ln(κ_max/κ)` over `[0, ∞)`: its integrand falls off only
//! as `κ^{1/3}` towards `κ = 0`, too slowly for a fixed lower cutoff, but
//! like `e^{−t/3}` in `t`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::beam::BeamBoundary;
use crate::error::{ScintError, Stage};
use crate::params::{DerivedParams, PhysicalParams};
use crate::quadrature::{integrate_nd_with, AdaptiveOptions, Axis, Domain, QuadratureResult, TailMap};

/// Upper kick cutoff in units of `2π/l0`.
pub const KICK_UPPER_MULTIPLE: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityCorrection {
    /// `I1(0, z)/I0(0, z)`.
    pub i1_ratio: f64,
    pub quad: QuadratureResult,
}

/// Largest kick `6·2π/l0`; the inner-scale cutoff of the spectrum is below
/// `e⁻³⁶` there.
pub fn kick_upper(p: &PhysicalParams) -> f64 {
    KICK_UPPER_MULTIPLE * 2.0 * PI / p.l0
}

pub fn intensity_correction_ratio(
    d: &DerivedParams,
    p: &PhysicalParams,
    rel_tol: f64,
) -> Result<IntensityCorrection, ScintError> {
    let spectrum = p.spectrum();
    let gamma = BeamBoundary::from_params(p, d).at(p.z).gamma;
    let k_hi = kick_upper(p);
    let domain = Domain::new(vec![
        Axis::finite(0.0, p.z),
        Axis::semi_infinite_with(0.0, TailMap::Exponential { scale: 3.0 }),
    ]);
    let q0 = p.q0;
    let z = p.z;
    let quad = integrate_nd_with(
        |x| {
            let kappa = k_hi * (-x[1]).exp();
            let shift = kappa * (z - x[0]) / q0;
            kappa * kappa * spectrum.eval(kappa) * -(-gamma * shift * shift).exp_m1()
        },
        &domain,
        &AdaptiveOptions::new(rel_tol, 0.0),
    )
    .map_err(ScintError::quad(Stage::IntensityCorrection))?
    .scaled(-4.0 * PI * PI * q0 * q0);
    if quad.value > 0.0 {
        return Err(ScintError::Consistency {
            stage: Stage::IntensityCorrection,
            detail: format!("on-axis intensity correction is positive ({:e})", quad.value),
        });
    }
    Ok(IntensityCorrection {
        i1_ratio: quad.value,
        quad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_kick() {
        let p = PhysicalParams {
            cn2: 1e-14,
            l0: 2.0 * PI * 1e-3,
            outer_scale: f64::INFINITY,
            q0: 1e7,
            z: 1000.0,
            r0: 0.01,
            lambda_c: f64::INFINITY,
        };
        assert!((kick_upper(&p) - 6000.0).abs() < 1e-9);
    }
}

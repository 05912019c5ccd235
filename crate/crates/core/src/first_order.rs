//! Rytov-like first-order term `σ1²·L` and the aperture factor `L`.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{ScintError, Stage};
use crate::params::{DerivedParams, PhysicalParams};
use crate::quadrature::{AdaptiveOptions, Axis, Method, QuadratureResult, TailMap};

/// Normalization making `L → 1` for a plane wave.
pub const PLANE_WAVE_NORMALIZATION: f64 = 4.24;

/// Below this damping the plane-wave value `L = 1` is returned.
pub const PLANE_WAVE_BRACKET: f64 = 1e-12;

/// Largest phase-to-damping ratio integrated numerically in `χ`; beyond it
/// the inner integral is taken in closed form.
pub const MAX_NUMERIC_PHASE_RATIO: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderResult {
    pub big_l: f64,
    pub sigma2_first: f64,
    pub quad: QuadratureResult,
}

/// Coefficients of the `χ²` terms at one value of `τ`.
#[derive(Debug, Clone, Copy)]
struct Slice {
    /// Gaussian damping `q0·l0²/4π²z + τ²(ρ0²+ρ1²)/(4+ρ0²ρ1²)`.
    damping: f64,
    /// Phase `τ/2 − 2τ²/(4+ρ0²ρ1²)`.
    phase: f64,
}

fn slice(d: &DerivedParams, tau: f64) -> Slice {
    let denom = 4.0 + d.rho_product();
    Slice {
        damping: d.inner_scale_term + tau * tau * (d.rho0_sq + d.rho1_sq) / denom,
        phase: tau / 2.0 - 2.0 * tau * tau / denom,
    }
}

/// `∫₀^∞ χ^{−8/3} e^{−Bχ²} sin²(aχ²) dχ` through the Gamma-function identity.
fn inner_closed(s: Slice) -> f64 {
    let nu = -5.0 / 6.0;
    let b = s.damping;
    let a2 = 2.0 * s.phase.abs();
    let modulus = (b * b + a2 * a2).powf(-nu / 2.0);
    0.25 * libm::tgamma(nu) * (b.powf(-nu) - modulus * (nu * a2.atan2(b)).cos())
}

/// The aperture factor `L(z, ρ0, ρ1)`, `χ` inner and `τ` outer.
pub fn big_l(d: &DerivedParams, _p: &PhysicalParams, rel_tol: f64) -> Result<FirstOrderResult, ScintError> {
    if !(rel_tol > 1e-10 && rel_tol < 1e-2) {
        return Err(ScintError::InvalidInput {
            stage: Stage::FirstOrder,
            detail: format!("rel_tol must lie in (1e-10, 1e-2), got {rel_tol}"),
        });
    }
    if slice(d, 1.0).damping < PLANE_WAVE_BRACKET {
        return Ok(FirstOrderResult {
            big_l: 1.0,
            sigma2_first: d.sigma1_sq,
            quad: QuadratureResult {
                value: 1.0,
                abs_error_estimate: 0.0,
                evaluations: 1,
                method: Method::Nested2d,
            },
        });
    }
    let outer = AdaptiveOptions::new(rel_tol, 0.0);
    let inner = AdaptiveOptions::new(rel_tol / 5.0, 0.0);
    let evaluations = Cell::new(0u64);
    let per_tau = |tau: f64| -> Result<(f64, f64), crate::quadrature::QuadError> {
        let s = slice(d, tau);
        if s.phase == 0.0 {
            return Ok((0.0, 0.0));
        }
        if s.phase.abs() > MAX_NUMERIC_PHASE_RATIO * s.damping {
            evaluations.set(evaluations.get() + 1);
            let v = inner_closed(s);
            return Ok((v, 4.0 * f64::EPSILON * v.abs()));
        }
        // u = χ²: ½·u^{−11/6}·e^{−Bu}·sin²(au), Gaussian envelope becomes exponential.
        let axis = Axis::semi_infinite_with(0.0, TailMap::Exponential { scale: 1.0 / s.damping });
        let r = crate::quadrature::integrate_axis(
            |u| {
                let sn = (s.phase * u).sin();
                0.5 * u.powf(-11.0 / 6.0) * (-s.damping * u).exp() * sn * sn
            },
            axis,
            &inner,
        )?;
        evaluations.set(evaluations.get() + r.evaluations);
        Ok((r.value, r.abs_error_estimate))
    };
    let (value, error, _) = crate::quadrature::adapt_on_axis(per_tau, Axis::finite(0.0, 1.0), &outer)
        .map_err(ScintError::quad(Stage::FirstOrder))?;
    let big_l = PLANE_WAVE_NORMALIZATION * value;
    Ok(FirstOrderResult {
        big_l,
        sigma2_first: d.sigma1_sq * big_l,
        quad: QuadratureResult {
            value: big_l,
            abs_error_estimate: PLANE_WAVE_NORMALIZATION * error,
            evaluations: evaluations.get(),
            method: Method::Nested2d,
        },
    })
}

/// `σ1²·L`.
pub fn sigma2_first_order(d: &DerivedParams, p: &PhysicalParams, rel_tol: f64) -> Result<FirstOrderResult, ScintError> {
    big_l(d, p, rel_tol)
}

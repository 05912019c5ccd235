use std::cell::Cell;

use super::gauss_kronrod::adapt_on_axis;
use super::{AdaptiveOptions, Axis, Domain, Method, QuadError, QuadratureResult};

const MAX_NESTED: usize = 3;

/// Nested adaptive quadrature over up to three axes with `abs_tol = 0`.
pub fn integrate_nd<F>(f: F, domain: &Domain, rel_tol: f64) -> Result<QuadratureResult, QuadError>
where
    F: Fn(&[f64]) -> f64,
{
    integrate_nd_with(f, domain, &AdaptiveOptions::new(rel_tol, 0.0))
}

/// Nested adaptive quadrature: the innermost axis is the last one.
///
/// Inner integrals run at a fifth of the outer tolerances. The budget bounds
/// the evaluations of each one-dimensional sweep. Inner error estimates are
/// integrated along the outer axes and included in the reported error.
pub fn integrate_nd_with<F>(f: F, domain: &Domain, opts: &AdaptiveOptions) -> Result<QuadratureResult, QuadError>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = domain.dimension();
    if dim > MAX_NESTED {
        return Err(QuadError::UnsupportedDimension(dim));
    }
    domain.validate()?;
    opts.validate()?;
    let evaluations = Cell::new(0u64);
    let level = Level {
        f: &f,
        axes: &domain.axes,
        evaluations: &evaluations,
    };
    let (value, error, _) = level.integrate(0, [0.0; MAX_NESTED], opts)?;
    let method = match dim {
        1 => Method::Adaptive1d,
        2 => Method::Nested2d,
        _ => Method::Nested3d,
    };
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations: evaluations.get(),
        method,
    })
}

struct Level<'a, F> {
    f: &'a F,
    axes: &'a [Axis],
    evaluations: &'a Cell<u64>,
}

impl<F: Fn(&[f64]) -> f64> Level<'_, F> {
    fn integrate(&self, depth: usize, point: [f64; MAX_NESTED], opts: &AdaptiveOptions) -> Result<(f64, f64, u64), QuadError> {
        let dim = self.axes.len();
        let inner_opts = AdaptiveOptions {
            rel_tol: opts.rel_tol / 5.0,
            abs_tol: opts.abs_tol / 5.0,
            ..*opts
        };
        adapt_on_axis(
            |x| {
                let mut p = point;
                p[depth] = x;
                if depth + 1 == dim {
                    self.evaluations.set(self.evaluations.get() + 1);
                    let v = (self.f)(&p[..dim]);
                    if v.is_finite() {
                        Ok((v, 0.0))
                    } else {
                        Err(QuadError::NonFinite {
                            coordinate: p[..dim].to_vec(),
                            value: v,
                        })
                    }
                } else {
                    let (v, e, _) = self.integrate(depth + 1, p, &inner_opts)?;
                    Ok((v, e))
                }
            },
            self.axes[depth],
            opts,
        )
    }
}

use serde::{Deserialize, Serialize};

use super::QuadError;

/// Substitution mapping the unit interval onto `[lower, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailMap {
    /// `x = lower + s·u/(1−u)`; suits power-law tails.
    Algebraic { scale: f64 },
    /// `x = lower − s·ln(1−u)`; suits exponential and Gaussian tails.
    Exponential { scale: f64 },
    /// `x = lower + s·(u/(1−u))^m`. With `m > 1` it also concentrates nodes
    /// near `lower`, which tames integrable singularities there.
    PowerLaw { scale: f64, exponent: f64 },
    /// Inverse CDF of the Rayleigh law of scale `s`; the implied density is
    /// proportional to `x·exp(−x²/2s²)`.
    Rayleigh { scale: f64 },
}

impl TailMap {
    pub fn algebraic() -> Self {
        TailMap::Algebraic { scale: 1.0 }
    }

    fn scale(&self) -> f64 {
        match *self {
            TailMap::Algebraic { scale }
            | TailMap::Exponential { scale }
            | TailMap::PowerLaw { scale, .. }
            | TailMap::Rayleigh { scale } => scale,
        }
    }

    /// Offset from the lower bound and Jacobian for `u ∈ (0, 1)`.
    #[inline]
    pub fn offset(&self, u: f64) -> (f64, f64) {
        let w = 1.0 - u;
        match *self {
            TailMap::Algebraic { scale } => (scale * u / w, scale / (w * w)),
            TailMap::Exponential { scale } => (-scale * w.ln(), scale / w),
            TailMap::PowerLaw { scale, exponent } => {
                let ratio = u / w;
                let x = scale * ratio.powf(exponent);
                // dx/du = m·x/(u·w)
                (x, exponent * x / (u * w))
            }
            TailMap::Rayleigh { scale } => {
                let x = scale * (-2.0 * w.ln()).sqrt();
                (x, scale * scale / (x * w))
            }
        }
    }
}

/// One integration axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    Finite { lower: f64, upper: f64 },
    SemiInfinite { lower: f64, map: TailMap },
    /// The whole real line through `x = t/(1−t²)`, `t = 2u − 1`.
    Infinite,
}

impl Axis {
    pub fn finite(lower: f64, upper: f64) -> Self {
        Axis::Finite { lower, upper }
    }

    /// `[lower, ∞)` with the default algebraic substitution.
    pub fn semi_infinite(lower: f64) -> Self {
        Axis::SemiInfinite {
            lower,
            map: TailMap::algebraic(),
        }
    }

    pub fn semi_infinite_with(lower: f64, map: TailMap) -> Self {
        Axis::SemiInfinite { lower, map }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        match *self {
            Axis::Finite { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite()) {
                    return Err(QuadError::InvalidDomain(format!(
                        "finite axis needs finite bounds, got [{lower}, {upper}]"
                    )));
                }
                if lower >= upper {
                    return Err(QuadError::InvalidDomain(format!(
                        "lower bound {lower} is not below upper bound {upper}"
                    )));
                }
            }
            Axis::SemiInfinite { lower, map } => {
                if !lower.is_finite() {
                    return Err(QuadError::InvalidDomain(format!(
                        "semi-infinite axis needs a finite lower bound, got {lower}"
                    )));
                }
                let s = map.scale();
                if !(s.is_finite() && s > 0.0) {
                    return Err(QuadError::InvalidDomain(format!(
                        "tail map scale must be positive, got {s}"
                    )));
                }
                if let TailMap::PowerLaw { exponent, .. } = map {
                    if !(exponent.is_finite() && exponent > 0.0) {
                        return Err(QuadError::InvalidDomain(format!(
                            "power-law exponent must be positive, got {exponent}"
                        )));
                    }
                }
            }
            Axis::Infinite => {}
        }
        Ok(())
    }

    /// Map `u ∈ (0, 1)` to a point of the axis, returning `(x, dx/du)`.
    #[inline]
    pub fn map_unit(&self, u: f64) -> (f64, f64) {
        match *self {
            Axis::Finite { lower, upper } => (lower + (upper - lower) * u, upper - lower),
            Axis::SemiInfinite { lower, map } => {
                let (dx, jac) = map.offset(u);
                (lower + dx, jac)
            }
            Axis::Infinite => {
                let t = 2.0 * u - 1.0;
                let w = 1.0 - t * t;
                (t / w, 2.0 * (1.0 + t * t) / (w * w))
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Axis::Finite { .. })
    }
}

/// Product of 1 to 6 axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub axes: Vec<Axis>,
}

impl Domain {
    pub const MAX_DIMENSION: usize = 6;

    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes }
    }

    /// Unit hypercube `[0, 1]^dim`.
    pub fn unit_cube(dim: usize) -> Self {
        Self::new(vec![Axis::finite(0.0, 1.0); dim])
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let n = self.axes.len();
        if n == 0 || n > Self::MAX_DIMENSION {
            return Err(QuadError::InvalidDomain(format!(
                "dimension must be between 1 and {}, got {n}",
                Self::MAX_DIMENSION
            )));
        }
        self.axes.iter().try_for_each(Axis::validate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_hit_expected_points() {
        let (x, j) = Axis::finite(2.0, 4.0).map_unit(0.25);
        assert_eq!((x, j), (2.5, 2.0));

        let (x, j) = Axis::semi_infinite(1.0).map_unit(0.5);
        assert_eq!((x, j), (2.0, 4.0));

        let (x, _) = Axis::Infinite.map_unit(0.5);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let maps = [
            TailMap::Algebraic { scale: 2.0 },
            TailMap::Exponential { scale: 0.5 },
            TailMap::PowerLaw {
                scale: 3.0,
                exponent: 3.0,
            },
            TailMap::Rayleigh { scale: 1.5 },
        ];
        for map in maps {
            let axis = Axis::semi_infinite_with(0.0, map);
            for &u in &[0.1, 0.4, 0.8] {
                let h = 1e-6;
                let (_, jac) = axis.map_unit(u);
                let fd = (axis.map_unit(u + h).0 - axis.map_unit(u - h).0) / (2.0 * h);
                assert!((jac - fd).abs() < 1e-5 * jac.abs(), "{map:?} at {u}");
            }
        }
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(Domain::new(vec![]).validate().is_err());
        assert!(Domain::unit_cube(7).validate().is_err());
        assert!(Domain::new(vec![Axis::finite(1.0, 1.0)]).validate().is_err());
        assert!(Axis::semi_infinite_with(0.0, TailMap::Algebraic { scale: -1.0 })
            .validate()
            .is_err());
    }
}

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Axis, Domain, Method, QuadError, QuadratureResult, TailMap, DEFAULT_MC_SAMPLES};

/// Sampling density placed on every semi-infinite axis, overriding the
/// axis' own map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Importance {
    /// Keep the substitution declared on each axis.
    Uniform,
    /// Rayleigh radial density `∝ x·exp(−x²/2s²)`.
    GaussianRadial { scale: f64 },
    /// Heavy-tailed `x = s·(u/(1−u))^m`.
    PowerLawRadial { scale: f64, exponent: f64 },
}

impl Importance {
    fn apply(&self, axis: Axis) -> Axis {
        match (*self, axis) {
            (Importance::GaussianRadial { scale }, Axis::SemiInfinite { lower, .. }) => {
                Axis::semi_infinite_with(lower, TailMap::Rayleigh { scale })
            }
            (Importance::PowerLawRadial { scale, exponent }, Axis::SemiInfinite { lower, .. }) => {
                Axis::semi_infinite_with(lower, TailMap::PowerLaw { scale, exponent })
            }
            _ => axis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    /// Strata per axis, leading axes first; missing entries count as 1.
    pub strata: Vec<usize>,
    pub importance: Option<Importance>,
}

impl McOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            strata: Vec::new(),
            importance: None,
        }
    }

    pub fn with_strata(mut self, strata: Vec<usize>) -> Self {
        self.strata = strata;
        self
    }

    pub fn with_importance(mut self, importance: Importance) -> Self {
        self.importance = Some(importance);
        self
    }
}

impl Default for McOptions {
    fn default() -> Self {
        Self::new(DEFAULT_MC_SAMPLES, 0)
    }
}

/// Independent ChaCha8 stream for one stratum.
pub fn stratum_rng(seed: u64, stratum: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stratum);
    rng
}

#[inline]
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

struct CellSums {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

/// Stratified Monte Carlo estimate of a vector-valued integrand.
///
/// `f` writes `outputs` components into its second argument. Each stratum
/// draws from its own stream, so the result is identical for any thread
/// count. The error estimate of each component is the standard error of the
/// stratified mean.
pub fn mc_integrate_vec<F>(
    f: F,
    outputs: usize,
    domain: &Domain,
    opts: &McOptions,
) -> Result<Vec<QuadratureResult>, QuadError>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    domain.validate()?;
    let dim = domain.dimension();
    if outputs == 0 {
        return Err(QuadError::InvalidOptions("integrand has no outputs".into()));
    }
    if opts.strata.len() > dim || opts.strata.contains(&0) {
        return Err(QuadError::InvalidOptions(format!(
            "strata {:?} do not fit a {dim}-dimensional domain",
            opts.strata
        )));
    }
    if let Some(imp) = opts.importance {
        let bad = match imp {
            Importance::Uniform => false,
            Importance::GaussianRadial { scale } => !(scale.is_finite() && scale > 0.0),
            Importance::PowerLawRadial { scale, exponent } => {
                !(scale.is_finite() && scale > 0.0 && exponent.is_finite() && exponent > 0.0)
            }
        };
        if bad {
            return Err(QuadError::InvalidOptions(format!("bad importance density {imp:?}")));
        }
    }
    let axes: Vec<Axis> = domain
        .axes
        .iter()
        .map(|&a| opts.importance.map_or(a, |imp| imp.apply(a)))
        .collect();
    let mut strata = opts.strata.clone();
    strata.resize(dim, 1);
    let cells: usize = strata.iter().product();
    let per_cell = (opts.samples as usize).div_ceil(cells).max(2);

    let run_cell = |cell: usize| -> Result<CellSums, QuadError> {
        let mut rng = stratum_rng(opts.seed, cell as u64);
        let mut index = vec![0usize; dim];
        let mut rem = cell;
        for d in (0..dim).rev() {
            index[d] = rem % strata[d];
            rem /= strata[d];
        }
        let mut x = vec![0.0; dim];
        let mut out = vec![0.0; outputs];
        let mut sums = CellSums {
            sum: vec![0.0; outputs],
            sum_sq: vec![0.0; outputs],
        };
        for _ in 0..per_cell {
            let mut jac = 1.0 / cells as f64;
            for d in 0..dim {
                let u = (index[d] as f64 + open_unit(&mut rng)) / strata[d] as f64;
                let (xd, j) = axes[d].map_unit(u);
                x[d] = xd;
                jac *= j;
            }
            out.iter_mut().for_each(|o| *o = 0.0);
            f(&x, &mut out);
            for (k, &v) in out.iter().enumerate() {
                if !v.is_finite() {
                    return Err(QuadError::NonFinite {
                        coordinate: x.clone(),
                        value: v,
                    });
                }
                let w = if v == 0.0 { 0.0 } else { v * jac };
                if !w.is_finite() {
                    return Err(QuadError::NonFinite {
                        coordinate: x.clone(),
                        value: w,
                    });
                }
                sums.sum[k] += w;
                sums.sum_sq[k] += w * w;
            }
        }
        Ok(sums)
    };

    let per_cell_sums: Vec<CellSums> = (0..cells)
        .into_par_iter()
        .map(run_cell)
        .collect::<Result<_, _>>()?;

    let n = per_cell as f64;
    let evaluations = (per_cell * cells) as u64;
    let results = (0..outputs)
        .map(|k| {
            // Fixed reduction order keeps the sum independent of scheduling.
            let (value, variance) = per_cell_sums.iter().fold((0.0, 0.0), |(v, var), s| {
                let mean = s.sum[k] / n;
                let cell_var = ((s.sum_sq[k] / n - mean * mean).max(0.0)) * n / (n - 1.0);
                (v + s.sum[k], var + cell_var / n)
            });
            QuadratureResult {
                value: value / n,
                abs_error_estimate: variance.sqrt(),
                evaluations,
                method: Method::MonteCarlo,
            }
        })
        .collect();
    Ok(results)
}

/// Scalar stratified Monte Carlo.
pub fn mc_integrate<F>(f: F, domain: &Domain, opts: &McOptions) -> Result<QuadratureResult, QuadError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    mc_integrate_vec(|x, out| out[0] = f(x), 1, domain, opts).map(|mut v| v.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_cube_polynomial() {
        let opts = McOptions::new(200_000, 7).with_strata(vec![8, 8]);
        let r = mc_integrate(|x| x[0] * x[1] + x[2], &Domain::unit_cube(3), &opts).unwrap();
        assert!((r.value - 0.75).abs() < 4.0 * r.abs_error_estimate, "{r:?}");
        assert!(r.abs_error_estimate < 2e-3);
        assert_eq!(r.method, Method::MonteCarlo);
    }

    #[test]
    fn identical_across_thread_counts() {
        let domain = Domain::new(vec![Axis::finite(0.0, 1.0), Axis::semi_infinite(0.0)]);
        let opts = McOptions::new(50_000, 42).with_strata(vec![16]);
        let f = |x: &[f64]| (-x[1]).exp() * x[0].sin();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_integrate(f, &domain, &opts).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.abs_error_estimate.to_bits(), b.abs_error_estimate.to_bits());
    }

    #[test]
    fn gaussian_importance_is_exact_for_rayleigh_weight() {
        // ∫₀^∞ x·exp(−x²/2) dx = 1 and the Rayleigh density matches it exactly.
        let domain = Domain::new(vec![Axis::semi_infinite(0.0)]);
        let opts = McOptions::new(1_000, 1).with_importance(Importance::GaussianRadial { scale: 1.0 });
        let r = mc_integrate(|x| x[0] * (-0.5 * x[0] * x[0]).exp(), &domain, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.abs_error_estimate < 1e-12);
    }

    #[test]
    fn power_law_importance_handles_singularity() {
        // ∫₀^∞ x^{-2/3} e^{-x} dx = Γ(1/3)
        let domain = Domain::new(vec![Axis::semi_infinite(0.0)]);
        let opts = McOptions::new(400_000, 3).with_importance(Importance::PowerLawRadial {
            scale: 1.0,
            exponent: 3.0,
        });
        let r = mc_integrate(|x| x[0].powf(-2.0 / 3.0) * (-x[0]).exp(), &domain, &opts).unwrap();
        let gamma_third = 2.678_938_534_707_747_6;
        assert!((r.value - gamma_third).abs() < 5.0 * r.abs_error_estimate, "{r:?}");
        assert!(r.relative_error() < 5e-3);
    }

    #[test]
    fn vector_outputs_share_samples() {
        let opts = McOptions::new(100_000, 9).with_strata(vec![32]);
        let rs = mc_integrate_vec(
            |x, out| {
                out[0] = (2.0 * PI * x[0]).cos().powi(2);
                out[1] = 1.0;
            },
            2,
            &Domain::unit_cube(1),
            &opts,
        )
        .unwrap();
        assert!((rs[0].value - 0.5).abs() < 5e-3);
        assert!((rs[1].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nan_reports_coordinate() {
        let opts = McOptions::new(1_000, 0);
        let err = mc_integrate(|x| if x[0] > 0.9 { f64::NAN } else { 0.0 }, &Domain::unit_cube(2), &opts)
            .unwrap_err();
        match err {
            QuadError::NonFinite { coordinate, .. } => {
                assert_eq!(coordinate.len(), 2);
                assert!(coordinate[0] > 0.9);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_bad_options() {
        let d = Domain::unit_cube(2);
        assert!(mc_integrate(|_| 1.0, &d, &McOptions::new(10, 0).with_strata(vec![1, 2, 3])).is_err());
        assert!(mc_integrate(|_| 1.0, &d, &McOptions::new(10, 0).with_strata(vec![0])).is_err());
    }
}

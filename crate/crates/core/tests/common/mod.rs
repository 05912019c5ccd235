//! Independent reference evaluations shared by several test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use rand_distr::{Distribution, Normal};
use scint_core::beam::BeamBoundary;
use scint_core::cross_term::CrossTermIntegrand;
use scint_core::kinetic::{GridSpec, PdfGrid};
use scint_core::params::{derive_params, PhysicalParams};
use scint_core::quadrature::{integrate_nd_with, AdaptiveOptions, Domain, GaussLegendre};

pub fn fig2(cn2: f64, z: f64) -> PhysicalParams {
    PhysicalParams {
        cn2,
        l0: 2.0 * PI * 1e-3,
        outer_scale: f64::INFINITY,
        q0: 1e7,
        z,
        r0: 0.01,
        lambda_c: f64::INFINITY,
    }
}

/// `1 − sin x/x` without cancellation for small arguments.
pub fn one_minus_sinc(x: f64) -> f64 {
    let x2 = x * x;
    if x2 < 1e-2 {
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        1.0 - x.sin() / x
    }
}

/// Unreduced sampling over aperture wave vector `q`, aperture frequency `k`
/// and kick `k′`, the cosine weight standing in for the vacuum beam.
pub fn brute_force(p: &PhysicalParams, n: usize, seed: u64) -> (f64, f64) {
    let d = derive_params(p).unwrap();
    let b = BeamBoundary::from_params(p, &d);
    let (a, bb) = (b.a(), b.b());
    let zq = p.z / p.q0;
    let big_a = a + bb * zq * zq;
    let nq = Normal::new(0.0, (0.5 / a).sqrt()).unwrap();
    let nk = Normal::new(0.0, (2.0 * bb).sqrt()).unwrap();
    let s = p.spectrum();
    let k_hi = 6.0 * 2.0 * PI / p.l0;
    let k_lo = 1e-18 * (p.q0 / p.z).sqrt();
    let span = (k_hi / k_lo).ln();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut acc, mut acc2) = (0.0, 0.0);
    for _ in 0..n {
        let q = [nq.sample(&mut rng), nq.sample(&mut rng)];
        let k = [nk.sample(&mut rng), nk.sample(&mut rng)];
        let kappa = k_lo * (span * rng.gen::<f64>()).exp();
        let phi = 2.0 * PI * rng.gen::<f64>();
        let kp = [kappa * phi.cos(), kappa * phi.sin()];
        let x = (k[0] * kp[0] + k[1] * kp[1]) * zq;
        let weight = ((k[0] * q[0] + k[1] * q[1]) * zq).cos() * big_a / a;
        // d²k′ = κ²·span·2π per unit of the two uniform draws
        let v = weight * one_minus_sinc(x) * kappa * kappa * span * 2.0 * PI * s.eval(kappa);
        acc += v;
        acc2 += v * v;
    }
    let mean = acc / n as f64;
    let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
    let scale = -2.0 * PI * p.q0 * p.q0 * p.z;
    (scale * mean, scale.abs() * se)
}

/// Gauss–Legendre over `(z′, v)` around adaptive nested quadrature over
/// `(|κ′|, |κ|, α)`.
pub fn nested(p: &PhysicalParams, order: usize, scale: f64) -> (f64, f64) {
    let f = CrossTermIntegrand::new(&derive_params(p).unwrap(), p);
    let axes = f.domain().axes;
    let inner = Domain::new(axes[2..].to_vec());
    let gl = GaussLegendre::new(order);
    let opts = AdaptiveOptions::new(1e-4, 1e-5 * scale / p.z);
    let (mut value, mut error) = (0.0, 0.0);
    for (zp, wz) in gl.on_interval(0.0, p.z) {
        for (v, wv) in gl.on_interval(0.0, 1.0) {
            let r = integrate_nd_with(|x| f.eval(&[zp, v, x[0], x[1], x[2]]), &inner, &opts).unwrap();
            value += wz * wv * r.value;
            error += wz * wv * r.abs_error_estimate;
        }
    }
    (value, error)
}

/// Sum of a few Gaussian blobs well inside a grid of half-width `extent`.
pub fn random_blobs(seed: u64, extent: f64) -> PdfGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(1..5))
        .map(|_| {
            let w = extent * rng.gen_range(0.03..0.07);
            let cx = extent * rng.gen_range(-0.3..0.3);
            let cy = extent * rng.gen_range(-0.3..0.3);
            (rng.gen_range(0.2..2.0), cx, cy, w)
        })
        .collect();
    let spec = GridSpec::new(extent, 128).unwrap();
    PdfGrid::from_fn(spec, |x, y| {
        blobs
            .iter()
            .map(|&(a, cx, cy, w)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp())
            .sum()
    })
}

mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use scint_core::beam::BeamBoundary;
use scint_core::intensity::*;
use scint_core::params::*;

fn reduced(p: &PhysicalParams, tol: f64) -> IntensityCorrection {
    intensity_correction_ratio(&derive_params(p).unwrap(), p, tol).unwrap()
}

fn gamma(p: &PhysicalParams) -> f64 {
    BeamBoundary::from_params(p, &derive_params(p).unwrap()).at(p.z).gamma
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Kick integral done with the Gamma function, leaving a smooth `z′` integral.
fn closed_form_kicks(p: &PhysicalParams) -> f64 {
    let g = gamma(p);
    let c = (p.l0 / (2.0 * PI)).powi(2);
    let half_gamma = -0.5 * libm::tgamma(-5.0 / 6.0);
    let inner = |zp: f64| {
        let beta = g * (p.z - zp).powi(2) / (p.q0 * p.q0);
        half_gamma * ((beta + c).powf(5.0 / 6.0) - c.powf(5.0 / 6.0))
    };
    -4.0 * PI * PI * p.q0 * p.q0 * 0.033 * p.cn2 * simpson(inner, 0.0, p.z, 20_000)
}

/// Time integral done first as a `sin x/x` kernel, then averaged over the
/// Gaussian spread of kick projections.
fn sinc_form(p: &PhysicalParams) -> f64 {
    let sd = (2.0 * gamma(p)).sqrt();
    let s = p.spectrum();
    let zq = p.z / p.q0;
    let g_max = 12.0 * sd;
    // trapezoid over g, at least ten nodes per radian of the sinc argument
    let loss = |kappa: f64| -> f64 {
        let nodes = ((20.0 * g_max * kappa * zq) as usize).max(800) | 1;
        let hg = 2.0 * g_max / (nodes - 1) as f64;
        (0..nodes)
            .map(|i| {
                let g = -g_max + i as f64 * hg;
                let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
                let density = (-g * g / (2.0 * sd * sd)).exp() / (sd * (2.0 * PI).sqrt());
                let x = g * kappa * zq;
                w * hg * density * one_minus_sinc(x)
            })
            .sum()
    };
    let (lo, hi) = ((1e-12 * (p.q0 / p.z).sqrt()).ln(), (6.0 * 2.0 * PI / p.l0).ln());
    let radial = simpson(
        |t| {
            let k = t.exp();
            k * k * s.eval(k) * loss(k)
        },
        lo,
        hi,
        2000,
    );
    -4.0 * PI * PI * p.q0 * p.q0 * p.z * radial
}

fn reference_points() -> Vec<PhysicalParams> {
    vec![
        fig2(1e-14, 300.0),
        fig2(1e-14, 1000.0),
        fig2(1e-14, 1000.0).with_sigma1_sq(0.75),
    ]
}

#[test]
fn kick_integral_in_closed_form() {
    let mut points = reference_points();
    points.push(PhysicalParams {
        lambda_c: 0.006,
        l0: 3e-3,
        ..fig2(5e-15, 700.0)
    });
    for p in &points {
        let r = reduced(p, 1e-9);
        let want = closed_form_kicks(p);
        assert!((r.i1_ratio / want - 1.0).abs() < 1e-6, "z = {}: {} vs {want}", p.z, r.i1_ratio);
    }
}

#[test]
fn sinc_kernel_form() {
    for p in &reference_points() {
        let r = reduced(p, 1e-9);
        let want = sinc_form(p);
        assert!((r.i1_ratio / want - 1.0).abs() < 1e-4, "z = {}: {} vs {want}", p.z, r.i1_ratio);
    }
}

#[test]
fn unreduced_sampling() {
    for (i, p) in reference_points().iter().enumerate() {
        let r = reduced(p, 1e-8);
        let (mc, se) = brute_force(p, 10_000_000, 77 + i as u64);
        assert!((mc - r.i1_ratio).abs() < 3.0 * se, "z = {}: {mc} ± {se} vs {}", p.z, r.i1_ratio);
        assert!(se < 0.02 * mc.abs(), "{se} vs {mc}");
    }
}

#[test]
fn denominator_enhancement_at_moderate_turbulence() {
    let p = fig2(1e-14, 1000.0).with_sigma1_sq(0.75);
    let r = reduced(&p, 1e-8);
    assert!(r.i1_ratio < 0.0 && 1.0 + r.i1_ratio > 0.0);
    assert!(1.0 / (1.0 + r.i1_ratio).powi(2) >= 1.1, "{}", r.i1_ratio);
}

#[test]
fn quiet_channel_gives_zero() {
    assert_eq!(reduced(&fig2(0.0, 900.0), 1e-8).i1_ratio, 0.0);
}

#[test]
fn vanishes_near_the_aperture() {
    let values: Vec<f64> = [100.0, 10.0, 1.0, 0.1].iter().map(|&z| reduced(&fig2(1e-14, z), 1e-8).i1_ratio.abs()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    assert!(values[3] < 1e-8, "{values:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_structure_constant(z in 50.0f64..1500.0, s in 0.05f64..20.0) {
        let a = reduced(&fig2(1e-15, z), 1e-8).i1_ratio;
        let b = reduced(&fig2(1e-15 * s, z), 1e-8).i1_ratio;
        prop_assert!(a < 0.0);
        prop_assert!((b - s * a).abs() <= 1e-12 * b.abs(), "{} vs {}", b, s * a);
    }

    #[test]
    fn stronger_turbulence_depletes_more(z in 50.0f64..1500.0, s in 1.01f64..20.0) {
        let a = reduced(&fig2(1e-15, z), 1e-8).i1_ratio;
        let b = reduced(&fig2(1e-15 * s, z), 1e-8).i1_ratio;
        prop_assert!(b < a);
    }
}

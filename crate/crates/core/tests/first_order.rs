use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use scint_core::first_order::*;
use scint_core::params::*;

fn fig2(cn2: f64, z: f64) -> PhysicalParams {
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

fn derived(rho0_sq: f64, rho1_sq: f64, inner: f64) -> DerivedParams {
    DerivedParams {
        sigma1_sq: 0.4,
        rho0_sq,
        rho1_sq,
        r1: 0.01,
        t: 1e-6,
        omega0: 3e15,
        inner_scale_term: inner,
    }
}

fn l_of(d: &DerivedParams, tol: f64) -> FirstOrderResult {
    big_l(d, &fig2(1e-14, 1000.0), tol).unwrap()
}

/// Direct sampling of the (τ, u = χ²) integrand with a Pareto proposal in `u`
/// whose scale follows the local oscillation period.
fn sampled_l(d: &DerivedParams, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let denom = 4.0 + d.rho0_sq * d.rho1_sq;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let tau: f64 = rng.gen();
        let damping = d.inner_scale_term + tau * tau * (d.rho0_sq + d.rho1_sq) / denom;
        let phase = tau / 2.0 - 2.0 * tau * tau / denom;
        let scale = 1.0 / (damping + phase.abs()).max(1e-300);
        let v: f64 = rng.gen();
        let u = scale * v / (1.0 - v);
        let jac = scale / ((1.0 - v) * (1.0 - v));
        let w = 0.5 * u.powf(-11.0 / 6.0) * (-damping * u).exp() * (phase * u).sin().powi(2) * jac;
        let w = if w.is_finite() { w } else { 0.0 };
        s += w;
        s2 += w * w;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    (4.24 * mean, 4.24 * se)
}

#[test]
fn plane_wave_limit() {
    let r = l_of(&derived(1e6, 1e6, 1e-8), 1e-6);
    assert!((r.big_l - 1.0).abs() < 0.01, "{}", r.big_l);
}

#[test]
fn unit_fresnel_radius_against_sampling() {
    let d = derived(1.0, 1.0, 0.0);
    let r = l_of(&d, 1e-8);
    assert!(r.big_l > 0.0 && r.big_l < 1.0, "{}", r.big_l);
    let (mc, se) = sampled_l(&d, 10_000_000, 2024);
    assert!((mc - r.big_l).abs() < 3.0 * se, "{mc} ± {se} vs {}", r.big_l);
    assert!(se < 0.01 * mc);
}

#[test]
fn first_order_is_rytov_times_l() {
    let p = fig2(1e-14, 1000.0);
    let d = derive_params(&p).unwrap();
    let r = sigma2_first_order(&d, &p, 1e-7).unwrap();
    assert_eq!(r.sigma2_first, d.sigma1_sq * r.big_l);
    assert_eq!(r.quad.value, r.big_l);
}

#[test]
fn quiet_channel_gives_zero() {
    let p = fig2(0.0, 800.0);
    let d = derive_params(&p).unwrap();
    assert_eq!(sigma2_first_order(&d, &p, 1e-6).unwrap().sigma2_first, 0.0);
}

#[test]
fn tighter_tolerance_stays_within_estimate() {
    for (rho, inner) in [(1.0, 0.01), (0.3, 0.05), (8.0, 0.002)] {
        let d = derived(rho, rho, inner);
        let coarse = l_of(&d, 1e-4);
        let fine = l_of(&d, 5e-5);
        assert!(
            (coarse.big_l - fine.big_l).abs() < coarse.quad.abs_error_estimate,
            "{} vs {} (± {})",
            coarse.big_l,
            fine.big_l,
            coarse.quad.abs_error_estimate
        );
    }
}

#[test]
fn grows_with_distance_on_the_reference_beam() {
    for cn2 in [5e-15, 1e-14] {
        let values: Vec<f64> = (0..22)
            .map(|i| 100.0 + 50.0 * i as f64)
            .map(|z| {
                let p = fig2(cn2, z);
                let d = derive_params(&p).unwrap();
                sigma2_first_order(&d, &p, 1e-7).unwrap().sigma2_first
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nonnegative(r0 in 1e-3f64..1e3, r1 in 1e-3f64..1e3, inner in 0.0f64..1.0) {
        prop_assert!(l_of(&derived(r0, r1, inner), 1e-6).big_l >= 0.0);
    }

    #[test]
    fn symmetric_in_the_two_radii(r0 in 1e-2f64..1e2, r1 in 1e-2f64..1e2, inner in 0.0f64..0.1) {
        let a = l_of(&derived(r0, r1, inner), 1e-8).big_l;
        let b = l_of(&derived(r1, r0, inner), 1e-8).big_l;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{} vs {}", a, b);
    }

    #[test]
    fn damping_cannot_raise_it(rho in 1e-2f64..1e2, inner in 0.0f64..0.5, extra in 1e-3f64..0.5) {
        let a = l_of(&derived(rho, rho, inner), 1e-8);
        let b = l_of(&derived(rho, rho, inner + extra), 1e-8);
        let slack = a.quad.abs_error_estimate + b.quad.abs_error_estimate;
        prop_assert!(b.big_l <= a.big_l + slack, "{} > {}", b.big_l, a.big_l);
    }
}

use std::f64::consts::PI;

use proptest::prelude::*;
use scint_core::beam::*;
use scint_core::params::{derive_params, PhysicalParams};
use scint_core::quadrature::{integrate_axis, AdaptiveOptions, Axis, TailMap};

fn params(lambda_c: f64) -> PhysicalParams {
    PhysicalParams {
        cn2: 1e-14,
        l0: 6.3e-3,
        outer_scale: f64::INFINITY,
        q0: 1e7,
        z: 1000.0,
        r0: 0.01,
        lambda_c,
    }
}

/// Streams the aperture distribution along straight rays and sums over a
/// square lattice of transverse wave vectors.
fn lattice_intensity(r: [f64; 2], z: f64, b: &BeamBoundary) -> f64 {
    let half = 9.0 / b.a().sqrt();
    let n = 600;
    let h = 2.0 * half / n as f64;
    let s = z / b.q0;
    let mut acc = 0.0;
    for i in 0..=n {
        let qx = -half + i as f64 * h;
        for j in 0..=n {
            let qy = -half + j as f64 * h;
            acc += boundary_pdf([qx, qy], [r[0] - qx * s, r[1] - qy * s], b);
        }
    }
    acc * h * h / (PI / b.a())
}

#[test]
fn aperture_profile() {
    let b = BeamBoundary::new(0.01, 0.01, 1e7);
    assert_eq!(boundary_pdf([0.0; 2], [0.0; 2], &b), 1.0);
    let v = boundary_pdf([0.0; 2], [0.005, 0.005], &b);
    assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    assert_eq!(vacuum_intensity([0.0; 2], 0.0, &b), 1.0);
}

#[test]
fn streaming_sum_matches_closed_form() {
    let b = BeamBoundary::new(0.01, 0.006, 1e7);
    for (r, z) in [([0.0, 0.0], 300.0), ([0.004, -0.002], 800.0), ([0.01, 0.0], 1500.0)] {
        let brute = lattice_intensity(r, z, &b);
        let closed = vacuum_intensity(r, z, &b);
        assert!((brute / closed - 1.0).abs() < 1e-9, "{r:?} {z}: {brute} vs {closed}");
    }
}

#[test]
fn far_field_peak_falls_as_inverse_fresnel_product() {
    let b = BeamBoundary::new(0.01, 0.01, 1e7);
    for z in [1e5, 1e6, 1e7] {
        let rho_sq = 0.01f64.powi(2) * 1e7 / z;
        let peak = vacuum_intensity([0.0; 2], z, &b);
        assert!((peak / (rho_sq * rho_sq / 4.0) - 1.0).abs() < 1e-3 + rho_sq * rho_sq, "{z}");
    }
}

#[test]
fn spot_is_gaussian_in_radius() {
    let spot = BeamBoundary::new(0.01, 0.008, 1e7).at(900.0);
    let ln0 = spot.intensity(0.0).ln();
    for r in [0.002, 0.005, 0.01, 0.02] {
        let slope = (spot.intensity(r * r).ln() - ln0) / (r * r);
        assert!((slope + spot.gamma).abs() < 1e-9 * spot.gamma);
    }
}

#[test]
fn diffuser_narrows_only_the_wave_vector_width() {
    let clear = params(f64::INFINITY);
    let diffuse = params(0.005);
    let bc = BeamBoundary::from_params(&clear, &derive_params(&clear).unwrap());
    let bd = BeamBoundary::from_params(&diffuse, &derive_params(&diffuse).unwrap());
    assert_eq!(bc.b(), bd.b());
    assert_eq!(bc.r0, bd.r0);
    let want_r1_sq = 1.0 / (1.0 / 0.01f64.powi(2) + 2.0 / 0.005f64.powi(2));
    assert!((bd.r1 * bd.r1 / want_r1_sq - 1.0).abs() < 1e-12);
    assert!(bd.a() < bc.a());
}

proptest! {
    #[test]
    fn on_axis_intensity_decreases(z in 1.0f64..5e3, dz in 1e-2f64..1e3, r1 in 1e-3f64..0.01) {
        let b = BeamBoundary::new(0.01, r1, 1e7);
        prop_assert!(vacuum_intensity([0.0; 2], z + dz, &b) < vacuum_intensity([0.0; 2], z, &b));
    }

    #[test]
    fn total_power_is_conserved(z in 0.0f64..5e3, r1 in 1e-3f64..0.01) {
        let b = BeamBoundary::new(0.01, r1, 1e7);
        let spot = b.at(z);
        let width = 1.0 / spot.gamma.sqrt();
        let r = integrate_axis(
            |x| 2.0 * PI * x * spot.intensity(x * x),
            Axis::semi_infinite_with(0.0, TailMap::Exponential { scale: width }),
            &AdaptiveOptions::new(1e-12, 0.0),
        ).unwrap();
        let aperture = PI / b.b();
        prop_assert!((r.value / aperture - 1.0).abs() < 1e-8, "{} vs {}", r.value, aperture);
    }
}

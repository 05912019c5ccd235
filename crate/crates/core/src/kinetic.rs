//! Collision operator on a transverse wave-vector grid and its diffusion
//! limit.
//!
//! The collision term `−ν{f}(q) = −(2πω0²/c)∫d²k′ ψ(k′)[f(q) − f(q+k′)]` is
//! a convolution, so it is applied in Fourier space. Averaging the shift
//! `e^{ix·k′}` over the direction of `k′` gives `J0(k′|x|)`, and the operator
//! becomes the multiplier
//!
//! ```text
//! m(x) = (2πω0²/c) · 2π ∫ k′ψ(k′) [1 − J0(k′|x|)] dk′
//! ```
//!
//! with `m(0) = 0`, which is photon-number conservation. The radial integral
//! runs over the annulus `[2π/L0_eff, 4π·2π/l0]` with a fixed Gauss-Legendre
//! rule in `ln k′`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::SPEED_OF_LIGHT;
use crate::quadrature::GaussLegendre;
use crate::spectrum::SpectrumParams;

/// Default node count per grid side.
pub const DEFAULT_NODES: usize = 256;
/// Default half-extent in units of the distribution width.
pub const DEFAULT_WIDTHS: f64 = 8.0;
/// Default radial quadrature order for the `k′` annulus.
pub const DEFAULT_RADIAL_NODES: usize = 64;
/// Largest edge value tolerated in compact mode, relative to the peak.
pub const LEAKAGE_TOLERANCE: f64 = 1e-12;
/// The effective outer scale never exceeds this many inner scales.
pub const OUTER_SCALE_CAP: f64 = 1e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticError {
    #[error("distribution reaches the grid edge: edge value {edge:e} against peak {peak:e}")]
    BoundaryLeakage { edge: f64, peak: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite grid value at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// Square grid `q ∈ [−extent, extent)²` with `nodes` points per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extent: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(extent: f64, nodes: usize) -> Result<Self, KineticError> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(KineticError::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if nodes < 8 || !nodes.is_multiple_of(2) {
            return Err(KineticError::InvalidGrid(format!("node count must be even and at least 8, got {nodes}")));
        }
        Ok(Self { extent, nodes })
    }

    /// Default grid for a distribution of the given width.
    pub fn for_width(width: f64) -> Result<Self, KineticError> {
        Self::new(DEFAULT_WIDTHS * width, DEFAULT_NODES)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.nodes as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }
}

/// Photon distribution sampled over `q⊥ = (qx, qy)`; rows index `qx`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfGrid {
    pub spec: GridSpec,
    pub values: Array2<f64>,
}

impl PdfGrid {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(spec: GridSpec, f: F) -> Self {
        let values = Array2::from_shape_fn((spec.nodes, spec.nodes), |(i, j)| {
            f(spec.coordinate(i), spec.coordinate(j))
        });
        Self { spec, values }
    }

    /// Isotropic Gaussian `exp(−q²/2w²)` on the default grid for width `w`.
    pub fn gaussian(width: f64) -> Result<Self, KineticError> {
        let spec = GridSpec::for_width(width)?;
        let s = 0.5 / (width * width);
        Ok(Self::from_fn(spec, |x, y| (-(x * x + y * y) * s).exp()))
    }

    pub fn sum(&self) -> f64 {
        self.values.sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest magnitude on the outermost ring of nodes.
    pub fn edge_max(&self) -> f64 {
        let n = self.spec.nodes;
        let v = &self.values;
        (0..n)
            .flat_map(|k| [v[[0, k]], v[[n - 1, k]], v[[k, 0]], v[[k, n - 1]]])
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Dump as `x-index,y-index,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["ix", "iy", "value"])?;
        for ((i, j), v) in self.values.indexed_iter() {
            w.write_record([i.to_string(), j.to_string(), format!("{v:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    fn check(&self, boundary: Boundary) -> Result<(), KineticError> {
        if let Some(((i, j), _)) = self.values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(KineticError::NonFinite(i, j));
        }
        if boundary == Boundary::Compact {
            let edge = self.edge_max();
            let peak = self.max_abs();
            if edge > LEAKAGE_TOLERANCE * peak {
                return Err(KineticError::BoundaryLeakage { edge, peak });
            }
        }
        Ok(())
    }
}

/// Treatment of wave vectors shifted off the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Off-grid values are zero; the input must vanish at the edges.
    Compact,
    /// The grid is one period of a periodic distribution.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticOptions {
    pub boundary: Boundary,
    pub radial_nodes: usize,
}

impl Default for KineticOptions {
    fn default() -> Self {
        Self {
            boundary: Boundary::Compact,
            radial_nodes: DEFAULT_RADIAL_NODES,
        }
    }
}

/// Radial nodes `k′` and weights `2π·k′²·ψ(k′)·w` of the annulus rule in
/// `ln k′`, so that `∫d²k′ ψ g(|k′|) ≈ Σ weight·g(k′)` for isotropic `g`.
pub fn annulus_rule(s: &SpectrumParams, radial_nodes: usize) -> Vec<(f64, f64)> {
    let outer = if s.inv_outer_sq > 0.0 {
        s.inv_outer_sq.sqrt().recip()
    } else {
        f64::INFINITY
    };
    let outer_eff = outer.min(OUTER_SCALE_CAP * s.l0);
    let lo = (2.0 * PI / outer_eff).ln();
    let hi = (4.0 * PI * s.k_inner()).ln();
    GaussLegendre::new(radial_nodes)
        .on_interval(lo, hi)
        .map(|(t, w)| {
            let k = t.exp();
            (k, 2.0 * PI * w * k * k * s.eval(k))
        })
        .collect()
}

/// `−ν{f}` with the default options (compact support).
pub fn apply_collision(g: &PdfGrid, s: &SpectrumParams, omega0: f64) -> Result<PdfGrid, KineticError> {
    apply_collision_with(g, s, omega0, &KineticOptions::default())
}

pub fn apply_collision_with(
    g: &PdfGrid,
    s: &SpectrumParams,
    omega0: f64,
    opts: &KineticOptions,
) -> Result<PdfGrid, KineticError> {
    g.check(opts.boundary)?;
    let n = g.spec.nodes;
    let size = match opts.boundary {
        Boundary::Compact => 2 * n,
        Boundary::Periodic => n,
    };
    let rate = 2.0 * PI * omega0 * omega0 / SPEED_OF_LIGHT;
    let rule = annulus_rule(s, opts.radial_nodes);
    let h = g.spec.spacing();
    let freq = |j: usize| {
        let signed = if j < size / 2 { j as f64 } else { j as f64 - size as f64 };
        2.0 * PI * signed / (size as f64 * h)
    };
    let mut data = vec![Complex64::new(0.0, 0.0); size * size];
    for ((i, j), v) in g.values.indexed_iter() {
        data[i * size + j] = Complex64::new(*v, 0.0);
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    fft2(&mut data, size, &forward);
    data.par_chunks_mut(size).enumerate().for_each(|(i, row)| {
        let xi = freq(i);
        for (j, c) in row.iter_mut().enumerate() {
            let xj = freq(j);
            let r = (xi * xi + xj * xj).sqrt();
            let m: f64 = rule.iter().map(|&(k, w)| w * (1.0 - libm::j0(k * r))).sum();
            *c *= -rate * m;
        }
    });
    fft2(&mut data, size, &inverse);
    let scale = 1.0 / (size * size) as f64;
    let values = Array2::from_shape_fn((n, n), |(i, j)| data[i * size + j].re * scale);
    Ok(PdfGrid { spec: g.spec, values })
}

fn fft2(data: &mut [Complex64], size: usize, fft: &Arc<dyn Fft<f64>>) {
    data.par_chunks_mut(size).for_each(|row| fft.process(row));
    transpose(data, size);
    data.par_chunks_mut(size).for_each(|row| fft.process(row));
    transpose(data, size);
}

fn transpose(data: &mut [Complex64], size: usize) {
    for i in 0..size {
        for j in (i + 1)..size {
            data.swap(i * size + j, j * size + i);
        }
    }
}

/// Diffusion coefficient `(πω0²/c)·π∫k′³ψ dk′` multiplying `∇²f`.
pub fn diffusion_coefficient(s: &SpectrumParams, omega0: f64, radial_nodes: usize) -> f64 {
    // ∫d²k′ ψ (k′·∇)² = ½∫d²k′ ψ k′² ∇²
    let second_moment: f64 = annulus_rule(s, radial_nodes).iter().map(|&(k, w)| w * k * k).sum();
    PI * omega0 * omega0 / SPEED_OF_LIGHT * 0.5 * second_moment
}

/// Diffusion limit of [`apply_collision`].
pub fn apply_diffusion(g: &PdfGrid, s: &SpectrumParams, omega0: f64) -> Result<PdfGrid, KineticError> {
    apply_diffusion_with(g, s, omega0, &KineticOptions::default())
}

/// Fourth-order central-difference Laplacian scaled by the diffusion
/// coefficient.
pub fn apply_diffusion_with(
    g: &PdfGrid,
    s: &SpectrumParams,
    omega0: f64,
    opts: &KineticOptions,
) -> Result<PdfGrid, KineticError> {
    g.check(opts.boundary)?;
    let n = g.spec.nodes as isize;
    let h = g.spec.spacing();
    let coef = diffusion_coefficient(s, omega0, opts.radial_nodes) / (12.0 * h * h);
    let v = &g.values;
    let at = |i: isize, j: isize| -> f64 {
        match opts.boundary {
            Boundary::Periodic => v[[i.rem_euclid(n) as usize, j.rem_euclid(n) as usize]],
            Boundary::Compact => {
                if (0..n).contains(&i) && (0..n).contains(&j) {
                    v[[i as usize, j as usize]]
                } else {
                    0.0
                }
            }
        }
    };
    let flat: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let c = at(i, j);
            let d2x = -at(i - 2, j) + 16.0 * at(i - 1, j) - 30.0 * c + 16.0 * at(i + 1, j) - at(i + 2, j);
            let d2y = -at(i, j - 2) + 16.0 * at(i, j - 1) - 30.0 * c + 16.0 * at(i, j + 1) - at(i, j + 2);
            coef * (d2x + d2y)
        })
        .collect();
    let values = Array2::from_shape_vec(v.raw_dim(), flat).expect("grid shape is square");
    Ok(PdfGrid { spec: g.spec, values })
}

/// Relative L² distance `‖a − b‖/‖b‖`, optionally restricted to the central
/// `fraction` of each side.
pub fn relative_l2(a: &PdfGrid, b: &PdfGrid, fraction: f64) -> f64 {
    let n = a.spec.nodes;
    let margin = ((1.0 - fraction.clamp(0.0, 1.0)) * 0.5 * n as f64).round() as usize;
    let inner = |g: &PdfGrid| {
        g.values
            .slice(ndarray::s![margin..n - margin, margin..n - margin])
            .to_owned()
    };
    let (x, y) = (inner(a), inner(b));
    let diff: f64 = Zip::from(&x).and(&y).fold(0.0, |acc, p, q| acc + (p - q) * (p - q));
    let norm: f64 = y.iter().map(|q| q * q).sum();
    (diff / norm).sqrt()
}

//! Built-in figure configurations.
//!
//! Each preset fixes the beam and turbulence geometry of one reference plot,
//! plus a sweep grid and an optional `Cn²` or radius series.

/// Names accepted by `preset = ...`.
pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

const FIG1: &str = "\
# scintillation vs Rytov variance
l0 = 6.3e-3
L0 = inf
q0 = 1.29e7
z = 1200
r0 = 0.01
lambda_c = inf
sweep = sigma1_sq
grid_start = 0.05
grid_stop = 0.85
grid_points = 17
";

const FIG2: &str = "\
# scintillation vs distance, two turbulence strengths
l0 = 6.283185307179586e-3
L0 = inf
q0 = 1e7
r0 = 0.01
lambda_c = inf
sweep = z
grid_start = 100
grid_stop = 1150
grid_points = 22
series = cn2
series_values = 5e-15, 1e-14
";

const FIG3: &str = "\
# scintillation vs distance, two aperture radii
cn2 = 1e-14
l0 = 6.283185307179586e-3
L0 = inf
q0 = 1e7
lambda_c = inf
sweep = z
grid_start = 800
grid_stop = 1150
grid_points = 8
series = r0
series_values = 0.015, 0.02
";

const FIG4: &str = "\
# scintillation vs distance, with and without the second-order fluctuation
l0 = 6.283185307179586e-3
L0 = inf
q0 = 1e7
r0 = 0.01
lambda_c = inf
sweep = z
grid_start = 100
grid_stop = 1150
grid_points = 22
series = cn2
series_values = 5e-15, 1e-14
";

/// Config text of a preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(FIG1),
        "fig2" => Some(FIG2),
        "fig3" => Some(FIG3),
        "fig4" => Some(FIG4),
        _ => None,
    }
}

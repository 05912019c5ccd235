//! Configuration, presets, result cache and table output.

pub mod cache;
pub mod config;
pub mod output;
pub mod preset;

pub use cache::{cache_get_or_compute, cached_scintillation_index, Cache, CacheKey};
pub use config::{parse_config, parse_config_with, ConfigError, RunConfig, SeriesKey};
pub use output::{meta_path, write_csv, write_outputs, RunMeta};
pub use preset::{preset_text, PRESETS};

use crate::pipeline::{splitmix64, sweep_with, RunOptions, SweepError, SweepRow};

/// Base seed of curve `index`; the first curve keeps the configured seed.
pub fn curve_seed(seed: u64, index: usize) -> u64 {
    if index == 0 {
        seed
    } else {
        seed ^ splitmix64(!(index as u64))
    }
}

/// Evaluate every curve of a run, going through `cache` when given.
pub fn run_config(cfg: &RunConfig, cache: Option<&Cache>) -> Result<Vec<Vec<SweepRow>>, SweepError> {
    cfg.curves()
        .iter()
        .enumerate()
        .map(|(i, base)| {
            let opts = RunOptions {
                rel_tol: cfg.rel_tol,
                mc_samples: cfg.mc_samples,
                seed: curve_seed(cfg.seed, i),
            };
            sweep_with(base, cfg.axis, &cfg.grid, &opts, |p, o| cached_scintillation_index(cache, p, o))
        })
        .collect()
}

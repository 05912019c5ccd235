//! Command-line front end of the `scint` binary.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use log::info;

use crate::io::config::{MIN_MC_SAMPLES, TOL_RANGE};
use crate::io::{parse_config_with, run_config, write_outputs, Cache, RunConfig, RunMeta};

/// Exit status when every row succeeded.
pub const EXIT_OK: i32 = 0;
/// Some rows failed; the table still lists them.
pub const EXIT_ROW_FAILURE: i32 = 1;
/// Bad command line.
pub const EXIT_USAGE: i32 = 2;
/// Config could not be parsed or validated.
pub const EXIT_CONFIG: i32 = 3;
/// Reading or writing files failed.
pub const EXIT_IO: i32 = 4;

/// Scintillation index of a Gaussian beam in weak-to-moderate turbulence.
#[derive(Debug, Parser)]
#[command(name = "scint", version)]
pub struct Cli {
    /// Flat key = value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in figure setup (fig1, fig2, fig3, fig4)
    #[arg(long)]
    pub preset: Option<String>,
    /// CSV output path; the metadata sidecar goes next to it
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Base seed of the Monte Carlo cross term
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative tolerance of the deterministic integrals
    #[arg(long)]
    pub tol: Option<f64>,
    /// Monte Carlo samples per point
    #[arg(long)]
    pub mc_samples: Option<u64>,
    /// Result cache directory
    #[arg(long, conflicts_with = "no_cache")]
    pub cache: Option<PathBuf>,
    /// Ignore any configured cache
    #[arg(long)]
    pub no_cache: bool,
    /// Worker threads (results do not depend on it)
    #[arg(long)]
    pub threads: Option<usize>,
}

fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) -> Result<(), String> {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        if !(tol > TOL_RANGE.0 && tol < TOL_RANGE.1) {
            return Err(format!("--tol must lie in ({:e}, {:e}), got {tol}", TOL_RANGE.0, TOL_RANGE.1));
        }
        cfg.rel_tol = tol;
    }
    if let Some(n) = cli.mc_samples {
        if n < MIN_MC_SAMPLES {
            return Err(format!("--mc-samples must be at least {MIN_MC_SAMPLES}, got {n}"));
        }
        cfg.mc_samples = n;
    }
    if let Some(out) = &cli.output {
        cfg.output = Some(out.clone());
    }
    if cli.no_cache {
        cfg.cache_dir = None;
    } else if let Some(dir) = &cli.cache {
        cfg.cache_dir = Some(dir.clone());
    }
    Ok(())
}

/// Run the tool on `args` (program name first) and return the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if cli.config.is_none() && cli.preset.is_none() {
        eprintln!("error: give --config PATH or --preset NAME");
        return EXIT_USAGE;
    }
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be positive");
        return EXIT_USAGE;
    }

    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return EXIT_IO;
            }
        },
        None => String::new(),
    };
    let mut cfg = match parse_config_with(&text, cli.preset.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = apply_overrides(&mut cfg, &cli) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let output = cfg.output.clone().unwrap_or_else(|| {
        PathBuf::from(format!("{}.csv", cfg.preset.as_deref().unwrap_or("scint")))
    });
    let cache = match &cfg.cache_dir {
        Some(dir) => match Cache::open(dir) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("error: cannot open cache {}: {e}", dir.display());
                return EXIT_IO;
            }
        },
        None => None,
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_IO;
        }
    };
    let started = Instant::now();
    let curves = match pool.install(|| run_config(&cfg, cache.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let meta = RunMeta::new(&cfg, &curves, pool.current_num_threads(), started.elapsed().as_secs_f64());
    if let Err(e) = write_outputs(&output, cfg.axis, &curves, &meta) {
        eprintln!("error: cannot write {}: {e}", output.display());
        return EXIT_IO;
    }
    let rows: usize = curves.iter().map(Vec::len).sum();
    info!(
        "wrote {rows} rows to {} in {:.1} s",
        output.display(),
        meta.wall_time_s
    );
    if meta.failed_rows.is_empty() {
        EXIT_OK
    } else {
        eprintln!("{} of {rows} rows failed:", meta.failed_rows.len());
        for f in &meta.failed_rows {
            eprintln!("  {f}");
        }
        EXIT_ROW_FAILURE
    }
}

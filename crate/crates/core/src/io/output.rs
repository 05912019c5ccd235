//! CSV tables and their metadata sidecars.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same double. A table is only ever replaced as a whole.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::io::config::RunConfig;
use crate::pipeline::{SweepAxis, SweepRow};

const PARAM_COLUMNS: [&str; 7] = ["cn2", "l0", "L0", "q0", "z", "r0", "lambda_c"];
const RESULT_COLUMNS: [&str; 12] = [
    "sigma1_sq",
    "big_l",
    "i1_ratio",
    "x2_ratio",
    "sigma2_rytov_like",
    "sigma2_no_df2",
    "sigma2_full",
    "error_estimate",
    "x2_precision_ok",
    "within_moderate",
    "within_rytov",
    "time_hierarchy_ok",
];

/// `{:.16e}`: shortest fixed width that round-trips every finite double.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names, swept quantity first. A parameter or result column named
/// like the sweep axis is not repeated.
pub fn csv_header(axis: SweepAxis) -> Vec<String> {
    let mut cols = vec!["curve".to_string(), "row".to_string(), axis.name().to_string()];
    cols.extend(
        PARAM_COLUMNS
            .iter()
            .chain(["seed"].iter())
            .chain(RESULT_COLUMNS.iter())
            .filter(|c| **c != axis.name())
            .map(|c| c.to_string()),
    );
    cols.push("status".into());
    cols
}

fn record(axis: SweepAxis, curve: usize, row: &SweepRow) -> Vec<String> {
    let p = &row.params;
    let mut named: Vec<(&str, String)> = vec![
        ("cn2", format_float(p.cn2)),
        ("l0", format_float(p.l0)),
        ("L0", format_float(p.outer_scale)),
        ("q0", format_float(p.q0)),
        ("z", format_float(p.z)),
        ("r0", format_float(p.r0)),
        ("lambda_c", format_float(p.lambda_c)),
        ("seed", row.seed.to_string()),
    ];
    let status = match &row.result {
        Ok(r) => {
            named.extend([
                ("sigma1_sq", format_float(r.sigma1_sq)),
                ("big_l", format_float(r.big_l)),
                ("i1_ratio", format_float(r.i1_ratio)),
                ("x2_ratio", format_float(r.x2_ratio)),
                ("sigma2_rytov_like", format_float(r.sigma2_rytov_like)),
                ("sigma2_no_df2", format_float(r.sigma2_no_df2)),
                ("sigma2_full", format_float(r.sigma2_full)),
                ("error_estimate", format_float(r.error_estimate)),
                ("x2_precision_ok", r.x2_precision_ok.to_string()),
                ("within_moderate", r.regime.within_moderate.to_string()),
                ("within_rytov", r.regime.within_rytov.to_string()),
                ("time_hierarchy_ok", r.regime.time_hierarchy_ok.to_string()),
            ]);
            "ok".to_string()
        }
        Err(e) => format!("error ({}): {e}", e.stage()),
    };
    let mut out = vec![curve.to_string(), row.index.to_string(), format_float(row.x)];
    for col in PARAM_COLUMNS.iter().chain(["seed"].iter()).chain(RESULT_COLUMNS.iter()) {
        if *col == axis.name() {
            continue;
        }
        out.push(
            named
                .iter()
                .find(|(k, _)| k == col)
                .map(|(_, v)| v.clone())
                .unwrap_or_default(),
        );
    }
    out.push(status);
    out
}

/// Write all curves as one table.
pub fn write_csv<W: Write>(w: W, axis: SweepAxis, curves: &[Vec<SweepRow>]) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(csv_header(axis))?;
    for (c, rows) in curves.iter().enumerate() {
        for row in rows {
            wtr.write_record(record(axis, c, row))?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Provenance of one CSV table. `config` alone regenerates the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub code_version: String,
    pub preset: Option<String>,
    pub config: String,
    pub sweep_axis: String,
    pub rel_tol: f64,
    pub mc_samples: u64,
    pub seed: u64,
    /// Monte Carlo seed of every row, per curve.
    pub row_seeds: Vec<Vec<u64>>,
    pub threads: usize,
    pub wall_time_s: f64,
    pub evaluations: u64,
    pub failed_rows: Vec<String>,
}

impl RunMeta {
    pub fn new(cfg: &RunConfig, curves: &[Vec<SweepRow>], threads: usize, wall_time_s: f64) -> Self {
        let failed_rows = curves
            .iter()
            .enumerate()
            .flat_map(|(c, rows)| {
                rows.iter().filter_map(move |r| {
                    r.result
                        .as_ref()
                        .err()
                        .map(|e| format!("curve {c} row {} ({} = {:e}): {e}", r.index, cfg.axis, r.x))
                })
            })
            .collect();
        Self {
            code_version: crate::CODE_VERSION.to_string(),
            preset: cfg.preset.clone(),
            config: cfg.to_config_text(),
            sweep_axis: cfg.axis.name().to_string(),
            rel_tol: cfg.rel_tol,
            mc_samples: cfg.mc_samples,
            seed: cfg.seed,
            row_seeds: curves.iter().map(|rows| rows.iter().map(|r| r.seed).collect()).collect(),
            threads,
            wall_time_s,
            evaluations: curves
                .iter()
                .flatten()
                .filter_map(|r| r.result.as_ref().ok())
                .map(|r| r.evaluations)
                .sum(),
            failed_rows,
        }
    }
}

/// `out.csv` → `out.meta.json`.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Write the table to `path` and its sidecar next to it.
pub fn write_outputs(path: &Path, axis: SweepAxis, curves: &[Vec<SweepRow>], meta: &RunMeta) -> io::Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, axis, curves).map_err(io::Error::other)?;
    write_atomic(path, &buf)?;
    let mut json = serde_json::to_vec_pretty(meta)?;
    json.push(b'\n');
    write_atomic(&meta_path(path), &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_skips_axis_duplicates() {
        let h = csv_header(SweepAxis::Z);
        assert_eq!(h.iter().filter(|c| *c == "z").count(), 1);
        assert_eq!(h[2], "z");
        let h = csv_header(SweepAxis::Sigma1Sq);
        assert_eq!(h.iter().filter(|c| *c == "sigma1_sq").count(), 1);
        assert_eq!(h.last().unwrap(), "status");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.283185307179586e-3, 1e-300, f64::MAX] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
    }
}

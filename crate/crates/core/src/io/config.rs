//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, infinities are written
//! `inf`. List values are comma separated. Recognized keys and their units:
//!
//! | key | meaning | unit |
//! |---|---|---|
//! | `cn2` | refractive-index structure constant | m^(−2/3) |
//! | `l0` | inner scale | m |
//! | `L0` | outer scale | m |
//! | `q0` | optical wavenumber | 1/m |
//! | `z` | path length | m |
//! | `r0` | aperture radius | m |
//! | `lambda_c` | phase-diffuser coherence length | m |
//! | `sweep` | swept quantity: `z`, `cn2` or `sigma1_sq` | |
//! | `grid` | explicit sweep values | unit of the swept quantity |
//! | `grid_start`, `grid_stop`, `grid_points` | evenly spaced sweep values | |
//! | `series` | quantity held fixed per curve: `cn2` or `r0` | |
//! | `series_values` | one curve per value | unit of `series` |
//! | `tol` | relative tolerance of the deterministic integrals | |
//! | `mc_samples` | Monte Carlo samples of the cross term | |
//! | `seed` | base seed | |
//! | `output` | CSV path | |
//! | `cache_dir` | result cache directory | |
//! | `preset` | `fig1` … `fig4` | |
//! | `preset_override` | `true` lets the preset replace conflicting entries | |

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use log::warn;
use thiserror::Error;

use crate::io::preset::preset_text;
use crate::params::PhysicalParams;
use crate::pipeline::{check_grid, SweepAxis, DEFAULT_REL_TOL};
use crate::quadrature::DEFAULT_MC_SAMPLES;

/// Admissible range of `tol`.
pub const TOL_RANGE: (f64, f64) = (1e-10, 1e-2);
/// Fewest Monte Carlo samples accepted.
pub const MIN_MC_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number,
    List,
    Integer,
    Flag,
    Text,
}

const KEYS: &[(&str, Kind)] = &[
    ("cn2", Kind::Number),
    ("l0", Kind::Number),
    ("L0", Kind::Number),
    ("q0", Kind::Number),
    ("z", Kind::Number),
    ("r0", Kind::Number),
    ("lambda_c", Kind::Number),
    ("sweep", Kind::Text),
    ("grid", Kind::List),
    ("grid_start", Kind::Number),
    ("grid_stop", Kind::Number),
    ("grid_points", Kind::Integer),
    ("series", Kind::Text),
    ("series_values", Kind::List),
    ("tol", Kind::Number),
    ("mc_samples", Kind::Integer),
    ("seed", Kind::Integer),
    ("output", Kind::Text),
    ("cache_dir", Kind::Text),
    ("preset", Kind::Text),
    ("preset_override", Kind::Flag),
];

/// Keys that describe one setting together; a preset and an explicit
/// config conflict on the group as a whole.
const GROUPS: &[&[&str]] = &[&["grid", "grid_start", "grid_stop", "grid_points"], &["series", "series_values"]];

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    List(Vec<f64>),
    Integer(u64),
    Flag(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x:e}"),
            Value::List(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("{x:e}")).collect();
                f.write_str(&parts.join(", "))
            }
            Value::Integer(n) => write!(f, "{n}"),
            Value::Flag(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` already set on line {first}")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("unknown preset `{0}` (available: fig1, fig2, fig3, fig4)")]
    UnknownPreset(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Quantity held fixed along each curve of a multi-curve run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKey {
    Cn2,
    R0,
}

impl SeriesKey {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesKey::Cn2 => "cn2",
            SeriesKey::R0 => "r0",
        }
    }

    pub fn apply(&self, p: &PhysicalParams, value: f64) -> PhysicalParams {
        match self {
            SeriesKey::Cn2 => PhysicalParams { cn2: value, ..*p },
            SeriesKey::R0 => PhysicalParams { r0: value, ..*p },
        }
    }
}

impl FromStr for SeriesKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cn2" => Ok(SeriesKey::Cn2),
            "r0" => Ok(SeriesKey::R0),
            other => Err(format!("unknown series `{other}` (expected cn2 or r0)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub key: SeriesKey,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Base parameters; the swept and series quantities are overwritten
    /// per row.
    pub params: PhysicalParams,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub series: Option<Series>,
    pub rel_tol: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub preset: Option<String>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parameter sets of the curves, one per series value.
    pub fn curves(&self) -> Vec<PhysicalParams> {
        match &self.series {
            Some(s) => s.values.iter().map(|&v| s.key.apply(&self.params, v)).collect(),
            None => vec![self.params],
        }
    }

    /// Self-contained config text that reproduces the same rows, with every
    /// number written in round-trip precision.
    pub fn to_config_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut put = |k: &str, v: Value| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("cn2", Value::Number(p.cn2));
        put("l0", Value::Number(p.l0));
        put("L0", Value::Number(p.outer_scale));
        put("q0", Value::Number(p.q0));
        put("z", Value::Number(p.z));
        put("r0", Value::Number(p.r0));
        put("lambda_c", Value::Number(p.lambda_c));
        put("sweep", Value::Text(self.axis.name().into()));
        put("grid", Value::List(self.grid.clone()));
        if let Some(s) = &self.series {
            put("series", Value::Text(s.key.name().into()));
            put("series_values", Value::List(s.values.clone()));
        }
        put("tol", Value::Number(self.rel_tol));
        put("mc_samples", Value::Integer(self.mc_samples));
        put("seed", Value::Integer(self.seed));
        out
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: Value,
}

type Entries = BTreeMap<&'static str, Entry>;

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let number = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{:?}: {e}", s.trim()));
    match kind {
        Kind::Number => number(raw).map(Value::Number),
        Kind::List => raw
            .split(',')
            .map(number)
            .collect::<Result<Vec<_>, _>>()
            .map(Value::List),
        Kind::Integer => raw.parse::<u64>().map(Value::Integer).map_err(|e| format!("{raw:?}: {e}")),
        Kind::Flag => raw.parse::<bool>().map(Value::Flag).map_err(|_| format!("{raw:?} is not true or false")),
        Kind::Text if raw.is_empty() => Err("empty value".into()),
        Kind::Text => Ok(Value::Text(raw.to_string())),
    }
}

fn parse_entries(text: &str) -> Result<Entries, ConfigError> {
    let mut entries = Entries::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(&(key, kind)) = KEYS.iter().find(|(name, _)| *name == k) else {
            return Err(ConfigError::UnknownKey { line, key: k.to_string() });
        };
        if let Some(prev) = entries.get(key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
                first: prev.line,
            });
        }
        let value = parse_value(kind, v).map_err(|message| ConfigError::Value {
            line,
            key: key.to_string(),
            message,
        })?;
        entries.insert(key, Entry { line, value });
    }
    Ok(entries)
}

fn group_of(key: &'static str) -> Vec<&'static str> {
    GROUPS
        .iter()
        .find(|g| g.contains(&key))
        .map(|g| g.to_vec())
        .unwrap_or_else(|| vec![key])
}

/// Merge preset entries under the explicit ones. Returns the conflicting
/// settings when `allow_override` is off.
fn merge_preset(explicit: &mut Entries, preset: Entries, allow_override: bool, name: &str) -> Vec<String> {
    let mut conflicts = Vec::new();
    let mut seen = Vec::new();
    for &key in preset.keys() {
        let group = group_of(key);
        if seen.contains(&group) {
            continue;
        }
        let pick = |src: &Entries| -> Vec<(&'static str, Value)> {
            group
                .iter()
                .filter_map(|k| src.get(k).map(|e| (*k, e.value.clone())))
                .collect()
        };
        let mine = pick(explicit);
        let theirs = pick(&preset);
        if mine.is_empty() {
            for (k, v) in theirs {
                explicit.insert(k, Entry { line: 0, value: v });
            }
        } else if mine != theirs {
            let label = group.join("/");
            if allow_override {
                warn!("preset {name} replaces the configured {label}");
                for k in &group {
                    explicit.remove(k);
                }
                for (k, v) in theirs {
                    explicit.insert(k, Entry { line: 0, value: v });
                }
            } else {
                conflicts.push(format!(
                    "{label} conflicts with preset {name}; remove it or set preset_override = true"
                ));
            }
        }
        seen.push(group);
    }
    conflicts
}

fn linspace(start: f64, stop: f64, n: u64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Parse a config document. `cli_preset` is a preset named outside the
/// document, e.g. on the command line.
pub fn parse_config_with(text: &str, cli_preset: Option<&str>) -> Result<RunConfig, ConfigError> {
    let mut entries = parse_entries(text)?;
    let mut issues = Vec::new();

    let doc_preset = match entries.get("preset").map(|e| &e.value) {
        Some(Value::Text(s)) => Some(s.clone()),
        _ => None,
    };
    let preset = match (doc_preset, cli_preset) {
        (Some(a), Some(b)) if a != b => {
            issues.push(format!("preset {a} in the config disagrees with requested preset {b}"));
            Some(a)
        }
        (a, b) => a.or_else(|| b.map(str::to_string)),
    };
    let allow_override = matches!(entries.get("preset_override").map(|e| &e.value), Some(Value::Flag(true)));
    if let Some(name) = &preset {
        let text = preset_text(name).ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?;
        let preset_entries = parse_entries(text).expect("preset text parses");
        issues.extend(merge_preset(&mut entries, preset_entries, allow_override, name));
    }

    let num = |k: &str| match entries.get(k).map(|e| &e.value) {
        Some(Value::Number(x)) => Some(*x),
        _ => None,
    };
    let list = |k: &str| match entries.get(k).map(|e| &e.value) {
        Some(Value::List(x)) => Some(x.clone()),
        _ => None,
    };
    let int = |k: &str| match entries.get(k).map(|e| &e.value) {
        Some(Value::Integer(x)) => Some(*x),
        _ => None,
    };
    let text_of = |k: &str| match entries.get(k).map(|e| &e.value) {
        Some(Value::Text(x)) => Some(x.clone()),
        _ => None,
    };

    let axis = match text_of("sweep") {
        Some(s) => match s.parse::<SweepAxis>() {
            Ok(a) => Some(a),
            Err(e) => {
                issues.push(format!("sweep: {e}"));
                None
            }
        },
        None => None,
    };
    let series_key = match text_of("series") {
        Some(s) => match s.parse::<SeriesKey>() {
            Ok(k) => Some(k),
            Err(e) => {
                issues.push(format!("series: {e}"));
                None
            }
        },
        None => None,
    };
    let series_values = list("series_values");
    let series = match (series_key, series_values) {
        (Some(key), Some(values)) => {
            if values.is_empty() {
                issues.push("series_values is empty".into());
            }
            Some(Series { key, values })
        }
        (Some(_), None) => {
            issues.push("series needs series_values".into());
            None
        }
        (None, Some(_)) => {
            issues.push("series_values needs series".into());
            None
        }
        (None, None) => None,
    };

    let explicit_grid = list("grid");
    let ranged = ["grid_start", "grid_stop", "grid_points"].map(|k| entries.contains_key(k));
    let grid = match (explicit_grid, ranged.iter().any(|&b| b)) {
        (Some(_), true) => {
            issues.push("grid cannot be combined with grid_start/grid_stop/grid_points".into());
            None
        }
        (Some(g), false) => Some(g),
        (None, true) => match (num("grid_start"), num("grid_stop"), int("grid_points")) {
            (Some(a), Some(b), Some(n)) => Some(linspace(a, b, n)),
            _ => {
                issues.push("grid_start, grid_stop and grid_points must be given together".into());
                None
            }
        },
        (None, false) => None,
    };
    if grid.is_some() && axis.is_none() && text_of("sweep").is_none() {
        issues.push("a grid needs a sweep axis".into());
    }
    if axis.is_some() && grid.is_none() {
        issues.push("sweep needs grid or grid_start/grid_stop/grid_points".into());
    }
    if let Some(g) = &grid {
        if let Err(e) = check_grid(g) {
            issues.push(format!("grid: {e}"));
        }
    }

    let swept = |k: &str| {
        matches!((axis, k), (Some(SweepAxis::Z), "z") | (Some(SweepAxis::Cn2 | SweepAxis::Sigma1Sq), "cn2"))
            || matches!((series_key, k), (Some(SeriesKey::Cn2), "cn2") | (Some(SeriesKey::R0), "r0"))
    };
    let mut field = |k: &str, default: Option<f64>| -> f64 {
        match num(k).or(default) {
            Some(x) => x,
            None if swept(k) => f64::NAN,
            None => {
                issues.push(format!("missing {k}"));
                f64::NAN
            }
        }
    };
    let mut params = PhysicalParams {
        cn2: field("cn2", None),
        l0: field("l0", None),
        outer_scale: field("L0", Some(f64::INFINITY)),
        q0: field("q0", None),
        z: field("z", None),
        r0: field("r0", None),
        lambda_c: field("lambda_c", Some(f64::INFINITY)),
    };
    // Unset swept quantities take their first scheduled value.
    if let (Some(a), Some(g)) = (axis, grid.as_ref().and_then(|g| g.first())) {
        match a {
            SweepAxis::Z if params.z.is_nan() => params.z = *g,
            SweepAxis::Cn2 if params.cn2.is_nan() => params.cn2 = *g,
            SweepAxis::Sigma1Sq if params.cn2.is_nan() => params.cn2 = 0.0,
            _ => {}
        }
    }
    if let Some(s) = &series {
        if let Some(&v) = s.values.first() {
            match s.key {
                SeriesKey::Cn2 if params.cn2.is_nan() => params.cn2 = v,
                SeriesKey::R0 if params.r0.is_nan() => params.r0 = v,
                _ => {}
            }
        }
    }

    let rel_tol = num("tol").unwrap_or(DEFAULT_REL_TOL);
    if !(rel_tol > TOL_RANGE.0 && rel_tol < TOL_RANGE.1) {
        issues.push(format!("tol must lie in ({:e}, {:e}), got {rel_tol}", TOL_RANGE.0, TOL_RANGE.1));
    }
    let mc_samples = int("mc_samples").unwrap_or(DEFAULT_MC_SAMPLES);
    if mc_samples < MIN_MC_SAMPLES {
        issues.push(format!("mc_samples must be at least {MIN_MC_SAMPLES}, got {mc_samples}"));
    }

    let axis = axis.unwrap_or(SweepAxis::Z);
    let grid = grid.unwrap_or_else(|| vec![params.z]);
    let cfg = RunConfig {
        params,
        axis,
        grid,
        series,
        rel_tol,
        mc_samples,
        seed: int("seed").unwrap_or(0),
        output: text_of("output").map(PathBuf::from),
        preset,
        cache_dir: text_of("cache_dir").map(PathBuf::from),
    };

    let incomplete = issues.iter().any(|m| m.starts_with("missing "));
    for curve in cfg.curves().into_iter().filter(|_| !incomplete) {
        for &x in &cfg.grid {
            for v in cfg.axis.apply(&curve, x).violations() {
                let msg = v.to_string();
                if !issues.contains(&msg) {
                    issues.push(msg);
                }
            }
        }
    }
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, None)
}

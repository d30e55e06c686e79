//! Flat key-value experiment config files.
//!
//! One `key = value` pair per line; blank lines and lines starting with `#`
//! are ignored. Unknown keys and keys that do not apply to the selected map
//! are rejected with the offending line number. Lists are comma-separated.
//!
//! Keys: `map` (henon|ushio), `p`, `q` (Hénon parameters), `alpha`, `beta`
//! (Ushio parameters), `x0` ("x1, x2"), `target` ("x1, x2" or "fixed-point"),
//! `horizon` (list of counts), `mu` (list), `epsilon` (list), `np`,
//! `max_generations`, `n_runs`, `seed`, `format` (csv|json).

use std::collections::HashMap;
use std::path::Path;

use chaos_target::maps::{henon_fixed_point, ChaoticMap, State2};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub map: ChaoticMap,
    pub x0: State2,
    pub target: State2,
    pub horizons: Vec<usize>,
    pub mu_values: Vec<f64>,
    pub eps_values: Vec<f64>,
    pub population_size: usize,
    pub max_generations: usize,
    pub n_runs: usize,
    pub seed: u64,
    pub format: OutputFormat,
}

const KNOWN_KEYS: &[&str] = &[
    "map",
    "p",
    "q",
    "alpha",
    "beta",
    "x0",
    "target",
    "horizon",
    "mu",
    "epsilon",
    "np",
    "max_generations",
    "n_runs",
    "seed",
    "format",
];

struct RawEntry {
    line: usize,
    value: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Usage(m) => usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut entries: HashMap<String, RawEntry> = HashMap::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!("line {line_no}: expected `key = value`")));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("line {line_no}: unknown key `{key}`")));
        }
        if entries.contains_key(&key) {
            return Err(usage(format!("line {line_no}: duplicate key `{key}`")));
        }
        entries.insert(
            key,
            RawEntry {
                line: line_no,
                value: value.trim().to_string(),
            },
        );
    }

    let take = |entries: &mut HashMap<String, RawEntry>, key: &str| entries.remove(key);
    let require = |entry: Option<RawEntry>, key: &str| {
        entry.ok_or_else(|| usage(format!("missing required key `{key}`")))
    };

    let map_entry = require(take(&mut entries, "map"), "map")?;
    let map_kind = map_entry.value.to_ascii_lowercase();

    let p = take(&mut entries, "p");
    let q = take(&mut entries, "q");
    let alpha = take(&mut entries, "alpha");
    let beta = take(&mut entries, "beta");

    let map = match map_kind.as_str() {
        "henon" => {
            reject_for_map(&alpha, "alpha", "henon")?;
            reject_for_map(&beta, "beta", "henon")?;
            ChaoticMap::Henon {
                p: parse_opt_f64(p, "p")?.unwrap_or(1.4),
                q: parse_opt_f64(q, "q")?.unwrap_or(0.3),
            }
        }
        "ushio" => {
            reject_for_map(&p, "p", "ushio")?;
            reject_for_map(&q, "q", "ushio")?;
            ChaoticMap::Ushio {
                alpha: parse_opt_f64(alpha, "alpha")?.unwrap_or(1.9),
                beta: parse_opt_f64(beta, "beta")?.unwrap_or(0.5),
            }
        }
        other => {
            return Err(usage(format!(
                "line {}: map must be `henon` or `ushio`, got `{other}`",
                map_entry.line
            )))
        }
    };

    let x0_entry = require(take(&mut entries, "x0"), "x0")?;
    let x0 = parse_state(&x0_entry, "x0")?;

    let target_entry = require(take(&mut entries, "target"), "target")?;
    let target = resolve_target(&target_entry, map)?;

    let horizon_entry = require(take(&mut entries, "horizon"), "horizon")?;
    let horizons = parse_usize_list(&horizon_entry, "horizon")?;
    let mu_entry = require(take(&mut entries, "mu"), "mu")?;
    let mu_values = parse_f64_list(&mu_entry, "mu")?;
    let eps_entry = require(take(&mut entries, "epsilon"), "epsilon")?;
    let eps_values = parse_f64_list(&eps_entry, "epsilon")?;

    let population_size = parse_opt_usize(take(&mut entries, "np"), "np")?.unwrap_or(50);
    let max_generations =
        parse_opt_usize(take(&mut entries, "max_generations"), "max_generations")?.unwrap_or(1000);
    let n_runs = parse_opt_usize(take(&mut entries, "n_runs"), "n_runs")?.unwrap_or(100);
    let seed = parse_opt_u64(take(&mut entries, "seed"), "seed")?.unwrap_or(0);

    let format = match take(&mut entries, "format") {
        None => OutputFormat::Csv,
        Some(entry) => match entry.value.to_ascii_lowercase().as_str() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => {
                return Err(usage(format!(
                    "line {}: format must be `csv` or `json`, got `{other}`",
                    entry.line
                )))
            }
        },
    };

    let config = ExperimentConfig {
        map,
        x0,
        target,
        horizons,
        mu_values,
        eps_values,
        population_size,
        max_generations,
        n_runs,
        seed,
        format,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.horizons.iter().any(|&n| n < 1) {
        return Err(usage("horizon values must be at least 1"));
    }
    if config.mu_values.iter().any(|&m| !m.is_finite() || m <= 0.0) {
        return Err(usage("mu values must be positive finite reals"));
    }
    if config
        .eps_values
        .iter()
        .any(|&e| !e.is_finite() || e <= 0.0)
    {
        return Err(usage("epsilon values must be positive finite reals"));
    }
    if config.population_size < 2 {
        return Err(usage("np must be at least 2"));
    }
    if config.max_generations < 1 {
        return Err(usage("max_generations must be at least 1"));
    }
    if config.n_runs < 1 {
        return Err(usage("n_runs must be at least 1"));
    }
    if !config.x0.is_finite() || !config.target.is_finite() {
        return Err(usage("x0 and target must be finite"));
    }
    Ok(())
}

fn reject_for_map(entry: &Option<RawEntry>, key: &str, map: &str) -> Result<(), CliError> {
    if let Some(entry) = entry {
        return Err(usage(format!(
            "line {}: key `{key}` does not apply to map={map}",
            entry.line
        )));
    }
    Ok(())
}

fn parse_opt_f64(entry: Option<RawEntry>, key: &str) -> Result<Option<f64>, CliError> {
    entry
        .map(|e| {
            e.value
                .parse::<f64>()
                .map_err(|_| usage(format!("line {}: `{key}` is not a number", e.line)))
        })
        .transpose()
}

fn parse_opt_usize(entry: Option<RawEntry>, key: &str) -> Result<Option<usize>, CliError> {
    entry
        .map(|e| {
            e.value
                .parse::<usize>()
                .map_err(|_| usage(format!("line {}: `{key}` is not a count", e.line)))
        })
        .transpose()
}

fn parse_opt_u64(entry: Option<RawEntry>, key: &str) -> Result<Option<u64>, CliError> {
    entry
        .map(|e| {
            e.value
                .parse::<u64>()
                .map_err(|_| usage(format!("line {}: `{key}` is not a 64-bit seed", e.line)))
        })
        .transpose()
}

fn parse_f64_list(entry: &RawEntry, key: &str) -> Result<Vec<f64>, CliError> {
    entry
        .value
        .split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                usage(format!(
                    "line {}: `{key}` list element `{}` is not a number",
                    entry.line,
                    part.trim()
                ))
            })
        })
        .collect()
}

fn parse_usize_list(entry: &RawEntry, key: &str) -> Result<Vec<usize>, CliError> {
    entry
        .value
        .split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| {
                usage(format!(
                    "line {}: `{key}` list element `{}` is not a count",
                    entry.line,
                    part.trim()
                ))
            })
        })
        .collect()
}

fn parse_state(entry: &RawEntry, key: &str) -> Result<State2, CliError> {
    let values = parse_f64_list(entry, key)?;
    if values.len() != 2 {
        return Err(usage(format!(
            "line {}: `{key}` needs exactly two components",
            entry.line
        )));
    }
    Ok(State2::new(values[0], values[1]))
}

/// "fixed-point" resolves through the Hénon closed form at load time.
fn resolve_target(entry: &RawEntry, map: ChaoticMap) -> Result<State2, CliError> {
    if entry.value.eq_ignore_ascii_case("fixed-point") {
        match map {
            ChaoticMap::Henon { p, q } => henon_fixed_point(p, q).map_err(|e| {
                usage(format!(
                    "line {}: cannot resolve fixed point: {e}",
                    entry.line
                ))
            }),
            ChaoticMap::Ushio { .. } => Err(usage(format!(
                "line {}: `fixed-point` target is only defined for map=henon",
                entry.line
            ))),
        }
    } else {
        parse_state(entry, "target")
    }
}

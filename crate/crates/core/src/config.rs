//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # high-interaction run
//! n = 100
//! h = 0.1
//! eps = 0.45
//! block = -0.6, 20
//! block = -0.4, 28
//! sweep_eps = 0.05, 0.45
//! ```
//!
//! Keys: `n`, `h`, `eps`, `max_steps`, `tol`, `seed`, repeated `block`,
//! `values`, `sweep_eps`, `record_all`, `trajectory_path`, `summary_path`.
//! The initial profile is given by `values`, by `block` lines, or, when only
//! `seed` and `n` are present, drawn uniformly from (-1,1) with that seed.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Explicit(Vec<f64>),
    /// `(value, count)` runs, in order.
    Blocks(Vec<(f64, usize)>),
    /// `count` opinions uniform on (-1,1) from a ChaCha8 stream seeded with `seed`.
    Random { count: usize, seed: u64 },
}

impl InitialSpec {
    pub fn len(&self) -> usize {
        match self {
            Self::Explicit(v) => v.len(),
            Self::Blocks(b) => b.iter().map(|(_, c)| c).sum(),
            Self::Random { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub h: f64,
    pub eps: f64,
    pub initial: InitialSpec,
    pub max_steps: usize,
    pub tol: f64,
    pub record_all: bool,
    pub trajectory_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    pub sweep_eps: Vec<f64>,
}

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;
pub const DEFAULT_TOL: f64 = 1e-12;

impl ExperimentConfig {
    pub fn new(h: f64, eps: f64, initial: InitialSpec) -> Self {
        Self {
            h,
            eps,
            initial,
            max_steps: DEFAULT_MAX_STEPS,
            tol: DEFAULT_TOL,
            record_all: false,
            trajectory_path: None,
            summary_path: None,
            sweep_eps: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.initial.len()
    }

    /// Renders the configuration in the format accepted by [`parse_config`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("n", self.n().to_string());
        line("h", self.h.to_string());
        line("eps", self.eps.to_string());
        line("max_steps", self.max_steps.to_string());
        line("tol", self.tol.to_string());
        match &self.initial {
            InitialSpec::Explicit(v) => line("values", join(v)),
            InitialSpec::Blocks(blocks) => {
                for (v, c) in blocks {
                    line("block", format!("{v}, {c}"));
                }
            }
            InitialSpec::Random { seed, .. } => line("seed", seed.to_string()),
        }
        if !self.sweep_eps.is_empty() {
            line("sweep_eps", join(&self.sweep_eps));
        }
        if self.record_all {
            line("record_all", "true".into());
        }
        if let Some(p) = &self.trajectory_path {
            line("trajectory_path", p.display().to_string());
        }
        if let Some(p) = &self.summary_path {
            line("summary_path", p.display().to_string());
        }
        out
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
}

/// Every problem found in a configuration document.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

const KEYS: &[&str] = &[
    "n",
    "h",
    "eps",
    "max_steps",
    "tol",
    "seed",
    "block",
    "values",
    "sweep_eps",
    "record_all",
    "trajectory_path",
    "summary_path",
];

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut single: HashMap<&str, (usize, String)> = HashMap::new();
    let mut blocks: Vec<(usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(ConfigError::Parse {
                line: line_no,
                message: "expected `key = value`".into(),
            });
            continue;
        };
        let (key, value) = (key.trim(), value.trim().to_string());
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            errors.push(ConfigError::Parse {
                line: line_no,
                message: format!("unknown key `{key}`"),
            });
            continue;
        };
        if key == "block" {
            blocks.push((line_no, value));
        } else if single.insert(key, (line_no, value)).is_some() {
            errors.push(ConfigError::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
    }

    let mut parse_err = |line: usize, message: String| errors.push(ConfigError::Parse { line, message });
    let mut scalar = |key: &str| -> Option<f64> {
        let (line, v) = single.get(key)?;
        match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                parse_err(*line, format!("`{key}` expects a number, got `{v}`"));
                None
            }
        }
    };
    let h = scalar("h");
    let eps = scalar("eps");
    let tol = scalar("tol");

    let mut integer = |key: &str| -> Option<u64> {
        let (line, v) = single.get(key)?;
        match v.parse::<u64>() {
            Ok(x) => Some(x),
            Err(_) => {
                errors.push(ConfigError::Parse {
                    line: *line,
                    message: format!("`{key}` expects a nonnegative integer, got `{v}`"),
                });
                None
            }
        }
    };
    let n = integer("n");
    let max_steps = integer("max_steps");
    let seed = integer("seed");

    let list = |key: &str, errors: &mut Vec<ConfigError>| -> Option<Vec<f64>> {
        let (line, v) = single.get(key)?;
        let mut out = Vec::new();
        for item in v.split(',') {
            match item.trim().parse::<f64>() {
                Ok(x) => out.push(x),
                Err(_) => {
                    errors.push(ConfigError::Parse {
                        line: *line,
                        message: format!("`{key}` entry `{}` is not a number", item.trim()),
                    });
                    return None;
                }
            }
        }
        Some(out)
    };
    let values = list("values", &mut errors);
    let sweep_eps = list("sweep_eps", &mut errors).unwrap_or_default();

    let mut parsed_blocks = Vec::new();
    for (line, v) in &blocks {
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [value, count] => match (value.parse::<f64>(), count.parse::<usize>()) {
                (Ok(value), Ok(count)) => parsed_blocks.push((value, count)),
                _ => errors.push(ConfigError::Parse {
                    line: *line,
                    message: format!("`block` expects `value, count`, got `{v}`"),
                }),
            },
            _ => errors.push(ConfigError::Parse {
                line: *line,
                message: format!("`block` expects `value, count`, got `{v}`"),
            }),
        }
    }

    let record_all = match single.get("record_all") {
        None => false,
        Some((line, v)) => match v.as_str() {
            "true" => true,
            "false" => false,
            _ => {
                errors.push(ConfigError::Parse {
                    line: *line,
                    message: format!("`record_all` expects true or false, got `{v}`"),
                });
                false
            }
        },
    };
    let path = |key: &str| single.get(key).map(|(_, v)| PathBuf::from(v));

    let mut invalid = |field: &str, message: String| {
        errors.push(ConfigError::Validation {
            field: field.into(),
            message,
        })
    };
    let open_unit = |x: f64| x > 0.0 && x < 1.0;
    match h {
        Some(x) if !open_unit(x) => invalid("h", "must be in (0,1)".into()),
        None if !single.contains_key("h") => invalid("h", "missing".into()),
        _ => {}
    }
    match eps {
        Some(x) if !open_unit(x) => invalid("eps", "must be in (0,1)".into()),
        None if !single.contains_key("eps") => invalid("eps", "missing".into()),
        _ => {}
    }
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            invalid("tol", "must be positive".into());
        }
    }
    if max_steps == Some(0) {
        invalid("max_steps", "must be at least 1".into());
    }
    if sweep_eps.iter().any(|e| !open_unit(*e)) {
        invalid("sweep_eps", "every value must be in (0,1)".into());
    }

    let sources = [values.is_some() || single.contains_key("values"), !blocks.is_empty()];
    let initial = match (values, sources) {
        (_, [true, true]) => {
            invalid("initial", "give either `values` or `block` lines, not both".into());
            None
        }
        (Some(v), _) => Some(InitialSpec::Explicit(v)),
        (None, [false, true]) => Some(InitialSpec::Blocks(parsed_blocks)),
        (None, [true, false]) => None,
        (None, [false, false]) => match (seed, n) {
            (Some(seed), Some(n)) => Some(InitialSpec::Random {
                count: n as usize,
                seed,
            }),
            (Some(_), None) => {
                invalid("n", "a random initial profile needs `n`".into());
                None
            }
            _ if single.contains_key("seed") => None,
            _ => {
                invalid("initial", "missing: give `values`, `block` lines, or `seed` with `n`".into());
                None
            }
        },
    };
    if let Some(init) = &initial {
        if seed.is_some() && !matches!(init, InitialSpec::Random { .. }) {
            invalid("seed", "only used for a random initial profile".into());
        }
        if init.is_empty() {
            invalid("initial", "profile has no agents".into());
        }
        let in_range = match init {
            InitialSpec::Explicit(v) => v.iter().all(|x| x.abs() <= 1.0),
            InitialSpec::Blocks(b) => b.iter().all(|(x, _)| x.abs() <= 1.0),
            InitialSpec::Random { .. } => true,
        };
        if !in_range {
            invalid("initial", "opinions must lie in [-1,1]".into());
        }
        if let Some(n) = n {
            if init.len() as u64 != n {
                invalid(
                    "initial",
                    format!("count mismatch: n = {n} but the profile has {} agents", init.len()),
                );
            }
        }
    }

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    let (Some(h), Some(eps), Some(initial)) = (h, eps, initial) else {
        unreachable!("missing fields are reported as errors");
    };
    Ok(ExperimentConfig {
        h,
        eps,
        initial,
        max_steps: max_steps.map_or(DEFAULT_MAX_STEPS, |m| m as usize),
        tol: tol.unwrap_or(DEFAULT_TOL),
        record_all,
        trajectory_path: path("trajectory_path"),
        summary_path: path("summary_path"),
        sweep_eps,
    })
}

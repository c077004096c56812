//! Run configuration: file and flag layers, defaults, validation.
//!
//! Precedence is flags > file > defaults. The resolved configuration has
//! every default filled in, so feeding it back reproduces the run.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Constants,
    Classify,
    Simulate,
    Kernel,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Classify => "classify",
            Command::Simulate => "simulate",
            Command::Kernel => "kernel",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<Command>,
    /// Reserved; every computation is deterministic.
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub problem: Problem,
    pub initial: Initial,
    pub grid: Grid,
    pub time: Time,
    pub output: Output,
    pub kernel: KernelGrid,
    pub verify: Verify,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Problem {
    pub d: Option<u32>,
    pub alpha: Option<f64>,
    /// `a:b`, inclusive (constants).
    pub d_range: Option<String>,
    /// Orders tabulated by constants.
    pub alphas: Option<Vec<f64>>,
    #[serde(rename = "T_target")]
    pub t_target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Initial {
    pub profile: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub r_max: Option<f64>,
    pub n: Option<usize>,
    pub inner_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Time {
    pub t_end: Option<f64>,
    /// Absent: 1e8 times the initial origin density.
    pub density_cap: Option<f64>,
    pub dt_floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    /// Output directory. Absent: the primary artifact goes to stdout.
    pub path: Option<PathBuf>,
    pub stride: Option<usize>,
    pub format: Option<Format>,
    pub svg: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelGrid {
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub per_decade: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Verify {
    pub only: Option<Vec<String>>,
    /// Added to the quadrature value of C(2); exercises the failure path.
    pub perturb_c2: Option<f64>,
}

impl RunConfig {
    /// Parses TOML, or JSON when the path ends in `.json`.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        Self::from_text(&text, json).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn from_text(text: &str, json: bool) -> CliResult<Self> {
        let describe = |path: String, msg: String| {
            if path.is_empty() || path == "." {
                CliError::config(msg)
            } else {
                CliError::config(format!("at key '{path}': {msg}"))
            }
        };
        if json {
            let de = &mut serde_json::Deserializer::from_str(text);
            serde_path_to_error::deserialize(de).map_err(|e| describe(e.path().to_string(), e.inner().to_string()))
        } else {
            let de = toml::Deserializer::new(text);
            serde_path_to_error::deserialize(de)
                .map_err(|e| describe(e.path().to_string(), e.inner().message().to_string()))
        }
    }

    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        let mut merged = to_value(&base);
        overlay(&mut merged, to_value(&self));
        serde_json::from_value(merged).expect("merged configuration keeps the schema")
    }

    /// Fills defaults that do not depend on the datum, checks the command
    /// and validates ranges shared by every subcommand.
    pub fn resolve(mut self, cmd: Command) -> CliResult<RunConfig> {
        if let Some(c) = self.command {
            if c != cmd {
                return Err(CliError::config(format!(
                    "configuration is for '{}' but the subcommand is '{}'",
                    c.name(),
                    cmd.name()
                )));
            }
        }
        self.command = Some(cmd);
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::config("threads must be at least 1"));
            }
        }
        self.output.format.get_or_insert(Format::Csv);
        match cmd {
            Command::Constants => {
                self.problem.d_range.get_or_insert_with(|| "2:10".into());
                self.problem.alphas.get_or_insert_with(|| vec![2.0]);
            }
            Command::Classify => {
                self.problem.d.get_or_insert(3);
                self.problem.alpha.get_or_insert(2.0);
                if self.initial.profile.is_none() {
                    return Err(CliError::config("classify needs a profile (--profile or [initial] profile)"));
                }
                self.output.svg.get_or_insert(true);
            }
            Command::Simulate => {
                self.problem.d.get_or_insert(3);
                self.problem.alpha.get_or_insert(2.0);
                if self.initial.profile.is_none() {
                    return Err(CliError::config("simulate needs a profile (--profile or [initial] profile)"));
                }
                self.grid.n.get_or_insert(4000);
                self.grid.inner_fraction.get_or_insert(0.25);
                self.output.stride.get_or_insert(50);
                self.output.svg.get_or_insert(true);
            }
            Command::Kernel => {
                self.problem.d.get_or_insert(3);
                self.problem.alpha.get_or_insert(1.0);
            }
            Command::Verify => {
                self.verify.only.get_or_insert_with(Vec::new);
                self.verify.perturb_c2.get_or_insert(0.0);
            }
        }
        Ok(self)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes") + "\n"
    }
}

fn to_value(c: &RunConfig) -> Value {
    serde_json::to_value(c).expect("configuration serializes")
}

fn overlay(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (_, Value::Null) => {}
        (slot, v) => *slot = v,
    }
}

/// `a:b` with 2 ≤ a ≤ b, or a single dimension.
pub fn parse_d_range(s: &str) -> CliResult<Vec<u32>> {
    let bad = || CliError::config(format!("d range '{s}' must be a:b with integers a <= b"));
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse::<u32>().map_err(|_| bad())?, b.trim().parse::<u32>().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse::<u32>().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

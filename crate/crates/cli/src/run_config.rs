//! The resolved parameters shared by every subcommand. Values come from
//! built-in defaults, then a `key = value` file, then command-line flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use drivenjc::config::{parse_config, ConfigFile};
use drivenjc::scenario::{default_truncation, DetuningMode, Scenario};
use drivenjc::{Error, Process, Result};

/// Keys accepted in a config file.
pub const KEYS: [&str; 8] = ["process", "omega_over_g", "dsigma", "f", "n", "m", "truncation", "out_dir"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub process: Process,
    pub omega_over_g: f64,
    pub dsigma: DetuningMode,
    pub f: f64,
    pub n: usize,
    pub m: usize,
    pub truncations: Vec<usize>,
    pub out_dir: PathBuf,
}

/// Unresolved values from one source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfigOverrides {
    pub process: Option<Process>,
    pub omega_over_g: Option<f64>,
    pub dsigma: Option<DetuningMode>,
    pub f: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub truncations: Option<Vec<usize>>,
    pub out_dir: Option<PathBuf>,
}

/// Comma-separated truncations: one value applies to every mode.
pub fn parse_truncations(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid("truncation", format!("`{}` is not a nonnegative integer", t.trim())))
        })
        .collect()
}

/// Omega/g used when neither file nor flags give one.
pub fn default_omega_over_g(process: Process) -> f64 {
    match process {
        Process::I => 80.0,
        Process::II => 40.0,
        Process::III => 20.0,
    }
}

impl RunConfigOverrides {
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        if let Some(bad) = file.keys().find(|k| !KEYS.contains(k)) {
            return Err(Error::Parse {
                line: file.line_of(bad).unwrap_or(0),
                message: format!("unknown key `{bad}` (expected one of {})", KEYS.join(", ")),
            });
        }
        let truncations = match file.get("truncation") {
            Some(v) => Some(parse_truncations(v).map_err(|e| Error::Parse {
                line: file.line_of("truncation").unwrap_or(0),
                message: e.to_string(),
            })?),
            None => None,
        };
        Ok(RunConfigOverrides {
            process: file.parse("process")?,
            omega_over_g: file.parse("omega_over_g")?,
            dsigma: file.parse("dsigma")?,
            f: file.parse("f")?,
            n: file.parse("n")?,
            m: file.parse("m")?,
            truncations,
            out_dir: file.get("out_dir").map(PathBuf::from),
        })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_file(&parse_config(text)?)
    }

    /// `self` with every value set in `top` replaced.
    pub fn overlay(self, top: RunConfigOverrides) -> Self {
        RunConfigOverrides {
            process: top.process.or(self.process),
            omega_over_g: top.omega_over_g.or(self.omega_over_g),
            dsigma: top.dsigma.or(self.dsigma),
            f: top.f.or(self.f),
            n: top.n.or(self.n),
            m: top.m.or(self.m),
            truncations: top.truncations.or(self.truncations),
            out_dir: top.out_dir.or(self.out_dir),
        }
    }

    /// Fills defaults and validates everything the scenario will need.
    pub fn resolve(self) -> Result<RunConfig> {
        let process = self.process.unwrap_or(Process::I);
        let count = process.cavity_count();
        let truncations = match self.truncations {
            None => vec![default_truncation(process); count],
            Some(t) if t.len() == 1 => vec![t[0]; count],
            Some(t) => t,
        };
        let cfg = RunConfig {
            process,
            omega_over_g: self.omega_over_g.unwrap_or_else(|| default_omega_over_g(process)),
            dsigma: self.dsigma.unwrap_or(DetuningMode::Resonant),
            f: self.f.unwrap_or(0.25),
            n: self.n.unwrap_or(0),
            m: self.m.unwrap_or(0),
            truncations,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.scenario().validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    /// Energies in units of `g`.
    pub fn scenario(&self) -> Scenario {
        Scenario {
            process: self.process,
            g: 1.0,
            omega: self.omega_over_g,
            dsigma: self.dsigma,
            f: self.f,
            n: self.n,
            m: self.m,
            truncations: self.truncations.clone(),
        }
    }

    /// `key = value` pairs for CSV headers.
    pub fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("process".into(), self.process.to_string()),
            ("omega_over_g".into(), self.omega_over_g.to_string()),
            ("dsigma".into(), self.dsigma.to_string()),
            ("f".into(), self.f.to_string()),
            ("n".into(), self.n.to_string()),
            ("m".into(), self.m.to_string()),
            (
                "truncation".into(),
                self.truncations.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
            ),
        ]
    }
}

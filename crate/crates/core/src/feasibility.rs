//! Effective-rate-to-decoherence ratios for experimental platforms, each
//! process at its own optimal qubit detuning.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::effective::analytic::{g_eff_signed, optimal_detuning, validate_f};
use crate::effective::Process;
use crate::error::{Error, Result};
use crate::models::DressedFrame;
use crate::output::{num, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub name: String,
    /// `g / 2pi` in Hz.
    pub g_over_2pi: f64,
    /// `gamma / 2pi` in Hz, the largest decoherence rate.
    pub gamma_over_2pi: f64,
    /// Reference `(I, II, III)` ratios, when the file carries them.
    pub reference: Option<[f64; 3]>,
}

impl Platform {
    pub fn new(name: impl Into<String>, g_over_2pi: f64, gamma_over_2pi: f64) -> Result<Self> {
        let p = Platform {
            name: name.into(),
            g_over_2pi,
            gamma_over_2pi,
            reference: None,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.g_over_2pi.is_finite() && self.g_over_2pi > 0.0) {
            return Err(Error::invalid("g_over_2pi", format!("{}: must be > 0", self.name)));
        }
        if !(self.gamma_over_2pi.is_finite() && self.gamma_over_2pi > 0.0) {
            return Err(Error::invalid("gamma_over_2pi", format!("{}: must be > 0", self.name)));
        }
        Ok(())
    }

    pub fn g_over_gamma(&self) -> f64 {
        self.g_over_2pi / self.gamma_over_2pi
    }
}

fn parse_number(field: &str, line: usize, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{what}: `{}` is not a number", field.trim()),
    })
}

/// Parses `name, g/2pi [Hz], gamma/2pi [Hz][, ref_I, ref_II, ref_III]` rows.
/// Blank lines and `#` comments are skipped; a first row whose second field
/// is not numeric is taken as a header.
pub fn parse_platforms(text: &str) -> Result<Vec<Platform>> {
    let mut out = Vec::new();
    let mut seen_data = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(content.as_bytes());
        let record = match reader.records().next() {
            Some(r) => r.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?,
            None => continue,
        };
        let fields: Vec<&str> = record.iter().collect();
        if !seen_data && fields.len() >= 2 && fields[1].parse::<f64>().is_err() {
            seen_data = true;
            continue;
        }
        seen_data = true;
        if fields.len() != 3 && fields.len() != 6 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 or 6 fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty platform name".into(),
            });
        }
        let g = parse_number(fields[1], line, "g/2pi")?;
        let gamma = parse_number(fields[2], line, "gamma/2pi")?;
        let reference = if fields.len() == 6 {
            Some([
                parse_number(fields[3], line, "ref_I")?,
                parse_number(fields[4], line, "ref_II")?,
                parse_number(fields[5], line, "ref_III")?,
            ])
        } else {
            None
        };
        let p = Platform {
            name: fields[0].to_string(),
            g_over_2pi: g,
            gamma_over_2pi: gamma,
            reference,
        };
        p.validate().map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(p);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no platform rows".into(),
        });
    }
    Ok(out)
}

pub fn load_platforms(path: &Path) -> Result<Vec<Platform>> {
    parse_platforms(&std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?)
}

/// How the qubit detuning is set for every process of a feasibility row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatingDetuning {
    Resonant,
    Optimal,
}

/// `|g_eff / g|` of `process` at `omega = omega_over_g * g`.
pub fn g_eff_over_g(process: Process, omega_over_g: f64, f: f64, detuning: OperatingDetuning) -> Result<f64> {
    if !(omega_over_g.is_finite() && omega_over_g > 0.0) {
        return Err(Error::invalid("omega_over_g", format!("must be > 0, got {omega_over_g}")));
    }
    validate_f(Process::I, f)?;
    let ds = match detuning {
        OperatingDetuning::Resonant => 0.0,
        OperatingDetuning::Optimal => optimal_detuning(process, omega_over_g, f)?,
    };
    let frame = DressedFrame::new(omega_over_g, ds)?;
    Ok(g_eff_signed(process, &frame, f, 1.0).abs())
}

/// `|g_eff^X(dsigma*)| / gamma` for X = I, II, III.
pub fn feasibility_row(p: &Platform, omega_over_g: f64, f: f64) -> Result<[f64; 3]> {
    row_at(p, omega_over_g, f, OperatingDetuning::Optimal)
}

pub fn row_at(p: &Platform, omega_over_g: f64, f: f64, detuning: OperatingDetuning) -> Result<[f64; 3]> {
    p.validate()?;
    let mut out = [0.0; 3];
    for (slot, process) in out.iter_mut().zip(Process::ALL) {
        *slot = g_eff_over_g(process, omega_over_g, f, detuning)? * p.g_over_gamma();
    }
    Ok(out)
}

/// Agreement window for a value printed with the table's precision.
pub fn printed_tolerance(printed: f64) -> f64 {
    if printed.abs() > 1.0 {
        0.5
    } else {
        0.05
    }
}

pub fn feasibility_table(platforms: &[Platform], omega_over_g: f64, f: f64) -> Result<Table> {
    let mut t = Table::new([
        "platform",
        "g_over_2pi_hz",
        "gamma_over_2pi_hz",
        "geff_I_over_gamma",
        "geff_II_over_gamma",
        "geff_III_over_gamma",
    ]);
    for p in platforms {
        let r = feasibility_row(p, omega_over_g, f)?;
        let mut row = vec![p.name.clone(), num(p.g_over_2pi), num(p.gamma_over_2pi)];
        row.extend(r.iter().map(|&x| num(x)));
        t.push(row);
    }
    Ok(t)
}

/// One candidate operating point of a reconstruction scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub f: f64,
    pub detuning: OperatingDetuning,
    /// Printed values reproduced within [`printed_tolerance`].
    pub matches: usize,
    pub total: usize,
    /// Largest `|computed - printed| / tolerance`.
    pub worst: f64,
}

/// Compares every `(f, detuning)` candidate against the reference ratios of
/// `platforms` (rows without references are skipped).
pub fn operating_point_scan(platforms: &[Platform], omega_over_g: f64, fs: &[f64]) -> Result<Vec<ScanRow>> {
    let mut out = Vec::new();
    for &f in fs {
        for detuning in [OperatingDetuning::Resonant, OperatingDetuning::Optimal] {
            let (mut matches, mut total, mut worst) = (0, 0, 0.0f64);
            for p in platforms {
                let Some(reference) = p.reference else { continue };
                let row = row_at(p, omega_over_g, f, detuning)?;
                for (v, r) in row.iter().zip(reference) {
                    let excess = (v - r).abs() / printed_tolerance(r);
                    total += 1;
                    if excess <= 1.0 {
                        matches += 1;
                    }
                    worst = worst.max(excess);
                }
            }
            out.push(ScanRow {
                f,
                detuning,
                matches,
                total,
                worst,
            });
        }
    }
    Ok(out)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use drivenjc::scenario::DetuningMode;
use drivenjc::{Process, Result};

use crate::run_config::{parse_truncations, RunConfigOverrides};

#[derive(Debug, Parser)]
#[command(name = "drivenjc", version, about = "Parity-breaking processes in singly driven Jaynes-Cummings systems")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Parameters shared by all subcommands. Energies are in units of g.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// I, II or III.
    #[arg(long, global = true)]
    pub process: Option<Process>,
    #[arg(long, global = true)]
    pub omega_over_g: Option<f64>,
    /// resonant, optimal, or an explicit qubit detuning in units of g.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dsigma: Option<DetuningMode>,
    /// Detuning split D1 = 2Rf (processes I and II).
    #[arg(long, global = true)]
    pub f: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Photon truncation, one value or one per mode (comma separated).
    #[arg(long, global = true)]
    pub truncation: Option<String>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

impl Common {
    pub fn overrides(&self) -> Result<RunConfigOverrides> {
        Ok(RunConfigOverrides {
            process: self.process,
            omega_over_g: self.omega_over_g,
            dsigma: self.dsigma,
            f: self.f,
            n: self.n,
            m: self.m,
            truncations: self.truncation.as_deref().map(parse_truncations).transpose()?,
            out_dir: self.out_dir.clone(),
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels against the swept cavity detuning.
    Spectrum {
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Axis start; defaults to 0.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        /// Axis end; defaults to twice the bare resonance.
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
    },
    /// Locate the avoided crossing and compare its splitting with g_eff.
    Crossing {
        /// Bracket half-width in units of the analytic g_eff.
        #[arg(long, default_value_t = 20.0)]
        width: f64,
    },
    /// Analytic vs numeric splitting over a range of omega/g.
    Validity {
        /// Comma-separated omega/g values (all > 1).
        #[arg(long, default_value = "1.2,1.5,2,3,5,7,10,15,20,30,40,50,60,80,100")]
        scan: String,
    },
    /// Closed-system Rabi oscillation between the two target states.
    Rabi {
        /// Duration in full Rabi periods.
        #[arg(long, default_value_t = 2.0)]
        periods: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// Rabi oscillation with cavity loss.
    Lindblad {
        /// Decay rates in units of g_eff (comma separated).
        #[arg(long, default_value = "0,0.25,0.5,1")]
        gamma_over_geff: String,
        /// Duration in transfer times pi / (2 g_eff).
        #[arg(long, default_value_t = 1.5)]
        duration: f64,
        #[arg(long, default_value_t = 301)]
        samples: usize,
    },
    /// Prepare, drive and read out (process I).
    Protocol {
        /// Drive window in transfer times pi / (2 g_eff).
        #[arg(long, default_value_t = 1.0)]
        drive: f64,
        /// Idle time before the drive, in units of 1/g.
        #[arg(long, default_value_t = 0.0)]
        prepare: f64,
        /// Idle time after the drive, in units of 1/g.
        #[arg(long, default_value_t = 0.0)]
        readout: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Rate-to-decoherence ratios for experimental platforms.
    Table {
        /// Platform file (name, g/2pi, gamma/2pi); defaults to the bundled list.
        #[arg(long)]
        platforms: Option<PathBuf>,
    },
    /// Closed-form effective parameters, with the elimination-engine values.
    Effparams,
}

pub fn parse_list(name: &'static str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| drivenjc::Error::invalid(name, format!("`{}` is not a number", t.trim())))
        })
        .collect()
}

//! Effective Hamiltonians of the three parity-breaking processes.
//!
//! [`engine`] eliminates a detuned block numerically; [`analytic`] holds the
//! closed-form rates; [`subspace`] lists the states each process keeps and
//! eliminates. The two routes validate each other.

pub mod analytic;
pub mod engine;
pub mod subspace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use analytic::{analytic_params, EffectiveParams};
pub use engine::{effective_correction, EffectiveBlock, SubspacePartition};
pub use subspace::{subspace_for, BareSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Process {
    /// `|+, n, m> <-> |-, n+1, m+1>`: one qubit excitation into two photons.
    I,
    /// `|n+1, m, -> <-> |n, m+1, +>`: frequency conversion.
    II,
    /// `|+, +, n> <-> |-, -, n+1>`: one photon into two qubit excitations.
    III,
}

impl Process {
    pub const ALL: [Process; 3] = [Process::I, Process::II, Process::III];

    /// Whether the process lives in the one-qubit / two-cavity setup.
    pub fn is_two_cavity(self) -> bool {
        !matches!(self, Process::III)
    }

    pub fn cavity_count(self) -> usize {
        if self.is_two_cavity() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Process::I => "I",
            Process::II => "II",
            Process::III => "III",
        })
    }
}

impl FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Process::I),
            "II" | "2" => Ok(Process::II),
            "III" | "3" => Ok(Process::III),
            other => Err(Error::invalid("process", format!("expected I, II or III, got `{other}`"))),
        }
    }
}

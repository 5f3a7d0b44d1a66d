//! A fully specified operating point of one process: drive, cavity
//! detunings, photon indices and truncations. Spectral sweeps and dynamics
//! vary the swept detuning (`D1` for I/II with `D2` held fixed, `Da` for III)
//! and build everything else from here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::effective::analytic::{self, two_cavity_detunings};
use crate::effective::{effective_correction, subspace_for, BareSpectrum, EffectiveParams, Process, SubspacePartition};
use crate::error::{Error, Result};
use crate::hilbert::{OperatorMatrix, SpaceSpec};
use crate::models::{self, DressedFrame, DriveParams, TwoQubitDriveParams};

/// How the qubit-drive detuning is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DetuningMode {
    /// `dsigma = 0`.
    Resonant,
    /// The process-specific `dsigma*` maximizing `|g_eff|` at fixed `omega`.
    Optimal,
    Explicit(f64),
}

impl fmt::Display for DetuningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetuningMode::Resonant => f.write_str("resonant"),
            DetuningMode::Optimal => f.write_str("optimal"),
            DetuningMode::Explicit(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for DetuningMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "resonant" | "zero" => Ok(DetuningMode::Resonant),
            "optimal" | "opt" => Ok(DetuningMode::Optimal),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(DetuningMode::Explicit)
                .ok_or_else(|| {
                    Error::invalid("dsigma", format!("expected resonant, optimal or a number, got `{other}`"))
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub process: Process,
    pub g: f64,
    pub omega: f64,
    pub dsigma: DetuningMode,
    /// Detuning split for I/II; unused by III.
    pub f: f64,
    pub n: usize,
    pub m: usize,
    /// One truncation per cavity mode.
    pub truncations: Vec<usize>,
}

/// Default photon truncation per mode.
pub fn default_truncation(process: Process) -> usize {
    match process {
        Process::I | Process::II => 3,
        Process::III => 4,
    }
}

impl Scenario {
    /// `g = 1`, resonant drive, `f = 1/4`, `n = m = 0`, default truncations.
    pub fn new(process: Process, omega: f64) -> Self {
        Scenario {
            process,
            g: 1.0,
            omega,
            dsigma: DetuningMode::Resonant,
            f: 0.25,
            n: 0,
            m: 0,
            truncations: vec![default_truncation(process); process.cavity_count()],
        }
    }

    pub fn with_dsigma(mut self, mode: DetuningMode) -> Self {
        self.dsigma = mode;
        self
    }

    pub fn with_f(mut self, f: f64) -> Self {
        self.f = f;
        self
    }

    pub fn with_photons(mut self, n: usize, m: usize) -> Self {
        self.n = n;
        self.m = m;
        self
    }

    pub fn with_truncation(mut self, truncation: usize) -> Self {
        self.truncations = vec![truncation; self.process.cavity_count()];
        self
    }

    /// The same scenario with every truncation raised by `extra`.
    pub fn enlarged(&self, extra: usize) -> Self {
        let mut out = self.clone();
        for t in &mut out.truncations {
            *t += extra;
        }
        out
    }

    /// Checks every parameter against the preconditions of the modules it
    /// feeds.
    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::invalid("g", "must be finite and >= 0"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid("omega", format!("must be > 0, got {}", self.omega)));
        }
        if self.truncations.len() != self.process.cavity_count() {
            return Err(Error::invalid(
                "truncations",
                format!(
                    "process {} needs {} truncation(s), got {}",
                    self.process,
                    self.process.cavity_count(),
                    self.truncations.len()
                ),
            ));
        }
        if self.truncations.contains(&0) {
            return Err(Error::invalid("truncations", "must be >= 1"));
        }
        let needed = [self.n + 1, self.m + 1];
        for (k, &t) in self.truncations.iter().enumerate() {
            if t < needed[k] {
                return Err(Error::TruncationTooSmall {
                    mode: k,
                    required: needed[k],
                    available: t,
                });
            }
        }
        analytic::validate_f(self.process, self.f)?;
        self.frame().map(|_| ())
    }

    pub fn dsigma_value(&self) -> Result<f64> {
        match self.dsigma {
            DetuningMode::Resonant => Ok(0.0),
            DetuningMode::Optimal => analytic::optimal_detuning(self.process, self.omega, self.f),
            DetuningMode::Explicit(v) if v.is_finite() => Ok(v),
            DetuningMode::Explicit(_) => Err(Error::invalid("dsigma", "must be finite")),
        }
    }

    pub fn frame(&self) -> Result<DressedFrame> {
        DressedFrame::new(self.omega, self.dsigma_value()?)
    }

    pub fn analytic(&self) -> Result<EffectiveParams> {
        analytic::analytic_params(self.process, &self.frame()?, self.f, self.n, self.m, self.g)
    }

    /// The same rates with a resonant drive, for enhancement ratios.
    pub fn analytic_resonant(&self) -> Result<EffectiveParams> {
        self.clone().with_dsigma(DetuningMode::Resonant).analytic()
    }

    /// The held detuning `D2` (I/II); `None` for III.
    pub fn fixed_detuning(&self) -> Result<Option<f64>> {
        if !self.process.is_two_cavity() {
            return Ok(None);
        }
        let r = self.frame()?.rabi;
        Ok(Some(two_cavity_detunings(self.process, r, self.f).1))
    }

    /// Bare resonance of the swept detuning.
    pub fn bare_resonance(&self) -> Result<f64> {
        Ok(self.analytic()?.bare_resonance())
    }

    /// Bare resonance corrected by `delta`.
    pub fn resonance_guess(&self) -> Result<f64> {
        Ok(self.analytic()?.resonance())
    }

    pub fn space(&self) -> Result<SpaceSpec> {
        match self.process {
            Process::I | Process::II => models::two_cavity_space(self.truncations[0], self.truncations[1]),
            Process::III => models::two_qubit_space(self.truncations[0]),
        }
    }

    fn drive(&self, swept: f64) -> Result<DriveParams> {
        Ok(DriveParams {
            g: self.g,
            omega: self.omega,
            dsigma: self.dsigma_value()?,
            delta1: swept,
            delta2: self.fixed_detuning()?.unwrap_or(0.0),
        })
    }

    fn two_qubit_drive(&self, swept: f64) -> Result<TwoQubitDriveParams> {
        Ok(TwoQubitDriveParams {
            g: self.g,
            omega: self.omega,
            dsigma: self.dsigma_value()?,
            delta_a: swept,
        })
    }

    /// Drive parameters of the one-qubit setup at a given `D1`.
    pub fn drive_params(&self, swept: f64) -> Result<DriveParams> {
        if !self.process.is_two_cavity() {
            return Err(Error::invalid("process", "drive_params needs process I or II"));
        }
        self.drive(swept)
    }

    /// Dressed-basis Hamiltonian at the swept detuning.
    pub fn rotated(&self, swept: f64) -> Result<OperatorMatrix> {
        let t = &self.truncations;
        match self.process {
            Process::I | Process::II => models::build_process_i_ii_rotated(&self.drive(swept)?, t[0], t[1]),
            Process::III => models::build_process_iii_rotated(&self.two_qubit_drive(swept)?, t[0]),
        }
    }

    /// Drive-frame Hamiltonian at the swept detuning.
    pub fn lab(&self, swept: f64) -> Result<OperatorMatrix> {
        let t = &self.truncations;
        match self.process {
            Process::I | Process::II => models::build_process_i_ii_lab(&self.drive(swept)?, t[0], t[1]),
            Process::III => models::build_process_iii_lab(&self.two_qubit_drive(swept)?, t[0]),
        }
    }

    /// Constant offset between the lab and rotated spectra.
    pub fn frame_shift(&self) -> Result<f64> {
        let ds = self.dsigma_value()?;
        Ok(match self.process {
            Process::I | Process::II => models::rotated_shift_i_ii(ds),
            Process::III => models::rotated_shift_iii(ds),
        })
    }

    fn bare_spectrum(&self, swept: f64) -> Result<BareSpectrum> {
        let mut mode_detunings = vec![swept];
        mode_detunings.extend(self.fixed_detuning()?);
        Ok(BareSpectrum {
            rabi: self.frame()?.rabi,
            mode_detunings,
        })
    }

    /// Kept/eliminated partition at the swept detuning.
    pub fn partition(&self, swept: f64) -> Result<SubspacePartition> {
        subspace_for(self.process, self.n, self.m, &self.space()?, &self.bare_spectrum(swept)?)
    }

    /// Indices of the two kept product states in the rotated basis; the
    /// first is the one containing `|+>`.
    pub fn targets(&self) -> Result<(usize, usize)> {
        let spec = self.space()?;
        let (n, m) = (self.n, self.m);
        let levels: [Vec<usize>; 2] = match self.process {
            Process::I => [vec![1, n, m], vec![0, n + 1, m + 1]],
            Process::II => [vec![1, n, m + 1], vec![0, n + 1, m]],
            Process::III => [vec![1, 1, n], vec![0, 0, n + 1]],
        };
        let index = |lv: &[usize]| {
            spec.index_of(lv).ok_or_else(|| {
                let mode = lv[1..].iter().position(|&l| l > self.truncations[0]).unwrap_or(0);
                Error::TruncationTooSmall {
                    mode,
                    required: lv.iter().skip(1).copied().max().unwrap_or(0),
                    available: self.truncations.iter().copied().min().unwrap_or(0),
                }
            })
        };
        Ok((index(&levels[0])?, index(&levels[1])?))
    }

    /// `(start, partner, mode)`: the kept state a transfer starts from, the
    /// state it goes to, and the photon-number observable that rises from
    /// about `n` to `n + 1` on the way (`n_1`, `n_2` or `n_a`).
    pub fn transfer_setup(&self) -> Result<(usize, usize, &'static str)> {
        let (plus, minus) = self.targets()?;
        Ok(match self.process {
            Process::I => (plus, minus, "n_1"),
            Process::II => (minus, plus, "n_2"),
            Process::III => (plus, minus, "n_a"),
        })
    }

    /// Rates extracted from block elimination at the bare resonance.
    ///
    /// For I/II the diagonal difference `d(n, m)` between the two kept states
    /// equals `2 lambda + chi1 (2n+1) + chi2 (2m+1)`, so `d` at `(n, m)`,
    /// `(n+1, m)` and `(n, m+1)` fixes all three shifts. For III
    /// `d = 4 (n+1) chi` and `lambda = chi / 2`.
    pub fn engine_estimate(&self) -> Result<EffectiveParams> {
        self.validate()?;
        let analytic = self.analytic()?;
        let resonance = analytic.bare_resonance();
        let diagonal_difference = |n: usize, m: usize| -> Result<(f64, f64)> {
            let needed = n.max(m) + 3;
            let sc = self
                .clone()
                .with_photons(n, m)
                .with_truncation(needed.max(self.truncations.iter().copied().max().unwrap_or(0)));
            let h = sc.rotated(resonance)?;
            let part = sc.partition(resonance)?;
            let block = effective_correction(&h, &part)?;
            let dh = &block.correction;
            let (plus, minus) = sc.targets()?;
            let pos = |k: usize| part.target.iter().position(|&t| t == k).expect("kept state");
            let (p, q) = (pos(plus), pos(minus));
            Ok(((dh[(p, p)] - dh[(q, q)]).re, dh[(p, q)].norm()))
        };
        let (d, coupling) = diagonal_difference(self.n, self.m)?;
        let mut out = analytic;
        out.g_eff = coupling / analytic.bosonic_factor();
        out.delta = d;
        match self.process {
            Process::I | Process::II => {
                let (dn, _) = diagonal_difference(self.n + 1, self.m)?;
                let (dm, _) = diagonal_difference(self.n, self.m + 1)?;
                let chi1 = (dn - d) / 2.0;
                let chi2 = (dm - d) / 2.0;
                out.chi1 = chi1;
                out.chi2 = Some(chi2);
                out.lambda = (d - chi1 * (2 * self.n + 1) as f64 - chi2 * (2 * self.m + 1) as f64) / 2.0;
            }
            Process::III => {
                out.chi1 = d / (4 * (self.n + 1)) as f64;
                out.lambda = out.chi1 / 2.0;
            }
        }
        Ok(out)
    }
}

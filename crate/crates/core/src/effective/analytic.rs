//! Closed-form effective couplings, dispersive shifts, Lamb shifts and
//! resonance corrections, plus the optimal drive angle and detuning.
//!
//! For processes I and II the cavity detunings are parameterized by
//! `f in (0, 1)`: `D1 = 2fR` and `D2 = 2(1-f)R` (I) or `D2 = 2(f-1)R` (II).
//! Process III works at `Da = 4R`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use super::Process;
use crate::error::{Error, Result};
use crate::models::DressedFrame;
use crate::optimize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub process: Process,
    /// `|g_eff|`.
    pub g_eff: f64,
    /// Sign of `g_eff` in the conventions of [`crate::models`] (+1, -1 or 0).
    pub g_eff_sign: f64,
    /// Dispersive shift of mode 1 (I, II) or of the single mode (III).
    pub chi1: f64,
    /// Dispersive shift of mode 2; `None` for process III.
    pub chi2: Option<f64>,
    pub lambda: f64,
    /// Correction to the bare resonance: `D1 = 2Rf + delta` or `Da = 4R + delta`.
    pub delta: f64,
    /// `None` for process III.
    pub f: Option<f64>,
    pub n: usize,
    pub m: usize,
    pub rabi: f64,
}

impl EffectiveParams {
    pub fn signed_g_eff(&self) -> f64 {
        self.g_eff * self.g_eff_sign
    }

    /// Bosonic factor multiplying `g_eff` in the coupling between the two
    /// kept states: `sqrt((n+1)(m+1))` (I, II) or `sqrt(n+1)` (III).
    pub fn bosonic_factor(&self) -> f64 {
        match self.process {
            Process::I | Process::II => (((self.n + 1) * (self.m + 1)) as f64).sqrt(),
            Process::III => ((self.n + 1) as f64).sqrt(),
        }
    }

    /// The matrix element `g_eff * bosonic_factor` between the kept states.
    pub fn coupling(&self) -> f64 {
        self.g_eff * self.bosonic_factor()
    }

    /// Bare-resonance detuning of the swept cavity: `2Rf` (I, II) or `4R` (III).
    pub fn bare_resonance(&self) -> f64 {
        match (self.process, self.f) {
            (Process::III, _) => 4.0 * self.rabi,
            (_, Some(f)) => 2.0 * self.rabi * f,
            (_, None) => unreachable!("two-cavity processes always carry f"),
        }
    }

    /// Bare resonance plus `delta`.
    pub fn resonance(&self) -> f64 {
        self.bare_resonance() + self.delta
    }
}

fn check_f(f: f64) -> Result<()> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::invalid("f", format!("must lie in (0, 1), got {f}")));
    }
    Ok(())
}

/// Cavity detunings `(D1, D2)` for the two-cavity processes.
pub fn two_cavity_detunings(process: Process, rabi: f64, f: f64) -> (f64, f64) {
    match process {
        Process::I => (2.0 * f * rabi, 2.0 * (1.0 - f) * rabi),
        Process::II | Process::III => (2.0 * f * rabi, 2.0 * (f - 1.0) * rabi),
    }
}

/// Rejects `f` outside `(0, 1)` and, for I/II, points where a cavity is
/// resonant with a first-order (`+-2R`) or competing second-order (`+-R`,
/// `D1 = D2`) process.
pub fn validate_f(process: Process, f: f64) -> Result<()> {
    if process == Process::III {
        return Ok(());
    }
    check_f(f)?;
    const TOL: f64 = 1e-9;
    let (d1, d2) = two_cavity_detunings(process, 1.0, f);
    for (name, d) in [("D1", d1), ("D2", d2)] {
        for k in [-2.0, -1.0, 1.0, 2.0] {
            if (d - k).abs() < TOL {
                return Err(Error::ExcludedResonance {
                    f,
                    detail: format!("{name} = {k}R"),
                });
            }
        }
    }
    if (d1 - d2).abs() < TOL {
        return Err(Error::ExcludedResonance {
            f,
            detail: "D1 = D2".into(),
        });
    }
    Ok(())
}

/// Signed `g_eff` only; cheap enough for optimization loops.
pub fn g_eff_signed(process: Process, frame: &DressedFrame, f: f64, g: f64) -> f64 {
    let (s, c, r) = (frame.s, frame.c, frame.rabi);
    match process {
        Process::I => g * g * c * s.powi(3) / (r * f * (1.0 - f)),
        Process::II => g * g * ((f - 1.0) * c.powi(3) * s + f * c * s.powi(3)) / (r * f * (f - 1.0)),
        Process::III => g.powi(3) * (c.powi(3) * s.powi(3) + 3.0 * c * s.powi(5)) / (3.0 * r * r),
    }
}

/// Dispersive shift of a cavity at detuning `d` from the drive, for the
/// one-qubit / two-cavity processes.
fn chi_two_cavity(frame: &DressedFrame, d: f64, g: f64) -> f64 {
    let (s4, c4, r) = (frame.s.powi(4), frame.c.powi(4), frame.rabi);
    g * g * (c4 / (2.0 * r + d) + s4 / (2.0 * r - d))
}

/// Closed-form effective parameters at the bare resonance of `process`.
pub fn analytic_params(
    process: Process,
    frame: &DressedFrame,
    f: f64,
    n: usize,
    m: usize,
    g: f64,
) -> Result<EffectiveParams> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::invalid("g", "must be finite and >= 0"));
    }
    validate_f(process, f)?;
    let r = frame.rabi;
    let signed = g_eff_signed(process, frame, f, g);
    let (chi1, chi2, lambda, delta) = match process {
        Process::I | Process::II => {
            let (d1, d2) = two_cavity_detunings(process, r, f);
            let chi1 = chi_two_cavity(frame, d1, g);
            let chi2 = chi_two_cavity(frame, d2, g);
            let (s4, c4) = (frame.s.powi(4), frame.c.powi(4));
            let lambda = g * g / 2.0
                * (c4 * (1.0 / (2.0 * r + d1) + 1.0 / (2.0 * r + d2))
                    + s4 * (1.0 / (2.0 * r - d1) + 1.0 / (2.0 * r - d2)));
            let delta = 2.0 * lambda + chi1 * (2 * n + 1) as f64 + chi2 * (2 * m + 1) as f64;
            (chi1, Some(chi2), lambda, delta)
        }
        Process::III => {
            let da = 4.0 * r;
            let chi = g * g * ((2.0 * r - da) * frame.c.powi(4) + (2.0 * r + da) * frame.s.powi(4))
                / (4.0 * r * r - da * da);
            let lambda = chi / 2.0;
            let delta = 4.0 * (n + 1) as f64 * chi;
            (chi, None, lambda, delta)
        }
    };
    Ok(EffectiveParams {
        process,
        g_eff: signed.abs(),
        g_eff_sign: if signed > 0.0 {
            1.0
        } else if signed < 0.0 {
            -1.0
        } else {
            0.0
        },
        chi1,
        chi2,
        lambda,
        delta,
        f: process.is_two_cavity().then_some(f),
        n,
        m: if process.is_two_cavity() { m } else { 0 },
        rabi: r,
    })
}

/// Closed-form mixing angle maximizing `|g_eff|` at fixed `R`.
pub fn optimal_angle(process: Process, f: f64) -> Result<f64> {
    validate_f(process, f)?;
    Ok(match process {
        Process::I => FRAC_PI_3,
        Process::II => {
            let root = (9.0 - 4.0 * f + 4.0 * f * f).sqrt();
            let branch = |sign: f64| ((3.0 + 2.0 * f + sign * root).sqrt() / (2.0 * SQRT_2)).acos();
            let magnitude = |theta: f64| {
                let frame = DressedFrame::from_angle(theta, 1.0).expect("angle in range");
                g_eff_signed(Process::II, &frame, f, 1.0).abs()
            };
            let (a, b) = (branch(1.0), branch(-1.0));
            if magnitude(a) >= magnitude(b) {
                a
            } else {
                b
            }
        }
        Process::III => {
            let sqrt5 = 5f64.sqrt();
            ((1.0 + sqrt5) / (3.0 - sqrt5)).sqrt().atan()
        }
    })
}

/// Closed-form qubit detuning maximizing `|g_eff|` at fixed `omega`.
pub fn optimal_detuning(process: Process, omega: f64, f: f64) -> Result<f64> {
    validate_f(process, f)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", "must be > 0"));
    }
    Ok(match process {
        Process::I => omega / SQRT_2,
        Process::II => {
            let u = 1.0 - 2.0 * f;
            let q = f * (1.0 - f);
            -omega * u.signum() * (-2.0 + (1.0 - (1.0 - q).sqrt() * u.abs()) / q).sqrt()
        }
        Process::III => omega * ((14.0 * 109f64.sqrt() - 122.0) / 45.0).sqrt(),
    })
}

const ANGLE_EDGE: f64 = 1e-9;

/// Numerical counterpart of [`optimal_angle`]: maximizes `|g_eff(theta)|`
/// at `R = 1` by grid scan plus golden-section refinement.
pub fn numeric_optimal_angle(process: Process, f: f64) -> Result<f64> {
    validate_f(process, f)?;
    let objective = |theta: f64| {
        DressedFrame::from_angle(theta, 1.0)
            .map(|fr| g_eff_signed(process, &fr, f, 1.0).abs())
            .unwrap_or(0.0)
    };
    Ok(optimize::maximize(objective, ANGLE_EDGE, FRAC_PI_2 - ANGLE_EDGE, 2001, 1e-13).x)
}

/// Numerical counterpart of [`optimal_detuning`] on `dsigma in [-20, 20] omega`.
pub fn numeric_optimal_detuning(process: Process, omega: f64, f: f64) -> Result<f64> {
    validate_f(process, f)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", "must be > 0"));
    }
    let objective = |ds: f64| {
        DressedFrame::new(omega, ds)
            .map(|fr| g_eff_signed(process, &fr, f, 1.0).abs())
            .unwrap_or(0.0)
    };
    Ok(optimize::maximize(objective, -20.0 * omega, 20.0 * omega, 4001, 1e-13 * omega).x)
}

/// `|g_eff(theta*)| / |g_eff(pi/4)|` at fixed `R`.
pub fn angle_enhancement(process: Process, f: f64) -> Result<f64> {
    let best = DressedFrame::from_angle(optimal_angle(process, f)?, 1.0)?;
    let resonant = DressedFrame::from_angle(FRAC_PI_4, 1.0)?;
    Ok(g_eff_signed(process, &best, f, 1.0).abs() / g_eff_signed(process, &resonant, f, 1.0).abs())
}

/// `|g_eff(dsigma*)| / |g_eff(0)|` at fixed `omega`.
pub fn detuning_enhancement(process: Process, omega: f64, f: f64) -> Result<f64> {
    let best = DressedFrame::new(omega, optimal_detuning(process, omega, f)?)?;
    let resonant = DressedFrame::new(omega, 0.0)?;
    Ok(g_eff_signed(process, &best, f, 1.0).abs() / g_eff_signed(process, &resonant, f, 1.0).abs())
}

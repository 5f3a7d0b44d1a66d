//! Hamiltonian builders: Rabi and Jaynes-Cummings references, the singly
//! driven one-qubit/two-cavity system (processes I and II) and the driven
//! two-qubit/one-cavity system (process III), in the drive frame ("lab") and
//! in the dressed-qubit basis ("rotated").
//!
//! All energies share one unit (usually `g = 1`), with hbar = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, OperatorMatrix, SpaceSpec, Subsystem};
use crate::linalg::{c, CMatrix};

/// Rotation from the bare qubit basis to the drive-dressed basis
/// `|+> = c|g> + s|e>`, `|-> = s|g> - c|e>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedFrame {
    pub theta: f64,
    pub xi: f64,
    /// Rabi frequency `R = sqrt(omega^2 + dsigma^2 / 4)`.
    pub rabi: f64,
    pub s: f64,
    pub c: f64,
    pub omega: f64,
    pub dsigma: f64,
}

impl DressedFrame {
    pub fn new(omega: f64, dsigma: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", format!("drive amplitude must be > 0, got {omega}")));
        }
        if !dsigma.is_finite() {
            return Err(Error::invalid("dsigma", "must be finite"));
        }
        let rabi = omega.hypot(dsigma / 2.0);
        // omega / (dsigma/2 + R) written without cancellation for dsigma < 0
        let xi = if dsigma >= 0.0 {
            omega / (dsigma / 2.0 + rabi)
        } else {
            (rabi - dsigma / 2.0) / omega
        };
        let c = 1.0 / (1.0 + xi.powi(-2)).sqrt();
        let s = 1.0 / (1.0 + xi * xi).sqrt();
        Ok(DressedFrame {
            theta: s.atan2(c),
            xi,
            rabi,
            s,
            c,
            omega,
            dsigma,
        })
    }

    /// Frame with a prescribed mixing angle and Rabi frequency; the drive
    /// parameters follow as `omega = R sin 2theta`, `dsigma = -2R cos 2theta`.
    pub fn from_angle(theta: f64, rabi: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid("theta", format!("must lie in (0, pi/2), got {theta}")));
        }
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(Error::invalid("rabi", "must be > 0"));
        }
        let (s, c) = theta.sin_cos();
        Ok(DressedFrame {
            theta,
            xi: c / s,
            rabi,
            s,
            c,
            omega: rabi * (2.0 * theta).sin(),
            dsigma: -2.0 * rabi * (2.0 * theta).cos(),
        })
    }

    /// Columns are `|->` and `|+>` written in the `(|g>, |e>)` basis, so
    /// `W diag(-R, R) W^dag` is the driven qubit block minus `dsigma/2`.
    pub fn basis_change(&self) -> OperatorMatrix {
        let mut w = CMatrix::zeros(2, 2);
        w[(0, 0)] = c(self.s);
        w[(1, 0)] = c(-self.c);
        w[(0, 1)] = c(self.c);
        w[(1, 1)] = c(self.s);
        OperatorMatrix::new(w)
    }

    /// The bare lowering operator expressed in the dressed basis:
    /// `s^2 S - c^2 S^dag + c s S_z` with `S = |-><+|`.
    pub fn dressed_lowering(&self) -> OperatorMatrix {
        let sm = hilbert::sigma_minus();
        let sp = hilbert::sigma_plus();
        let sz = hilbert::sigma_z();
        &(&sm.scale(self.s * self.s) - &sp.scale(self.c * self.c)) + &sz.scale(self.c * self.s)
    }
}

/// Drive and detunings of the one-qubit / two-cavity setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub g: f64,
    pub omega: f64,
    pub dsigma: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Drive and cavity detuning of the two-qubit / one-cavity setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitDriveParams {
    pub g: f64,
    pub omega: f64,
    pub dsigma: f64,
    pub delta_a: f64,
}

fn check_finite(values: &[(&'static str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::invalid(name, "must be finite"));
        }
    }
    Ok(())
}

impl DriveParams {
    fn validate(&self) -> Result<()> {
        check_finite(&[
            ("g", self.g),
            ("omega", self.omega),
            ("dsigma", self.dsigma),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
        ])?;
        if self.g < 0.0 {
            return Err(Error::invalid("g", "coupling must be >= 0"));
        }
        if self.omega < 0.0 {
            return Err(Error::invalid("omega", "drive amplitude must be >= 0"));
        }
        Ok(())
    }

    pub fn frame(&self) -> Result<DressedFrame> {
        DressedFrame::new(self.omega, self.dsigma)
    }
}

impl TwoQubitDriveParams {
    fn validate(&self) -> Result<()> {
        check_finite(&[
            ("g", self.g),
            ("omega", self.omega),
            ("dsigma", self.dsigma),
            ("delta_a", self.delta_a),
        ])?;
        if self.g < 0.0 {
            return Err(Error::invalid("g", "coupling must be >= 0"));
        }
        if self.omega < 0.0 {
            return Err(Error::invalid("omega", "drive amplitude must be >= 0"));
        }
        Ok(())
    }

    pub fn frame(&self) -> Result<DressedFrame> {
        DressedFrame::new(self.omega, self.dsigma)
    }
}

pub fn qubit_mode_space(truncation: usize) -> Result<SpaceSpec> {
    SpaceSpec::new(vec![Subsystem::Qubit, Subsystem::Mode { truncation }])
}

/// `[Qubit, Mode(n1), Mode(n2)]`, the process I/II space.
pub fn two_cavity_space(n1: usize, n2: usize) -> Result<SpaceSpec> {
    SpaceSpec::new(vec![
        Subsystem::Qubit,
        Subsystem::Mode { truncation: n1 },
        Subsystem::Mode { truncation: n2 },
    ])
}

/// `[Qubit, Qubit, Mode(n)]`, the process III space.
pub fn two_qubit_space(n: usize) -> Result<SpaceSpec> {
    SpaceSpec::new(vec![
        Subsystem::Qubit,
        Subsystem::Qubit,
        Subsystem::Mode { truncation: n },
    ])
}

fn free_hamiltonian(spec: &SpaceSpec, wa: f64, wc: f64) -> Result<OperatorMatrix> {
    let sz = spec.embed(0, &hilbert::sigma_z())?;
    let a = spec.annihilation_on(1)?;
    Ok(&sz.scale(wa / 2.0) + &(&a.dagger() * &a).scale(wc).into_hermitian()?)
}

/// Quantum Rabi model `(wa/2) sz + wc a^dag a + g (s + s^dag)(a + a^dag)`.
pub fn build_rabi(wa: f64, wc: f64, g: f64, truncation: usize) -> Result<OperatorMatrix> {
    check_finite(&[("wa", wa), ("wc", wc), ("g", g)])?;
    let spec = qubit_mode_space(truncation)?;
    let h0 = free_hamiltonian(&spec, wa, wc)?;
    let sx = spec.embed(0, &hilbert::sigma_x())?;
    let x = spec.annihilation_on(1)?.plus_dagger();
    let coupling = (&sx * &x).scale(g);
    (&h0 + &coupling).into_hermitian()
}

/// Jaynes-Cummings model `(wa/2) sz + wc a^dag a + g (s a^dag + s^dag a)`.
pub fn build_jc(wa: f64, wc: f64, g: f64, truncation: usize) -> Result<OperatorMatrix> {
    check_finite(&[("wa", wa), ("wc", wc), ("g", g)])?;
    let spec = qubit_mode_space(truncation)?;
    let h0 = free_hamiltonian(&spec, wa, wc)?;
    let s = spec.lowering_on(0)?;
    let a = spec.annihilation_on(1)?;
    let coupling = (&s * &a.dagger()).plus_dagger().scale(g);
    (&h0 + &coupling).into_hermitian()
}

/// `exp(i pi (s^dag s + a^dag a))` on `[Qubit, Mode(n)]`.
pub fn parity(truncation: usize) -> Result<OperatorMatrix> {
    let spec = qubit_mode_space(truncation)?;
    let diag: Vec<f64> = (0..spec.dim())
        .map(|k| {
            let lv = spec.levels_of(k);
            if (lv[0] + lv[1]) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Ok(OperatorMatrix::from_real_diagonal(&diag))
}

/// `s^dag s + a^dag a` on `[Qubit, Mode(n)]`.
pub fn excitation_number(truncation: usize) -> Result<OperatorMatrix> {
    let spec = qubit_mode_space(truncation)?;
    let diag: Vec<f64> = (0..spec.dim())
        .map(|k| spec.levels_of(k).iter().sum::<usize>() as f64)
        .collect();
    Ok(OperatorMatrix::from_real_diagonal(&diag))
}

fn number_on(spec: &SpaceSpec, which: usize) -> Result<OperatorMatrix> {
    let a = spec.annihilation_on(which)?;
    (&a.dagger() * &a).into_hermitian()
}

/// Drive-frame Hamiltonian of the one-qubit / two-cavity system:
/// `D1 n1 + D2 n2 + Ds s^dag s + Om (s + s^dag) + g [s (a1^dag + a2^dag) + h.c.]`.
pub fn build_process_i_ii_lab(p: &DriveParams, n1: usize, n2: usize) -> Result<OperatorMatrix> {
    p.validate()?;
    let spec = two_cavity_space(n1, n2)?;
    let s = spec.lowering_on(0)?;
    let a1 = spec.annihilation_on(1)?;
    let a2 = spec.annihilation_on(2)?;
    let h = &(&number_on(&spec, 1)?.scale(p.delta1) + &number_on(&spec, 2)?.scale(p.delta2))
        + &(&spec.embed(0, &hilbert::excited_projector())?.scale(p.dsigma)
            + &s.plus_dagger().scale(p.omega));
    let coupling = (&s * &(&a1.dagger() + &a2.dagger())).plus_dagger().scale(p.g);
    (&h + &coupling).into_hermitian()
}

/// The same system written in the dressed basis (qubit index 0 = `|->`):
/// `D1 n1 + D2 n2 + R Sz + g [(s^2 S - c^2 S^dag + c s Sz)(a1^dag + a2^dag) + h.c.]`.
///
/// Equals `U^dag H_lab U - dsigma/2` with `U = W (x) 1 (x) 1`, `W` from
/// [`DressedFrame::basis_change`].
pub fn build_process_i_ii_rotated(p: &DriveParams, n1: usize, n2: usize) -> Result<OperatorMatrix> {
    p.validate()?;
    let frame = p.frame()?;
    let spec = two_cavity_space(n1, n2)?;
    let sigma = spec.embed(0, &frame.dressed_lowering())?;
    let sz = spec.embed(0, &hilbert::sigma_z())?;
    let a1 = spec.annihilation_on(1)?;
    let a2 = spec.annihilation_on(2)?;
    let h = &(&number_on(&spec, 1)?.scale(p.delta1) + &number_on(&spec, 2)?.scale(p.delta2))
        + &sz.scale(frame.rabi);
    let coupling = (&sigma * &(&a1.dagger() + &a2.dagger())).plus_dagger().scale(p.g);
    (&h + &coupling).into_hermitian()
}

/// Constant difference between the lab and rotated process I/II spectra.
pub fn rotated_shift_i_ii(dsigma: f64) -> f64 {
    dsigma / 2.0
}

/// Constant difference between the lab and rotated process III spectra.
pub fn rotated_shift_iii(dsigma: f64) -> f64 {
    dsigma
}

/// Drive-frame Hamiltonian of two identical driven qubits sharing a cavity:
/// `Da n + Ds (s1^dag s1 + s2^dag s2) + Om (s1 + s2 + h.c.) + g [a (s1^dag + s2^dag) + h.c.]`.
pub fn build_process_iii_lab(p: &TwoQubitDriveParams, n: usize) -> Result<OperatorMatrix> {
    p.validate()?;
    let spec = two_qubit_space(n)?;
    let a = spec.annihilation_on(2)?;
    let mut h = number_on(&spec, 2)?.scale(p.delta_a);
    for q in 0..2 {
        let s = spec.lowering_on(q)?;
        h = &h + &spec.embed(q, &hilbert::excited_projector())?.scale(p.dsigma);
        h = &h + &s.plus_dagger().scale(p.omega);
        h = &h + &(&a * &s.dagger()).plus_dagger().scale(p.g);
    }
    h.into_hermitian()
}

/// Process III in the dressed basis of both qubits.
pub fn build_process_iii_rotated(p: &TwoQubitDriveParams, n: usize) -> Result<OperatorMatrix> {
    p.validate()?;
    let frame = p.frame()?;
    let spec = two_qubit_space(n)?;
    let a = spec.annihilation_on(2)?;
    let mut h = number_on(&spec, 2)?.scale(p.delta_a);
    for q in 0..2 {
        let sigma = spec.embed(q, &frame.dressed_lowering())?;
        h = &h + &spec.embed(q, &hilbert::sigma_z())?.scale(frame.rabi);
        h = &h + &(&a * &sigma.dagger()).plus_dagger().scale(p.g);
    }
    h.into_hermitian()
}

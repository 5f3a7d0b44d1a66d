//! Prepare, drive, read out: the qubit is rotated from `|g>` into `|+>`,
//! the drive acts for a window, and the inverse rotation maps `|->` to
//! `|e>` and `|+>` to `|g>` before measurement. Rotations are ideal and
//! instantaneous; the drive is off during the idle windows.

use serde::{Deserialize, Serialize};

use super::{check_times, Observables, Propagator, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{OperatorMatrix, SpaceSpec};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::models::{self, DriveParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolDurations {
    /// `t1 - t0`, before the drive.
    pub prepare: f64,
    /// `t2 - t1`, drive on.
    pub drive: f64,
    /// `t3 - t2`, after the drive.
    pub readout: f64,
}

impl ProtocolDurations {
    pub fn drive_only(drive: f64) -> Self {
        ProtocolDurations {
            prepare: 0.0,
            drive,
            readout: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("prepare", self.prepare), ("drive", self.drive), ("readout", self.readout)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("duration must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    /// Drive window, bare-basis populations, times from `t1`.
    pub trajectory: Trajectory,
    /// `|->` population just before the final rotation.
    pub minus_population: f64,
    pub excited_population: f64,
    pub ground_population: f64,
    /// `<a_k^dag a_k>` after readout.
    pub photon_numbers: Vec<f64>,
    pub final_state: Vec<(f64, f64)>,
}

/// `R_y(2 theta)` in the `(|g>, |e>)` basis: `|g> -> |+>`.
fn preparation(s: f64, cs: f64) -> OperatorMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = c(cs);
    m[(0, 1)] = c(-s);
    m[(1, 0)] = c(s);
    m[(1, 1)] = c(cs);
    OperatorMatrix::new(m)
}

fn expectation(op: &OperatorMatrix, psi: &CVector) -> f64 {
    psi.dotc(&(op.matrix() * psi)).re
}

/// Runs the sequence from `|g, 0, 0>` under the one-qubit/two-cavity drive
/// Hamiltonian, recording `samples` points of the drive window.
pub fn run_protocol(
    params: &DriveParams,
    truncations: (usize, usize),
    durations: &ProtocolDurations,
    samples: usize,
) -> Result<ProtocolResult> {
    durations.validate()?;
    let frame = params.frame()?;
    let spec = models::two_cavity_space(truncations.0, truncations.1)?;
    let h = models::build_process_i_ii_lab(params, truncations.0, truncations.1)?;
    let prop = Propagator::new(&h)?;

    let rotate = spec.embed(0, &preparation(frame.s, frame.c))?;
    let unrotate = rotate.dagger();
    let minus = {
        let mut v = CMatrix::zeros(2, 2);
        // |-><-| with |-> = s|g> - c|e>
        v[(0, 0)] = c(frame.s * frame.s);
        v[(0, 1)] = c(-frame.s * frame.c);
        v[(1, 0)] = c(-frame.s * frame.c);
        v[(1, 1)] = c(frame.c * frame.c);
        spec.embed(0, &OperatorMatrix::new(v))?
    };
    let excited = spec.embed(0, &crate::hilbert::excited_projector())?;

    let psi_g = linalg::basis_vector(spec.dim(), 0);
    let psi1 = rotate.matrix() * &psi_g;

    let times = super::time_grid(durations.drive, samples.max(2));
    check_times(&times)?;
    let obs = Observables::basis_states(&spec, ["g", "e"])
        .with_photon_numbers(&spec)?
        .with_qubit_excitation(&spec)?;
    let mut trajectory = Trajectory::empty(&obs, false);
    for &t in &times {
        trajectory.record_pure(t, &prop.apply(&psi1, t), &obs);
    }
    let psi2 = prop.apply(&psi1, durations.drive);
    let minus_population = expectation(&minus, &psi2);
    let psi3 = unrotate.matrix() * &psi2;
    let excited_population = expectation(&excited, &psi3);
    let photon_numbers = photon_numbers(&spec, &psi3)?;
    Ok(ProtocolResult {
        trajectory,
        minus_population,
        excited_population,
        ground_population: linalg::norm_sq(&psi3) - excited_population,
        photon_numbers,
        final_state: psi3.iter().map(|z| (z.re, z.im)).collect(),
    })
}

fn photon_numbers(spec: &SpaceSpec, psi: &CVector) -> Result<Vec<f64>> {
    spec.modes()
        .into_iter()
        .map(|k| {
            let a = spec.annihilation_on(k)?;
            Ok(expectation(&(&a.dagger() * &a), psi))
        })
        .collect()
}

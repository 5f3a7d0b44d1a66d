//! Kept and eliminated dressed product states for each process.
//!
//! States are written as per-subsystem levels in the space's factor order;
//! qubit level 1 is `|+>` and 0 is `|->` (the rotated-frame convention of
//! [`crate::models`]). Entries needing a negative photon number are dropped.

use super::engine::SubspacePartition;
use super::Process;
use crate::error::{Error, Result};
use crate::hilbert::{SpaceSpec, Subsystem};

const PLUS: i64 = 1;
const MINUS: i64 = 0;

/// Uncoupled dressed energies: `+-R` per qubit plus `delta_k n_k` per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BareSpectrum {
    pub rabi: f64,
    /// Detuning of each mode, in mode order.
    pub mode_detunings: Vec<f64>,
}

impl BareSpectrum {
    pub fn energy(&self, spec: &SpaceSpec, levels: &[usize]) -> f64 {
        let mut mode = 0;
        let mut e = 0.0;
        for (sub, &lv) in spec.subsystems().iter().zip(levels) {
            match sub {
                Subsystem::Qubit => e += if lv == 1 { self.rabi } else { -self.rabi },
                Subsystem::Mode { .. } => {
                    e += self.mode_detunings.get(mode).copied().unwrap_or(0.0) * lv as f64;
                    mode += 1;
                }
            }
        }
        e
    }
}

fn check_layout(process: Process, spec: &SpaceSpec) -> Result<()> {
    let layout_ok = matches!(
        (process.is_two_cavity(), spec.subsystems()),
        (true, [Subsystem::Qubit, Subsystem::Mode { .. }, Subsystem::Mode { .. }])
            | (false, [Subsystem::Qubit, Subsystem::Qubit, Subsystem::Mode { .. }])
    );
    if layout_ok {
        Ok(())
    } else {
        Err(Error::invalid(
            "spec",
            format!("process {process} needs {}", if process.is_two_cavity() {
                "[Qubit, Mode, Mode]"
            } else {
                "[Qubit, Qubit, Mode]"
            }),
        ))
    }
}

/// `(kept, eliminated)` as signed level tuples, before truncation checks.
fn state_lists(process: Process, n: i64, m: i64) -> (Vec<[i64; 3]>, Vec<[i64; 3]>) {
    let both = |q_free: &dyn Fn(i64) -> [i64; 3]| [q_free(PLUS), q_free(MINUS)];
    match process {
        Process::I => {
            let kept = vec![[PLUS, n, m], [MINUS, n + 1, m + 1]];
            let shifts = [(1, 0), (0, 1), (2, 1), (1, 2), (0, -1), (-1, 0)];
            let elim = shifts
                .iter()
                .flat_map(|&(dn, dm)| both(&|q| [q, n + dn, m + dm]))
                .collect();
            (kept, elim)
        }
        Process::II => {
            let kept = vec![[MINUS, n + 1, m], [PLUS, n, m + 1]];
            // The sixth pair is |n-1, m+1, +->: the state reached from
            // |n, m+1, +> by removing a photon from the first mode.
            let shifts = [(1, 1), (0, 0), (2, 0), (1, -1), (0, 2), (-1, 1)];
            let elim = shifts
                .iter()
                .flat_map(|&(dn, dm)| both(&|q| [q, n + dn, m + dm]))
                .collect();
            (kept, elim)
        }
        Process::III => {
            let kept = vec![[PLUS, PLUS, n], [MINUS, MINUS, n + 1]];
            let elim = vec![
                [PLUS, MINUS, n + 1],
                [MINUS, PLUS, n + 1],
                [PLUS, PLUS, n + 1],
                [PLUS, MINUS, n],
                [MINUS, PLUS, n],
                [MINUS, MINUS, n],
                [PLUS, MINUS, n + 2],
                [MINUS, PLUS, n + 2],
                [MINUS, MINUS, n + 2],
                [MINUS, PLUS, n - 1],
                [PLUS, MINUS, n - 1],
                [PLUS, PLUS, n - 1],
            ];
            (kept, elim)
        }
    }
}

fn resolve(spec: &SpaceSpec, states: &[[i64; 3]]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(states.len());
    for st in states {
        if st.iter().any(|&l| l < 0) {
            continue;
        }
        let levels: Vec<usize> = st.iter().map(|&l| l as usize).collect();
        match spec.index_of(&levels) {
            Some(k) => out.push(k),
            None => {
                let (mode, required, available) = spec
                    .subsystems()
                    .iter()
                    .zip(&levels)
                    .enumerate()
                    .find_map(|(k, (sub, &lv))| match sub {
                        Subsystem::Mode { truncation } if lv > *truncation => Some((k, lv, *truncation)),
                        _ => None,
                    })
                    .unwrap_or((0, 0, 0));
                return Err(Error::TruncationTooSmall {
                    mode,
                    required,
                    available,
                });
            }
        }
    }
    Ok(out)
}

/// Kept/eliminated partition for `process` at photon indices `(n, m)` (`m`
/// is ignored for process III). The reference energy is the bare energy of
/// the kept state containing `|+>`: `|+, n, m>` (I), `|n, m+1, +>` (II),
/// `|+, +, n>` (III).
pub fn subspace_for(
    process: Process,
    n: usize,
    m: usize,
    spec: &SpaceSpec,
    bare: &BareSpectrum,
) -> Result<SubspacePartition> {
    check_layout(process, spec)?;
    let (kept, elim) = state_lists(process, n as i64, m as i64);
    let target = resolve(spec, &kept)?;
    let eliminated = resolve(spec, &elim)?;
    let reference = match process {
        Process::I | Process::III => target[0],
        Process::II => target[1],
    };
    let energy = bare.energy(spec, &spec.levels_of(reference));
    SubspacePartition::new(target, eliminated, energy)
}

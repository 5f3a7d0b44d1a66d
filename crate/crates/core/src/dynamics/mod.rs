//! Time evolution: closed-system propagation by spectral decomposition,
//! cavity loss by an adaptive Lindblad integrator, and the pulse protocol
//! that prepares, drives and reads out the qubit.

pub mod lindblad;
pub mod protocol;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{OperatorMatrix, SpaceSpec, Subsystem};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen, I};
use crate::output::{num, Table};

pub use lindblad::{evolve_lindblad, DecaySpec, LindbladOptions};
pub use protocol::{run_protocol, ProtocolDurations, ProtocolResult};

/// Tolerance on `||psi0||^2 - 1`.
pub const NORM_TOL: f64 = 1e-10;

/// What a trajectory records at each sample time.
#[derive(Debug, Clone, Default)]
pub struct Observables {
    /// Labeled basis states whose populations are recorded.
    pub populations: Vec<(String, usize)>,
    /// Named Hermitian operators whose expectation values are recorded.
    pub expectations: Vec<(String, OperatorMatrix)>,
}

impl Observables {
    /// Every basis state of `spec`, labeled like `|+,0,1>` using
    /// `qubit_labels[level]` for qubit factors.
    pub fn basis_states(spec: &SpaceSpec, qubit_labels: [&str; 2]) -> Self {
        let populations = (0..spec.dim())
            .map(|k| (state_label(spec, &spec.levels_of(k), qubit_labels), k))
            .collect();
        Observables {
            populations,
            expectations: Vec::new(),
        }
    }

    /// Adds `n_k = <a_k^dag a_k>` for every mode (`n_a` when there is one).
    pub fn with_photon_numbers(mut self, spec: &SpaceSpec) -> Result<Self> {
        let modes = spec.modes();
        for (k, &which) in modes.iter().enumerate() {
            let a = spec.annihilation_on(which)?;
            let name = if modes.len() == 1 { "n_a".to_string() } else { format!("n_{}", k + 1) };
            self.expectations.push((name, (&a.dagger() * &a).into_hermitian()?));
        }
        Ok(self)
    }

    /// Adds `<s_k^dag s_k>` for every qubit (bare excited-state population).
    pub fn with_qubit_excitation(mut self, spec: &SpaceSpec) -> Result<Self> {
        let qubits: Vec<usize> = spec
            .subsystems()
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Subsystem::Qubit))
            .map(|(k, _)| k)
            .collect();
        for (k, &which) in qubits.iter().enumerate() {
            let p = spec.embed(which, &crate::hilbert::excited_projector())?;
            let name = if qubits.len() == 1 { "p_e".to_string() } else { format!("p_e{}", k + 1) };
            self.expectations.push((name, p));
        }
        Ok(self)
    }

    fn check(&self, dim: usize) -> Result<()> {
        for (_, k) in &self.populations {
            if *k >= dim {
                return Err(Error::IndexOutOfRange { index: *k, len: dim });
            }
        }
        for (_, o) in &self.expectations {
            if o.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: o.dim(),
                });
            }
        }
        Ok(())
    }
}

pub fn state_label(spec: &SpaceSpec, levels: &[usize], qubit_labels: [&str; 2]) -> String {
    let parts: Vec<String> = spec
        .subsystems()
        .iter()
        .zip(levels)
        .map(|(s, &l)| match s {
            Subsystem::Qubit => qubit_labels[l.min(1)].to_string(),
            Subsystem::Mode { .. } => l.to_string(),
        })
        .collect();
    format!("|{}>", parts.join(","))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub population_labels: Vec<String>,
    /// `populations[k][j]`: population of state `j` at `times[k]`.
    pub populations: Vec<Vec<f64>>,
    pub expectation_labels: Vec<String>,
    pub expectations: Vec<Vec<f64>>,
    /// `||psi||^2` or `tr rho`.
    pub total: Vec<f64>,
    /// Smallest eigenvalue of `rho`; absent for pure states.
    pub min_eigenvalue: Option<Vec<f64>>,
    /// `max |rho - rho^dag|`; absent for pure states.
    pub hermiticity_defect: Option<Vec<f64>>,
}

impl Trajectory {
    fn empty(obs: &Observables, mixed: bool) -> Self {
        Trajectory {
            times: Vec::new(),
            population_labels: obs.populations.iter().map(|(l, _)| l.clone()).collect(),
            populations: Vec::new(),
            expectation_labels: obs.expectations.iter().map(|(l, _)| l.clone()).collect(),
            expectations: Vec::new(),
            total: Vec::new(),
            min_eigenvalue: mixed.then(Vec::new),
            hermiticity_defect: mixed.then(Vec::new),
        }
    }

    fn record_pure(&mut self, t: f64, psi: &CVector, obs: &Observables) {
        self.times.push(t);
        self.populations
            .push(obs.populations.iter().map(|(_, k)| psi[*k].norm_sqr()).collect());
        self.expectations.push(
            obs.expectations
                .iter()
                .map(|(_, o)| psi.dotc(&(o.matrix() * psi)).re)
                .collect(),
        );
        self.total.push(linalg::norm_sq(psi));
    }

    fn record_mixed(&mut self, t: f64, rho: &CMatrix, obs: &Observables) {
        self.times.push(t);
        self.populations
            .push(obs.populations.iter().map(|(_, k)| rho[(*k, *k)].re).collect());
        self.expectations.push(
            obs.expectations
                .iter()
                .map(|(_, o)| (o.matrix() * rho).trace().re)
                .collect(),
        );
        self.total.push(rho.trace().re);
        let eig = HermitianEigen::new(rho);
        if let Some(v) = self.min_eigenvalue.as_mut() {
            v.push(eig.values.first().copied().unwrap_or(0.0));
        }
        if let Some(v) = self.hermiticity_defect.as_mut() {
            v.push(linalg::hermiticity_defect(rho));
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn population(&self, label: &str) -> Option<Vec<f64>> {
        let j = self.population_labels.iter().position(|l| l == label)?;
        Some(self.populations.iter().map(|row| row[j]).collect())
    }

    pub fn expectation(&self, label: &str) -> Option<Vec<f64>> {
        let j = self.expectation_labels.iter().position(|l| l == label)?;
        Some(self.expectations.iter().map(|row| row[j]).collect())
    }

    /// `time, <populations>, <expectations>, total[, min_eigenvalue, hermiticity_defect]`.
    pub fn to_table(&self) -> Table {
        let mut cols = vec!["time".to_string()];
        cols.extend(self.population_labels.iter().map(|l| format!("P{l}")));
        cols.extend(self.expectation_labels.iter().cloned());
        cols.push("total".into());
        if self.min_eigenvalue.is_some() {
            cols.push("min_eigenvalue".into());
            cols.push("hermiticity_defect".into());
        }
        let mut t = Table::new(cols);
        for k in 0..self.len() {
            let mut row = vec![num(self.times[k])];
            row.extend(self.populations[k].iter().map(|&x| num(x)));
            row.extend(self.expectations[k].iter().map(|&x| num(x)));
            row.push(num(self.total[k]));
            if let (Some(m), Some(h)) = (&self.min_eigenvalue, &self.hermiticity_defect) {
                row.push(num(m[k]));
                row.push(num(h[k]));
            }
            t.push(row);
        }
        t
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("times", "need at least one sample time"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::invalid("times", "sample times must be finite and >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times", "sample times must be nondecreasing"));
    }
    Ok(())
}

/// `exp(-i H t)` applied through a precomputed eigen-decomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermitianEigen,
}

impl Propagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        h.require_hermitian()?;
        Ok(Propagator {
            eig: HermitianEigen::new(h.matrix()),
        })
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn apply(&self, psi: &CVector, t: f64) -> CVector {
        let mut coeffs = self.eig.vectors.adjoint() * psi;
        for (k, z) in coeffs.iter_mut().enumerate() {
            *z *= (-I * self.eig.values[k] * t).exp();
        }
        &self.eig.vectors * coeffs
    }
}

pub fn check_state(psi: &CVector, dim: usize) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: psi.len(),
        });
    }
    let n = linalg::norm_sq(psi);
    if n.is_nan() || (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq: n });
    }
    Ok(())
}

/// Pure-state evolution under a time-independent `h`, sampled at `times`.
pub fn evolve_schrodinger(
    h: &OperatorMatrix,
    psi0: &CVector,
    times: &[f64],
    obs: &Observables,
) -> Result<Trajectory> {
    let prop = Propagator::new(h)?;
    check_state(psi0, prop.dim())?;
    check_times(times)?;
    obs.check(prop.dim())?;
    let mut traj = Trajectory::empty(obs, false);
    for &t in times {
        traj.record_pure(t, &prop.apply(psi0, t), obs);
    }
    Ok(traj)
}

/// `|psi><psi|`.
pub fn pure_density(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

/// Uniform grid `0, dt, ..., t_max` with `samples` points.
pub fn time_grid(t_max: f64, samples: usize) -> Vec<f64> {
    if samples <= 1 {
        return vec![0.0];
    }
    (0..samples).map(|k| t_max * k as f64 / (samples - 1) as f64).collect()
}

/// Largest value of `series` at times `<= t_end`, with its index. Sampled
/// up to about 1.5 transfer times, this is the first Rabi maximum.
pub fn peak_until(times: &[f64], series: &[f64], t_end: f64) -> Option<(usize, f64)> {
    times
        .iter()
        .zip(series)
        .enumerate()
        .take_while(|(_, (t, _))| **t <= t_end)
        .map(|(k, (_, &v))| (k, v))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

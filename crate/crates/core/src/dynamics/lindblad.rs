//! Master equation with cavity loss,
//! `drho/dt = -i[H, rho] + (gamma/2) sum_k (2 a_k rho a_k^dag - {a_k^dag a_k, rho})`,
//! integrated by an embedded 5(4) Runge-Kutta scheme (Dormand-Prince) in the
//! interaction picture of `H`. The coherent part is removed exactly, so
//! `gamma = 0` reduces to the spectral propagator.

use serde::{Deserialize, Serialize};

use super::{check_times, Observables, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{OperatorMatrix, SpaceSpec};
use crate::linalg::{self, CMatrix, HermitianEigen, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    /// Energy-decay rate of every cavity mode.
    pub gamma_a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Initial step; zero picks one from the decay rate.
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        LindbladOptions {
            atol: 1e-10,
            rtol: 1e-8,
            initial_step: 0.0,
            max_steps: 50_000_000,
        }
    }
}

/// Tolerances on the initial density matrix.
pub const RHO_TOL: f64 = 1e-10;

fn check_rho(rho: &CMatrix, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: rho.nrows(),
        });
    }
    let defect = linalg::hermiticity_defect(rho);
    if defect > RHO_TOL {
        return Err(Error::InvalidDensityMatrix {
            reason: format!("not Hermitian (defect {defect:.3e})"),
        });
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > RHO_TOL {
        return Err(Error::InvalidDensityMatrix {
            reason: format!("trace {tr} != 1"),
        });
    }
    let min = HermitianEigen::new(rho).values.first().copied().unwrap_or(0.0);
    if min < -RHO_TOL {
        return Err(Error::InvalidDensityMatrix {
            reason: format!("negative eigenvalue {min:.3e}"),
        });
    }
    Ok(())
}

/// Right-hand side in the interaction picture, everything in the
/// eigenbasis of `H`.
struct Rhs {
    energies: Vec<f64>,
    /// Jump operators `sqrt(gamma) a_k`.
    jumps: Vec<CMatrix>,
    /// `sum_k L_k^dag L_k / 2`.
    half_loss: CMatrix,
}

impl Rhs {
    /// `rho_I -> e^{iEt} rho_I e^{-iEt}` for `sign = +1`, inverse for `-1`.
    fn rotate(&self, m: &CMatrix, t: f64, sign: f64) -> CMatrix {
        let phases: Vec<C64> = self.energies.iter().map(|e| (I * sign * e * t).exp()).collect();
        CMatrix::from_fn(m.nrows(), m.ncols(), |j, k| m[(j, k)] * phases[j] * phases[k].conj())
    }

    fn eval(&self, t: f64, rho_i: &CMatrix) -> CMatrix {
        let rho = self.rotate(rho_i, t, -1.0);
        let mut d = -(&self.half_loss * &rho) - &rho * &self.half_loss;
        for l in &self.jumps {
            d += l * &rho * l.adjoint();
        }
        self.rotate(&d, t, 1.0)
    }
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<'a> {
    rhs: &'a Rhs,
    opts: LindbladOptions,
    t: f64,
    y: CMatrix,
    k1: CMatrix,
    h: f64,
    steps: usize,
}

impl Stepper<'_> {
    fn error_norm(&self, err: &CMatrix, y_new: &CMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for ((e, a), b) in err.iter().zip(self.y.iter()).zip(y_new.iter()) {
            let scale = self.opts.atol + self.opts.rtol * a.norm().max(b.norm());
            worst = worst.max(e.norm() / scale);
        }
        worst
    }

    /// Advances exactly to `target`.
    fn advance_to(&mut self, target: f64) -> Result<()> {
        let r = self.rhs;
        while self.t < target {
            if self.steps >= self.opts.max_steps {
                return Err(Error::StepSizeUnderflow {
                    time: self.t,
                    step: self.h,
                });
            }
            let last = self.t + self.h >= target;
            let h = if last { target - self.t } else { self.h };
            if h <= 1e-14 * self.t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { time: self.t, step: h });
            }
            let (t, y, k1) = (self.t, &self.y, &self.k1);
            let k2 = r.eval(t + C2 * h, &(y + k1 * C64::from(h * A21)));
            let k3 = r.eval(t + C3 * h, &(y + (k1 * C64::from(A31) + &k2 * C64::from(A32)) * C64::from(h)));
            let k4 = r.eval(
                t + C4 * h,
                &(y + (k1 * C64::from(A41) + &k2 * C64::from(A42) + &k3 * C64::from(A43)) * C64::from(h)),
            );
            let k5 = r.eval(
                t + C5 * h,
                &(y + (k1 * C64::from(A51) + &k2 * C64::from(A52) + &k3 * C64::from(A53) + &k4 * C64::from(A54))
                    * C64::from(h)),
            );
            let k6 = r.eval(
                t + h,
                &(y + (k1 * C64::from(A61)
                    + &k2 * C64::from(A62)
                    + &k3 * C64::from(A63)
                    + &k4 * C64::from(A64)
                    + &k5 * C64::from(A65))
                    * C64::from(h)),
            );
            let y_new = y
                + (k1 * C64::from(B1) + &k3 * C64::from(B3) + &k4 * C64::from(B4) + &k5 * C64::from(B5)
                    + &k6 * C64::from(B6))
                    * C64::from(h);
            let k7 = r.eval(t + h, &y_new);
            let err = (k1 * C64::from(E1)
                + &k3 * C64::from(E3)
                + &k4 * C64::from(E4)
                + &k5 * C64::from(E5)
                + &k6 * C64::from(E6)
                + &k7 * C64::from(E7))
                * C64::from(h);
            let norm = self.error_norm(&err, &y_new);
            self.steps += 1;
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if norm <= 1.0 {
                self.t = if last { target } else { t + h };
                self.y = y_new;
                self.k1 = k7;
                if !last || h * factor < self.h {
                    self.h = h * factor;
                }
            } else {
                self.h = h * factor.min(1.0);
                if self.h <= 1e-14 * self.t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow {
                        time: self.t,
                        step: self.h,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Density-matrix evolution with loss `decay.gamma_a` on every mode of
/// `spec`, sampled at `times`.
pub fn evolve_lindblad(
    h: &OperatorMatrix,
    spec: &SpaceSpec,
    rho0: &CMatrix,
    decay: &DecaySpec,
    times: &[f64],
    obs: &Observables,
    opts: &LindbladOptions,
) -> Result<Trajectory> {
    h.require_hermitian()?;
    let dim = h.dim();
    if spec.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: spec.dim(),
        });
    }
    if !(decay.gamma_a.is_finite() && decay.gamma_a >= 0.0) {
        return Err(Error::invalid("gamma_a", format!("must be >= 0, got {}", decay.gamma_a)));
    }
    check_rho(rho0, dim)?;
    check_times(times)?;
    obs.check(dim)?;

    let eig = HermitianEigen::new(h.matrix());
    let v = &eig.vectors;
    let vh = v.adjoint();
    let mut jumps = Vec::new();
    let mut half_loss = CMatrix::zeros(dim, dim);
    if decay.gamma_a > 0.0 {
        for which in spec.modes() {
            let a = spec.annihilation_on(which)?;
            let l = &vh * a.matrix() * v * C64::from(decay.gamma_a.sqrt());
            half_loss += l.adjoint() * &l * C64::from(0.5);
            jumps.push(l);
        }
    }
    let rhs = Rhs {
        energies: eig.values.clone(),
        jumps,
        half_loss,
    };
    let y0 = &vh * rho0 * v;
    let t0 = times[0];
    let y0 = rhs.rotate(&y0, t0, 1.0);
    let k1 = rhs.eval(t0, &y0);
    let span = times.last().unwrap() - t0;
    let initial = if opts.initial_step > 0.0 {
        opts.initial_step
    } else if decay.gamma_a > 0.0 {
        let spread = eig.values.last().unwrap() - eig.values.first().unwrap();
        (0.01 / spread.max(decay.gamma_a)).min(span.max(1e-3))
    } else {
        span.max(1e-3)
    };
    let mut stepper = Stepper {
        rhs: &rhs,
        opts: *opts,
        t: t0,
        y: y0,
        k1,
        h: initial,
        steps: 0,
    };
    let mut traj = Trajectory::empty(obs, true);
    for &t in times {
        stepper.advance_to(t)?;
        let rho = v * rhs.rotate(&stepper.y, t, -1.0) * &vh;
        traj.record_mixed(t, &rho, obs);
    }
    Ok(traj)
}

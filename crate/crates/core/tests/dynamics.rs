use std::f64::consts::PI;

use drivenjc::dynamics::lindblad::{evolve_lindblad, DecaySpec, LindbladOptions};
use drivenjc::dynamics::{self, Observables};
use drivenjc::linalg::basis_vector;
use drivenjc::scenario::{DetuningMode, Scenario};
use drivenjc::spectral;
use drivenjc::Process;

fn setup(sc: &Scenario) -> (f64, drivenjc::OperatorMatrix, usize, usize) {
    let (r, _) = spectral::scenario_crossing_with_fallback(sc).unwrap();
    let (start, partner, _) = sc.transfer_setup().unwrap();
    (r.half_splitting, sc.rotated(r.location).unwrap(), start, partner)
}

fn pair(sc: &Scenario, start: usize, partner: usize) -> Observables {
    let labels = Observables::basis_states(&sc.space().unwrap(), ["-", "+"]);
    Observables {
        populations: vec![labels.populations[start].clone(), labels.populations[partner].clone()],
        expectations: Vec::new(),
    }
}

#[test]
fn rabi_frequency_from_first_maximum() {
    for omega in [40.0, 80.0] {
        let sc = Scenario::new(Process::I, omega).with_dsigma(DetuningMode::Optimal);
        let (half, h, start, partner) = setup(&sc);
        let times = dynamics::time_grid(PI / half, 4001);
        let traj = dynamics::evolve_schrodinger(&h, &basis_vector(h.dim(), start), &times, &pair(&sc, start, partner)).unwrap();
        let series: Vec<f64> = traj.populations.iter().map(|p| p[1]).collect();
        let (k, _) = dynamics::peak_until(&traj.times, &series, PI / half).unwrap();
        let rabi = PI / traj.times[k];
        assert!((rabi - 2.0 * half).abs() <= 0.02 * 2.0 * half, "omega {omega}: {rabi} vs {}", 2.0 * half);
    }
}

#[test]
fn norm_is_kept_over_long_times() {
    let sc = Scenario::new(Process::II, 40.0).with_dsigma(DetuningMode::Optimal);
    let (half, h, start, _) = setup(&sc);
    let all = Observables::basis_states(&sc.space().unwrap(), ["-", "+"]);
    let times = dynamics::time_grid(10.0 / half, 201);
    let traj = dynamics::evolve_schrodinger(&h, &basis_vector(h.dim(), start), &times, &all).unwrap();
    for (t, total) in traj.times.iter().zip(&traj.total) {
        assert!((total - 1.0).abs() <= 1e-9, "t = {t}: {total}");
    }
    for row in &traj.populations {
        let sum: f64 = row.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-8);
        assert!(row.iter().all(|p| (-1e-9..=1.0 + 1e-9).contains(p)));
    }
}

#[test]
fn weak_loss_converges_linearly_to_unitary() {
    let sc = Scenario::new(Process::I, 20.0).with_dsigma(DetuningMode::Optimal);
    let g_eff = sc.analytic().unwrap().coupling();
    let (half, h, start, partner) = setup(&sc);
    let spec = sc.space().unwrap();
    let obs = pair(&sc, start, partner);
    let times = dynamics::time_grid(PI / (2.0 * half), 41);
    let psi0 = basis_vector(h.dim(), start);
    let unitary = dynamics::evolve_schrodinger(&h, &psi0, &times, &obs).unwrap();
    let rho0 = dynamics::pure_density(&psi0);
    let gap = |k: f64| {
        let traj = evolve_lindblad(&h, &spec, &rho0, &DecaySpec { gamma_a: k * g_eff }, &times, &obs, &LindbladOptions::default()).unwrap();
        let defect = traj.hermiticity_defect.as_ref().unwrap().iter().fold(0.0f64, |m, x| m.max(*x));
        assert!(defect <= 1e-10, "hermiticity defect {defect:e}");
        traj.populations
            .iter()
            .flatten()
            .zip(unitary.populations.iter().flatten())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let (d3, d4) = (gap(1e-3), gap(1e-4));
    let ratio = d3 / d4;
    assert!((8.0..12.5).contains(&ratio), "deviations {d3:e} and {d4:e}");
}

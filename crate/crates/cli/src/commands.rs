use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use drivenjc::dynamics::{self, DecaySpec, LindbladOptions, Observables, ProtocolDurations};
use drivenjc::effective::analytic;
use drivenjc::feasibility::{self, Platform};
use drivenjc::linalg::basis_vector;
use drivenjc::output::{config_hash, num, write_csv, Table};
use drivenjc::scenario::Scenario;
use drivenjc::spectral::{self, CrossingReport, DRIFT_WARNING};
use drivenjc::{Error, Process, Result};

use crate::args::{parse_list, Cli, Command};
use crate::run_config::{RunConfig, RunConfigOverrides};

const BUNDLED_PLATFORMS: &str = include_str!("../../core/data/platforms.csv");

/// Extra truncation used by the convergence check.
const CHECK_EXTRA: usize = 2;

pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.common.config {
        Some(path) => RunConfigOverrides::from_text(&fs::read_to_string(path).map_err(|e| Error::file(path, e))?)?,
        None => RunConfigOverrides::default(),
    };
    let mut merged = file.overlay(cli.common.overrides()?);
    if merged.omega_over_g.is_none() {
        let process = merged.process.unwrap_or(Process::I);
        match cli.command {
            Command::Table { .. } => merged.omega_over_g = Some(20.0),
            Command::Lindblad { .. } => merged.omega_over_g = Some(lindblad_default_omega(process)),
            _ => {}
        }
    }
    merged.resolve()
}

/// Default omega/g of the lossy runs: weaker drive, faster effective rates.
pub fn lindblad_default_omega(process: Process) -> f64 {
    match process {
        Process::I | Process::II => 20.0,
        Process::III => 10.0,
    }
}

struct Artifact<'a> {
    command: &'static str,
    cfg: &'a RunConfig,
    options: Vec<(String, String)>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    generated: String,
    config_hash: String,
    config: &'a RunConfig,
    options: serde_json::Map<String, Value>,
    summary: Value,
}

impl Artifact<'_> {
    fn hash(&self) -> Result<String> {
        config_hash(&(self.command, self.cfg, &self.options))
    }

    /// Writes `<dir>/<command><suffix>.csv`; the timestamp is the only
    /// line that varies between identical runs.
    fn write_table(&self, suffix: &str, table: &Table) -> Result<PathBuf> {
        fs::create_dir_all(&self.cfg.out_dir).map_err(|e| Error::file(&self.cfg.out_dir, e))?;
        let path = self.cfg.out_dir.join(format!("{}{suffix}.csv", self.command));
        let mut meta = vec![
            ("generated".to_string(), timestamp()),
            ("command".to_string(), self.command.to_string()),
            ("config_hash".to_string(), self.hash()?),
            ("units".to_string(), "energies in g, times in 1/g".to_string()),
        ];
        meta.extend(self.cfg.metadata());
        meta.extend(self.options.iter().cloned());
        write_csv(fs::File::create(&path).map_err(|e| Error::file(&path, e))?, &meta, table)?;
        Ok(path)
    }

    fn write_sidecar(&self, summary: Value) -> Result<PathBuf> {
        fs::create_dir_all(&self.cfg.out_dir).map_err(|e| Error::file(&self.cfg.out_dir, e))?;
        let path = self.cfg.out_dir.join(format!("{}.json", self.command));
        let sidecar = Sidecar {
            command: self.command,
            generated: timestamp(),
            config_hash: self.hash()?,
            config: self.cfg,
            options: self.options.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect(),
            summary,
        };
        fs::write(&path, serde_json::to_string_pretty(&sidecar)? + "\n").map_err(|e| Error::file(&path, e))?;
        Ok(path)
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn opt(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

/// Warns on stderr when the target splitting moves by more than
/// `DRIFT_WARNING` with two extra photons per mode.
fn convergence_check(sc: &Scenario) -> Result<f64> {
    let d = spectral::truncation_check(sc, CHECK_EXTRA)?;
    if d.drift > DRIFT_WARNING {
        eprintln!(
            "warning: truncation not converged: relative drift {:.3e} when adding {CHECK_EXTRA} photons per mode",
            d.drift
        );
    }
    Ok(d.drift)
}

fn crossing_json(r: &CrossingReport) -> Value {
    json!({
        "location": r.location,
        "splitting": r.splitting,
        "half_splitting": r.half_splitting,
        "eigvec_overlaps": r.eigvec_overlaps,
        "gram_det": r.gram_det,
    })
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Spectrum { points, from, to } => spectrum(&cfg, *points, *from, *to),
        Command::Crossing { width } => crossing(&cfg, *width),
        Command::Validity { scan } => validity(&cfg, &parse_list("scan", scan)?),
        Command::Rabi { periods, samples } => rabi(&cfg, *periods, *samples),
        Command::Lindblad {
            gamma_over_geff,
            duration,
            samples,
        } => lindblad(&cfg, &parse_list("gamma_over_geff", gamma_over_geff)?, *duration, *samples),
        Command::Protocol {
            drive,
            prepare,
            readout,
            samples,
        } => protocol(&cfg, *drive, *prepare, *readout, *samples),
        Command::Table { platforms } => table(&cfg, platforms.as_deref()),
        Command::Effparams => effparams(&cfg),
    }
}

fn spectrum(cfg: &RunConfig, points: usize, from: Option<f64>, to: Option<f64>) -> Result<()> {
    let sc = cfg.scenario();
    let lo = from.unwrap_or(0.0);
    let hi = to.unwrap_or(2.0 * sc.bare_resonance()?);
    let sweep = spectral::sweep(|x| sc.rotated(x), lo, hi, points)?;
    let art = Artifact {
        command: "spectrum",
        cfg,
        options: vec![opt("points", points), opt("from", lo), opt("to", hi), opt("axis", spectral::swept_name(sc.process))],
    };
    let written = vec![
        art.write_table("", &sweep.to_table())?,
        art.write_table("_branches", &sweep.to_branch_table())?,
        art.write_sidecar(json!({
            "levels": sweep.levels.first().map_or(0, Vec::len),
            "points": sweep.len(),
            "bare_resonance": sc.bare_resonance()?,
            "resonance_guess": sc.resonance_guess()?,
        }))?,
    ];
    println!(
        "process {}: {} levels at {} points, {} in [{lo}, {hi}]",
        sc.process,
        sweep.levels[0].len(),
        sweep.len(),
        spectral::swept_name(sc.process)
    );
    report_written(&written);
    Ok(())
}

fn crossing(cfg: &RunConfig, width: f64) -> Result<()> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid("width", "must be > 0"));
    }
    let sc = cfg.scenario();
    let eff = sc.analytic()?;
    let r = spectral::scenario_crossing(&sc, width)?;
    let drift = convergence_check(&sc)?;
    let analytic = eff.coupling();
    let rel = (r.half_splitting - analytic).abs() / analytic;
    let mut t = Table::new([
        "location",
        "analytic_location",
        "half_splitting",
        "analytic_g_eff",
        "relative_error",
        "overlap_1",
        "overlap_2",
        "gram_det",
        "truncation_drift",
    ]);
    t.push_numbers(&[
        r.location,
        eff.resonance(),
        r.half_splitting,
        analytic,
        rel,
        r.eigvec_overlaps[0],
        r.eigvec_overlaps[1],
        r.gram_det,
        drift,
    ]);
    let art = Artifact {
        command: "crossing",
        cfg,
        options: vec![opt("width", width)],
    };
    let mut summary = crossing_json(&r);
    summary["analytic_location"] = json!(eff.resonance());
    summary["analytic_g_eff"] = json!(analytic);
    summary["relative_error"] = json!(rel);
    summary["truncation_drift"] = json!(drift);
    let written = vec![art.write_table("", &t)?, art.write_sidecar(summary)?];
    let axis = spectral::swept_name(sc.process);
    println!("process {}: avoided crossing at {axis} = {:.10}", sc.process, r.location);
    println!("  analytic resonance (bare + delta) = {:.10}", eff.resonance());
    println!("  half splitting = {:.6e}, analytic |g_eff| = {:.6e}, relative difference {:.3e}", r.half_splitting, analytic, rel);
    println!("  overlaps = ({:.6}, {:.6}), gram det = {:.6}", r.eigvec_overlaps[0], r.eigvec_overlaps[1], r.gram_det);
    report_written(&written);
    Ok(())
}

fn validity(cfg: &RunConfig, scan: &[f64]) -> Result<()> {
    let sc = cfg.scenario();
    let points = spectral::validity_scan(&sc, scan)?;
    let t = spectral::validity_table(&points);
    let art = Artifact {
        command: "validity",
        cfg,
        options: vec![opt("scan", scan.iter().map(|x| num(*x)).collect::<Vec<_>>().join(","))],
    };
    let failures = points.iter().filter(|p| p.result.is_err()).count();
    let written = vec![
        art.write_table("", &t)?,
        art.write_sidecar(json!({ "points": points.len(), "failed_points": failures }))?,
    ];
    print!("{}", t.render_aligned());
    report_written(&written);
    Ok(())
}

fn resonant_hamiltonian(sc: &Scenario) -> Result<(CrossingReport, drivenjc::OperatorMatrix)> {
    let (r, _) = spectral::scenario_crossing_with_fallback(sc)?;
    let h = sc.rotated(r.location)?;
    Ok((r, h))
}

fn rabi(cfg: &RunConfig, periods: f64, samples: usize) -> Result<()> {
    if !(periods.is_finite() && periods > 0.0) {
        return Err(Error::invalid("periods", "must be > 0"));
    }
    if samples < 2 {
        return Err(Error::invalid("samples", "must be >= 2"));
    }
    let sc = cfg.scenario();
    let (r, h) = resonant_hamiltonian(&sc)?;
    let drift = convergence_check(&sc)?;
    let spec = sc.space()?;
    let (start, partner, _) = sc.transfer_setup()?;
    let labels = Observables::basis_states(&spec, ["-", "+"]);
    let obs = Observables {
        populations: vec![labels.populations[start].clone(), labels.populations[partner].clone()],
        expectations: Vec::new(),
    }
    .with_photon_numbers(&spec)?;
    let period = std::f64::consts::PI / r.half_splitting;
    let times = dynamics::time_grid(periods * period, samples);
    let traj = dynamics::evolve_schrodinger(&h, &basis_vector(h.dim(), start), &times, &obs)?;
    let transfer = dynamics::Propagator::new(&h)?.apply(&basis_vector(h.dim(), start), period / 2.0)[partner].norm_sqr();
    let art = Artifact {
        command: "rabi",
        cfg,
        options: vec![opt("periods", periods), opt("samples", samples)],
    };
    let written = vec![
        art.write_table("", &traj.to_table())?,
        art.write_sidecar(json!({
            "crossing": crossing_json(&r),
            "transfer_time": period / 2.0,
            "transfer_population": transfer,
            "truncation_drift": drift,
        }))?,
    ];
    println!(
        "process {}: {} -> {} transfer {:.6} at t = pi/(2 g_eff) = {:.6}",
        sc.process, obs.populations[0].0, obs.populations[1].0, transfer, period / 2.0
    );
    report_written(&written);
    Ok(())
}

fn lindblad(cfg: &RunConfig, gammas: &[f64], duration: f64, samples: usize) -> Result<()> {
    if let Some(g) = gammas.iter().find(|g| **g < 0.0) {
        return Err(Error::invalid("gamma_over_geff", format!("rates must be >= 0, got {g}")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid("duration", "must be > 0"));
    }
    if samples < 2 {
        return Err(Error::invalid("samples", "must be >= 2"));
    }
    let sc = cfg.scenario();
    let eff = sc.analytic()?;
    let (r, h) = resonant_hamiltonian(&sc)?;
    let drift = convergence_check(&sc)?;
    let spec = sc.space()?;
    let (start, partner, mode) = sc.transfer_setup()?;
    let labels = Observables::basis_states(&spec, ["-", "+"]);
    let obs = Observables {
        populations: vec![labels.populations[start].clone(), labels.populations[partner].clone()],
        expectations: Vec::new(),
    }
    .with_photon_numbers(&spec)?;
    let g_eff = eff.coupling();
    let t_transfer = std::f64::consts::PI / (2.0 * r.half_splitting);
    let times = dynamics::time_grid(duration * t_transfer, samples);
    let rho0 = dynamics::pure_density(&basis_vector(h.dim(), start));
    let runs = gammas
        .par_iter()
        .map(|&k| {
            dynamics::evolve_lindblad(
                &h,
                &spec,
                &rho0,
                &DecaySpec { gamma_a: k * g_eff },
                &times,
                &obs,
                &LindbladOptions::default(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(["gamma_over_geff", "time", mode, "P_start", "P_partner", "trace", "min_eigenvalue"]);
    let mut peaks = Vec::new();
    for (k, traj) in gammas.iter().zip(&runs) {
        let n = traj.expectation(mode).expect("monitored mode recorded");
        let mins = traj.min_eigenvalue.as_ref().expect("mixed trajectory");
        for i in 0..traj.len() {
            t.push_numbers(&[*k, traj.times[i], n[i], traj.populations[i][0], traj.populations[i][1], traj.total[i], mins[i]]);
        }
        let peak = dynamics::peak_until(&traj.times, &n, duration * t_transfer).map_or(f64::NAN, |p| p.1);
        peaks.push(json!({ "gamma_over_geff": k, "first_maximum": peak }));
        println!("gamma = {k} g_eff: first maximum of {mode} = {peak:.6}");
    }
    let art = Artifact {
        command: "lindblad",
        cfg,
        options: vec![
            opt("gamma_over_geff", gammas.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")),
            opt("duration", duration),
            opt("samples", samples),
        ],
    };
    let written = vec![
        art.write_table("", &t)?,
        art.write_sidecar(json!({
            "crossing": crossing_json(&r),
            "analytic_g_eff": g_eff,
            "peaks": peaks,
            "truncation_drift": drift,
        }))?,
    ];
    report_written(&written);
    Ok(())
}

fn protocol(cfg: &RunConfig, drive: f64, prepare: f64, readout: f64, samples: usize) -> Result<()> {
    if cfg.process != Process::I {
        return Err(Error::invalid("process", "the protocol is defined for process I"));
    }
    if !(drive.is_finite() && drive >= 0.0) {
        return Err(Error::invalid("drive", "must be >= 0"));
    }
    let sc = cfg.scenario();
    let (r, _) = spectral::scenario_crossing_with_fallback(&sc)?;
    let drift = convergence_check(&sc)?;
    let t_transfer = std::f64::consts::PI / (2.0 * r.half_splitting);
    let durations = ProtocolDurations {
        prepare,
        drive: drive * t_transfer,
        readout,
    };
    let params = sc.drive_params(r.location)?;
    let res = dynamics::run_protocol(&params, (sc.truncations[0], sc.truncations[1]), &durations, samples)?;
    let art = Artifact {
        command: "protocol",
        cfg,
        options: vec![opt("drive", drive), opt("prepare", prepare), opt("readout", readout), opt("samples", samples)],
    };
    let written = vec![
        art.write_table("", &res.trajectory.to_table())?,
        art.write_sidecar(json!({
            "delta1": r.location,
            "drive_window": durations.drive,
            "minus_population": res.minus_population,
            "excited_population": res.excited_population,
            "ground_population": res.ground_population,
            "photon_numbers": res.photon_numbers,
            "truncation_drift": drift,
        }))?,
    ];
    println!("drive window {:.6} (1/g) at delta1 = {:.10}", durations.drive, r.location);
    println!(
        "  final P(e) = {:.6}, P(g) = {:.6}, <n1> = {:.6}, <n2> = {:.6}",
        res.excited_population, res.ground_population, res.photon_numbers[0], res.photon_numbers[1]
    );
    report_written(&written);
    Ok(())
}

fn table(cfg: &RunConfig, platforms: Option<&Path>) -> Result<()> {
    let list: Vec<Platform> = match platforms {
        Some(p) => feasibility::load_platforms(p)?,
        None => feasibility::parse_platforms(BUNDLED_PLATFORMS)?,
    };
    let t = feasibility::feasibility_table(&list, cfg.omega_over_g, cfg.f)?;
    let art = Artifact {
        command: "table",
        cfg,
        options: vec![opt(
            "platforms",
            platforms.map_or("bundled".to_string(), |p| p.display().to_string()),
        )],
    };
    let mut deviations = Vec::new();
    for p in &list {
        if let Some(reference) = p.reference {
            let row = feasibility::feasibility_row(p, cfg.omega_over_g, cfg.f)?;
            let within: Vec<bool> = row
                .iter()
                .zip(reference)
                .map(|(v, r)| (v - r).abs() <= feasibility::printed_tolerance(r))
                .collect();
            deviations.push(json!({ "platform": p.name, "computed": row, "reference": reference, "within_tolerance": within }));
        }
    }
    let written = vec![art.write_table("", &t)?, art.write_sidecar(json!({ "comparison": deviations }))?];
    let mut shown = Table::new(["platform", "g/2pi [Hz]", "gamma/2pi [Hz]", "I", "II", "III"]);
    for row in &t.rows {
        let mut r = row[..3].to_vec();
        r.extend(row[3..].iter().map(|v| format!("{:.4}", v.parse::<f64>().unwrap_or(f64::NAN))));
        shown.push(r);
    }
    println!("g_eff / gamma at omega/g = {}, f = {}, optimal detuning per process", cfg.omega_over_g, cfg.f);
    print!("{}", shown.render_aligned());
    report_written(&written);
    Ok(())
}

fn effparams(cfg: &RunConfig) -> Result<()> {
    let sc = cfg.scenario();
    let frame = sc.frame()?;
    let eff = sc.analytic()?;
    let resonant = sc.analytic_resonant()?;
    let engine = sc.engine_estimate()?;
    let ratio = eff.g_eff / resonant.g_eff;
    let mut t = Table::new(["quantity", "analytic", "engine"]);
    let chi2 = |e: &analytic::EffectiveParams| e.chi2.map_or(String::new(), num);
    t.push(vec!["g_eff".into(), num(eff.g_eff), num(engine.g_eff)]);
    t.push(vec!["g_eff_sign".into(), num(eff.g_eff_sign), String::new()]);
    t.push(vec!["chi1".into(), num(eff.chi1), num(engine.chi1)]);
    t.push(vec!["chi2".into(), chi2(&eff), chi2(&engine)]);
    t.push(vec!["lambda".into(), num(eff.lambda), num(engine.lambda)]);
    t.push(vec!["delta".into(), num(eff.delta), num(engine.delta)]);
    t.push(vec!["resonance".into(), num(eff.resonance()), num(eff.bare_resonance() + engine.delta)]);
    t.push(vec!["ratio_to_resonant_drive".into(), num(ratio), String::new()]);
    t.push(vec!["rabi".into(), num(frame.rabi), String::new()]);
    t.push(vec!["dsigma".into(), num(frame.dsigma), String::new()]);
    t.push(vec!["theta".into(), num(frame.theta), String::new()]);
    let art = Artifact {
        command: "effparams",
        cfg,
        options: Vec::new(),
    };
    let written = vec![
        art.write_table("", &t)?,
        art.write_sidecar(json!({ "analytic": eff, "engine": engine, "ratio_to_resonant_drive": ratio }))?,
    ];
    print!("{}", t.render_aligned());
    report_written(&written);
    Ok(())
}

//! Spectra along a detuning axis, avoided-crossing search, and the
//! analytic-vs-numeric validity study.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effective::Process;
use crate::error::{Error, Result};
use crate::hilbert::OperatorMatrix;
use crate::linalg::HermitianEigen;
use crate::optimize;
use crate::output::{num, Table};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Vec<f64>,
    /// Ascending eigenvalues at each axis point.
    pub levels: Vec<Vec<f64>>,
    /// `labels[k][j]`: branch carrying level `j` at point `k`, continued
    /// adiabatically from the first point by maximal eigenvector overlap.
    pub labels: Option<Vec<Vec<usize>>>,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Energy of one adiabatic branch across the sweep.
    pub fn branch(&self, label: usize) -> Option<Vec<f64>> {
        let labels = self.labels.as_ref()?;
        labels
            .iter()
            .zip(&self.levels)
            .map(|(lab, lev)| lab.iter().position(|&l| l == label).map(|j| lev[j]))
            .collect()
    }

    /// One row per axis point: `detuning, E_0, ..., E_{d-1}`.
    pub fn to_table(&self) -> Table {
        let dim = self.levels.first().map_or(0, Vec::len);
        let mut t = Table::new(std::iter::once("detuning".to_string()).chain((0..dim).map(|k| format!("E_{k}"))));
        for (x, lev) in self.axis.iter().zip(&self.levels) {
            t.push(std::iter::once(num(*x)).chain(lev.iter().map(|&e| num(e))).collect());
        }
        t
    }

    /// Long format with branch labels: `detuning, level, branch, energy`.
    pub fn to_branch_table(&self) -> Table {
        let mut t = Table::new(["detuning", "level", "branch", "energy"]);
        for (k, (x, lev)) in self.axis.iter().zip(&self.levels).enumerate() {
            for (j, e) in lev.iter().enumerate() {
                let branch = self.labels.as_ref().map_or(j, |l| l[k][j]);
                t.push(vec![num(*x), j.to_string(), branch.to_string(), num(*e)]);
            }
        }
        t
    }
}

/// Evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| if k + 1 == points { hi } else { lo + step * k as f64 }).collect()
}

fn decompose<F>(builder: &F, x: f64) -> Result<HermitianEigen>
where
    F: Fn(f64) -> Result<OperatorMatrix>,
{
    let h = builder(x)?;
    h.require_hermitian()?;
    Ok(HermitianEigen::new(h.matrix()))
}

/// Greedy matching of the eigenvectors at one point onto those of the
/// previous point: the largest remaining overlap is assigned first.
fn continue_labels(prev: &HermitianEigen, prev_labels: &[usize], cur: &HermitianEigen) -> Vec<usize> {
    let d = cur.dim();
    let overlap = prev.vectors.adjoint() * &cur.vectors;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            pairs.push((overlap[(i, j)].norm_sqr(), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut used_prev = vec![false; d];
    let mut labels = vec![usize::MAX; d];
    for (_, i, j) in pairs {
        if !used_prev[i] && labels[j] == usize::MAX {
            used_prev[i] = true;
            labels[j] = prev_labels[i];
        }
    }
    labels
}

/// Full spectrum at `resolution` evenly spaced points of `[lo, hi]`, with
/// adiabatic branch labels.
pub fn sweep<F>(builder: F, lo: f64, hi: f64, resolution: usize) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<OperatorMatrix> + Sync,
{
    if resolution < 3 {
        return Err(Error::invalid("resolution", format!("must be >= 3, got {resolution}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("axis", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let axis = linspace(lo, hi, resolution);
    let eigs = axis
        .par_iter()
        .map(|&x| decompose(&builder, x))
        .collect::<Result<Vec<_>>>()?;
    let dim = eigs[0].dim();
    if eigs.iter().any(|e| e.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: eigs.iter().map(HermitianEigen::dim).find(|&d| d != dim).unwrap_or(dim),
        });
    }
    let mut labels = vec![(0..dim).collect::<Vec<_>>()];
    for k in 1..eigs.len() {
        let next = continue_labels(&eigs[k - 1], &labels[k - 1], &eigs[k]);
        labels.push(next);
    }
    Ok(SweepResult {
        axis,
        levels: eigs.into_iter().map(|e| e.values).collect(),
        labels: Some(labels),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub location: f64,
    pub splitting: f64,
    pub half_splitting: f64,
    /// `|<phi_k|t1>|^2 + |<phi_k|t2>|^2` for the two tracked eigenvectors.
    pub eigvec_overlaps: [f64; 2],
    /// `|det M|^2` with `M_ij = <t_i|phi_j>`: 1 when the tracked pair spans
    /// the target pair exactly.
    pub gram_det: f64,
    pub evaluations: usize,
}

impl CrossingReport {
    pub fn min_overlap(&self) -> f64 {
        self.eigvec_overlaps[0].min(self.eigvec_overlaps[1])
    }
}

/// Points of the coarse scan preceding golden-section refinement.
pub const COARSE_POINTS: usize = 41;
/// Relative location tolerance of the refinement.
pub const LOCATION_RTOL: f64 = 1e-8;

struct Tracked {
    gap: f64,
    pair: [usize; 2],
    overlaps: [f64; 2],
    eig: HermitianEigen,
}

fn track(eig: HermitianEigen, targets: (usize, usize)) -> Tracked {
    let weight = |k: usize| eig.vectors[(targets.0, k)].norm_sqr() + eig.vectors[(targets.1, k)].norm_sqr();
    let mut order: Vec<usize> = (0..eig.dim()).collect();
    order.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)).then(a.cmp(&b)));
    let (i, j) = if order[0] < order[1] {
        (order[0], order[1])
    } else {
        (order[1], order[0])
    };
    Tracked {
        gap: (eig.values[j] - eig.values[i]).abs(),
        pair: [i, j],
        overlaps: [weight(i).min(1.0), weight(j).min(1.0)],
        eig,
    }
}

/// Locates the minimum, within `[lo, hi]`, of the gap between the two
/// eigenstates with the largest weight on the target pair.
pub fn find_avoided_crossing<F>(builder: F, lo: f64, hi: f64, targets: (usize, usize)) -> Result<CrossingReport>
where
    F: Fn(f64) -> Result<OperatorMatrix> + Sync,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("bracket", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    if targets.0 == targets.1 {
        return Err(Error::invalid("targets", "the two target states must differ"));
    }
    let probe = builder(lo)?;
    let dim = probe.dim();
    if targets.0 >= dim || targets.1 >= dim {
        return Err(Error::IndexOutOfRange {
            index: targets.0.max(targets.1),
            len: dim,
        });
    }
    let at = |x: f64| -> Result<Tracked> { Ok(track(decompose(&builder, x)?, targets)) };
    let grid = linspace(lo, hi, COARSE_POINTS);
    let gaps = grid
        .par_iter()
        .map(|&x| at(x).map(|t| t.gap))
        .collect::<Result<Vec<_>>>()?;
    let minima: Vec<usize> = (1..gaps.len() - 1)
        .filter(|&k| gaps[k] <= gaps[k - 1] && gaps[k] <= gaps[k + 1] && (gaps[k] < gaps[k - 1] || gaps[k] < gaps[k + 1]))
        .collect();
    let k = match minima.as_slice() {
        [] => return Err(Error::NoMinimumInBracket { lo, hi }),
        [k] => *k,
        many => {
            return Err(Error::MultipleMinima {
                lo,
                hi,
                count: many.len(),
            })
        }
    };
    let (a, b) = (grid[k - 1], grid[k + 1]);
    let xtol = LOCATION_RTOL * grid[k].abs().max(hi - lo);
    let mut failure = None;
    let m = optimize::golden_section(
        |x| match at(x) {
            Ok(t) => t.gap,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        a,
        b,
        xtol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (location, best) = if m.value <= gaps[k] { (m.x, at(m.x)?) } else { (grid[k], at(grid[k])?) };
    let [i, j] = best.pair;
    let amp = |t: usize, v: usize| best.eig.vectors[(t, v)];
    let det = amp(targets.0, i) * amp(targets.1, j) - amp(targets.0, j) * amp(targets.1, i);
    Ok(CrossingReport {
        location,
        splitting: best.gap,
        half_splitting: best.gap / 2.0,
        eigvec_overlaps: best.overlaps,
        gram_det: (det * det.conj()).re.min(1.0),
        evaluations: m.evaluations + COARSE_POINTS,
    })
}

/// Default bracket half-width, in units of the analytic `|g_eff|`.
pub const DEFAULT_BRACKET_WIDTH: f64 = 20.0;
/// Half-widths tried in turn when a wider bracket fails.
pub const FALLBACK_WIDTHS: [f64; 4] = [20.0, 10.0, 5.0, 2.5];

/// Crossing of a scenario's target pair in a bracket of half-width
/// `width * |g_eff|` centred on the analytic resonance.
pub fn scenario_crossing(sc: &Scenario, width: f64) -> Result<CrossingReport> {
    sc.validate()?;
    let eff = sc.analytic()?;
    let centre = eff.resonance();
    let half = width * eff.coupling();
    if !(half.is_finite() && half > 0.0) {
        return Err(Error::invalid("g", "bracket needs a nonzero analytic coupling"));
    }
    find_avoided_crossing(|x| sc.rotated(x), centre - half, centre + half, sc.targets()?)
}

/// [`scenario_crossing`] over [`FALLBACK_WIDTHS`], returning the first
/// success and the width used.
pub fn scenario_crossing_with_fallback(sc: &Scenario) -> Result<(CrossingReport, f64)> {
    let mut last = None;
    for w in FALLBACK_WIDTHS {
        match scenario_crossing(sc, w) {
            Ok(r) => return Ok((r, w)),
            Err(e @ (Error::NoMinimumInBracket { .. } | Error::MultipleMinima { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one width"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityRow {
    pub omega_over_g: f64,
    pub numeric_half_splitting: f64,
    /// `|g_eff|` times the bosonic factor of the target pair.
    pub analytic: f64,
    pub relative_error: f64,
    pub location: f64,
    pub analytic_location: f64,
    pub min_overlap: f64,
    pub gram_det: f64,
    pub bracket_width: f64,
}

#[derive(Debug)]
pub struct ValidityPoint {
    pub omega_over_g: f64,
    pub result: Result<ValidityRow>,
}

/// Runs the crossing search at each `omega / g`, with everything else taken
/// from `base`. Per-point failures are recorded, not propagated.
pub fn validity_scan(base: &Scenario, omega_over_g: &[f64]) -> Result<Vec<ValidityPoint>> {
    if let Some(&bad) = omega_over_g.iter().find(|&&x| !(x.is_finite() && x > 1.0)) {
        return Err(Error::invalid("omega_over_g", format!("scan values must be > 1, got {bad}")));
    }
    if !(base.g.is_finite() && base.g > 0.0) {
        return Err(Error::invalid("g", "validity scan needs g > 0"));
    }
    Ok(omega_over_g
        .par_iter()
        .map(|&x| {
            let mut sc = base.clone();
            sc.omega = x * base.g;
            let result = sc.analytic().and_then(|eff| {
                let (r, w) = scenario_crossing_with_fallback(&sc)?;
                let analytic = eff.coupling();
                Ok(ValidityRow {
                    omega_over_g: x,
                    numeric_half_splitting: r.half_splitting,
                    analytic,
                    relative_error: (r.half_splitting - analytic).abs() / analytic,
                    location: r.location,
                    analytic_location: eff.resonance(),
                    min_overlap: r.min_overlap(),
                    gram_det: r.gram_det,
                    bracket_width: w,
                })
            });
            ValidityPoint {
                omega_over_g: x,
                result,
            }
        })
        .collect())
}

pub fn validity_table(points: &[ValidityPoint]) -> Table {
    let mut t = Table::new([
        "omega_over_g",
        "numeric_half_splitting",
        "analytic_g_eff",
        "relative_error",
        "location",
        "analytic_location",
        "min_overlap",
        "gram_det",
        "bracket_width",
        "error",
    ]);
    for p in points {
        match &p.result {
            Ok(r) => {
                let mut row: Vec<String> = [
                    r.omega_over_g,
                    r.numeric_half_splitting,
                    r.analytic,
                    r.relative_error,
                    r.location,
                    r.analytic_location,
                    r.min_overlap,
                    r.gram_det,
                    r.bracket_width,
                ]
                .iter()
                .map(|&v| num(v))
                .collect();
                row.push(String::new());
                t.push(row);
            }
            Err(e) => {
                let mut row = vec![num(p.omega_over_g)];
                row.extend(std::iter::repeat_n(String::new(), 8));
                row.push(e.to_string());
                t.push(row);
            }
        }
    }
    t
}

/// Splitting and location at two truncations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationDrift {
    pub base: CrossingReport,
    pub enlarged: CrossingReport,
    /// `max(|ds| / s, |dx| / (s/2))` for splitting `s` and location `x`;
    /// zero when both differences vanish.
    pub drift: f64,
}

/// Warning threshold on [`TruncationDrift::drift`].
pub const DRIFT_WARNING: f64 = 1e-3;

fn relative(diff: f64, scale: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff.abs() / scale.abs()
    }
}

/// Repeats the crossing search with every truncation raised by `extra`.
/// The search bracket is that of the base scenario.
pub fn truncation_check(sc: &Scenario, extra: usize) -> Result<TruncationDrift> {
    let (base, width) = scenario_crossing_with_fallback(sc)?;
    let big = sc.enlarged(extra);
    let enlarged = scenario_crossing(&big, width)?;
    let drift = relative(enlarged.splitting - base.splitting, base.splitting)
        .max(relative(enlarged.location - base.location, base.half_splitting));
    Ok(TruncationDrift {
        base,
        enlarged,
        drift,
    })
}

/// Exact-spectrum crossing search for a scenario whose coupling is zero:
/// the bracket is centred on the bare resonance with a fixed half-width.
pub fn bare_crossing(sc: &Scenario, half_width: f64) -> Result<CrossingReport> {
    let centre = sc.bare_resonance()?;
    find_avoided_crossing(|x| sc.rotated(x), centre - half_width, centre + half_width, sc.targets()?)
}

/// Whether a scenario's process sweeps `D1` (I, II) or `Da` (III).
pub fn swept_name(process: Process) -> &'static str {
    if process.is_two_cavity() {
        "delta1"
    } else {
        "delta_a"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DetuningMode;

    fn reference_point() -> Scenario {
        Scenario::new(Process::I, 80.0).with_dsigma(DetuningMode::Explicit(80.0 / std::f64::consts::SQRT_2))
    }

    #[test]
    fn uncoupled_levels_are_straight_lines() {
        let mut sc = reference_point();
        sc.g = 0.0;
        let r = sweep(|x| sc.rotated(x), 0.0, 200.0, 11).unwrap();
        for label in 0..r.levels[0].len() {
            let b = r.branch(label).unwrap();
            let slope = (b[1] - b[0]) / (r.axis[1] - r.axis[0]);
            for k in 0..b.len() {
                let line = b[0] + slope * (r.axis[k] - r.axis[0]);
                assert!((b[k] - line).abs() < 1e-9, "branch {label}");
            }
        }
    }

    #[test]
    fn shared_points_are_resolution_independent() {
        let sc = reference_point();
        let coarse = sweep(|x| sc.rotated(x), 50.0, 70.0, 5).unwrap();
        let fine = sweep(|x| sc.rotated(x), 50.0, 70.0, 9).unwrap();
        for k in 0..5 {
            assert_eq!(coarse.axis[k], fine.axis[2 * k]);
            assert_eq!(coarse.levels[k], fine.levels[2 * k]);
        }
    }

    #[test]
    fn sweep_preconditions() {
        let sc = reference_point();
        assert!(sweep(|x| sc.rotated(x), 0.0, 1.0, 2).is_err());
        assert!(sweep(|x| sc.rotated(x), 1.0, 0.0, 5).is_err());
        let bad = |_x: f64| Ok(OperatorMatrix::new(crate::hilbert::sigma_minus().into_matrix()));
        assert!(matches!(sweep(bad, 0.0, 1.0, 3), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn uncoupled_crossing_closes() {
        let mut sc = reference_point();
        sc.g = 0.0;
        let r = bare_crossing(&sc, 1.0).unwrap();
        assert!(r.splitting < 1e-6);
        assert!((r.location - sc.bare_resonance().unwrap()).abs() < 1e-6);
    }

    #[test]
    fn process_i_half_splitting() {
        let sc = reference_point();
        let r = scenario_crossing(&sc, DEFAULT_BRACKET_WIDTH).unwrap();
        let g = sc.analytic().unwrap().g_eff;
        assert!((r.half_splitting - g).abs() < 0.02 * g);
        assert!(r.min_overlap() > 0.99 && r.min_overlap() <= 1.0 + 1e-10);
        assert!(r.gram_det > 0.98);
    }

    #[test]
    fn half_splitting_symmetric_in_targets() {
        let sc = reference_point();
        let eff = sc.analytic().unwrap();
        let (t1, t2) = sc.targets().unwrap();
        let (lo, hi) = (eff.resonance() - 20.0 * eff.g_eff, eff.resonance() + 20.0 * eff.g_eff);
        let a = find_avoided_crossing(|x| sc.rotated(x), lo, hi, (t1, t2)).unwrap();
        let b = find_avoided_crossing(|x| sc.rotated(x), lo, hi, (t2, t1)).unwrap();
        assert_eq!(a.half_splitting, b.half_splitting);
    }

    #[test]
    fn bracket_without_interior_minimum() {
        let sc = reference_point();
        let eff = sc.analytic().unwrap();
        let x = eff.resonance() + 50.0 * eff.g_eff;
        assert!(matches!(
            find_avoided_crossing(|d| sc.rotated(d), x, x + 10.0 * eff.g_eff, sc.targets().unwrap()),
            Err(Error::NoMinimumInBracket { .. })
        ));
    }

    #[test]
    fn drift_small_at_default_truncation_and_large_at_one_photon() {
        let d = truncation_check(&reference_point(), 2).unwrap();
        assert!(d.drift < DRIFT_WARNING, "{}", d.drift);
        let d = truncation_check(&reference_point().with_truncation(1), 2).unwrap();
        assert!(d.drift > DRIFT_WARNING, "{}", d.drift);
    }

    #[test]
    fn validity_rejects_small_ratios() {
        assert!(validity_scan(&reference_point(), &[0.5]).is_err());
    }
}

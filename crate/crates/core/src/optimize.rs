//! Derivative-free one-dimensional minimization.

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `xtol`. `f` is assumed unimodal on the
/// bracket; otherwise a local minimum is returned.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let xtol = xtol.max(f64::EPSILON * a.abs().max(b.abs()));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    while b - a > xtol && evaluations < 10_000 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum {
        x,
        value,
        evaluations,
    }
}

/// Scans `points` equally spaced samples on `[lo, hi]` and refines the best
/// one by golden section between its neighbours.
pub fn grid_then_golden<F>(mut f: F, lo: f64, hi: f64, points: usize, xtol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for k in 0..points {
        let v = f(lo + step * k as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    let left = lo + step * best.0.saturating_sub(1) as f64;
    let right = lo + step * (best.0 + 1).min(points - 1) as f64;
    let mut refined = golden_section(&mut f, left, right, xtol);
    refined.evaluations += points;
    if best.1 < refined.value {
        refined.x = lo + step * best.0 as f64;
        refined.value = best.1;
    }
    refined
}

/// Location of the maximum of `f`, via [`grid_then_golden`] on `-f`.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, points: usize, xtol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let m = grid_then_golden(|x| -f(x), lo, hi, points, xtol);
    Minimum {
        value: -m.value,
        ..m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-12);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn v_shape_is_located_tightly() {
        let m = golden_section(|x: f64| (x - 1.25).abs(), 0.0, 3.0, 1e-13);
        assert!((m.x - 1.25).abs() < 1e-12);
    }

    #[test]
    fn reversed_bracket() {
        let m = golden_section(|x: f64| x.cos(), 4.0, 2.0, 1e-12);
        assert!((m.x - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn grid_picks_global_minimum() {
        // two wells, the right one deeper
        let f = |x: f64| (x * x - 1.0).powi(2) - 0.3 * x;
        let m = grid_then_golden(f, -2.0, 2.0, 101, 1e-12);
        assert!(m.x > 0.0);
        let mx = maximize(|x: f64| -f(x), -2.0, 2.0, 101, 1e-12);
        assert!((mx.x - m.x).abs() < 1e-9);
    }
}

//! Block elimination: for `H = [[h, V], [V^dag, Hb]]` and a reference energy
//! `E`, the kept block acquires `dh = V (E - Hb)^-1 V^dag`. The inverse is
//! never formed; `(E - Hb) X = V^dag` is solved instead.

use crate::error::{Error, Result};
use crate::hilbert::OperatorMatrix;
use crate::linalg::{self, c, CMatrix, HermitianEigen};

/// Relative size of the default eigenvalue-gap guard, in units of `||H||`.
pub const DEFAULT_GAP_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePartition {
    /// Kept states, in the order of the effective matrix.
    pub target: Vec<usize>,
    /// Eliminated states.
    pub eliminated: Vec<usize>,
    /// Reference energy `E`.
    pub energy: f64,
}

impl SubspacePartition {
    pub fn new(target: Vec<usize>, eliminated: Vec<usize>, energy: f64) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::invalid("target", "kept subspace must be nonempty"));
        }
        if !energy.is_finite() {
            return Err(Error::invalid("energy", "must be finite"));
        }
        let mut seen = std::collections::HashSet::new();
        for &k in target.iter().chain(&eliminated) {
            if !seen.insert(k) {
                return Err(Error::invalid("partition", format!("state {k} listed twice")));
            }
        }
        Ok(SubspacePartition {
            target,
            eliminated,
            energy,
        })
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self.target.iter().chain(&self.eliminated).find(|&&k| k >= dim) {
            Some(&k) => Err(Error::invalid("partition", format!("state {k} outside dimension {dim}"))),
            None => Ok(()),
        }
    }
}

/// The kept block `h` and its correction `dh`.
#[derive(Debug, Clone)]
pub struct EffectiveBlock {
    pub bare: CMatrix,
    pub correction: CMatrix,
}

impl EffectiveBlock {
    /// `h + dh`.
    pub fn hamiltonian(&self) -> CMatrix {
        &self.bare + &self.correction
    }
}

fn submatrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Eliminates `part.eliminated` with the default gap guard
/// `DEFAULT_GAP_RTOL * ||H||_inf`.
pub fn effective_correction(h: &OperatorMatrix, part: &SubspacePartition) -> Result<EffectiveBlock> {
    let tol = DEFAULT_GAP_RTOL * linalg::norm_inf(h.matrix());
    effective_correction_with_gap(h, part, tol)
}

/// As [`effective_correction`] with an explicit absolute gap guard: fails
/// with [`Error::NearDegenerateElimination`] when an eigenvalue of the
/// eliminated block lies within `tol_gap` of `E`.
pub fn effective_correction_with_gap(
    h: &OperatorMatrix,
    part: &SubspacePartition,
    tol_gap: f64,
) -> Result<EffectiveBlock> {
    h.require_hermitian()?;
    part.check_dim(h.dim())?;
    let m = h.matrix();
    let bare = submatrix(m, &part.target, &part.target);
    let na = part.target.len();
    if part.eliminated.is_empty() {
        return Ok(EffectiveBlock {
            bare,
            correction: CMatrix::zeros(na, na),
        });
    }
    let v = submatrix(m, &part.target, &part.eliminated);
    let hb = submatrix(m, &part.eliminated, &part.eliminated);

    let eig = HermitianEigen::new(&hb);
    if let Some(&closest) = eig
        .values
        .iter()
        .min_by(|a, b| (*a - part.energy).abs().total_cmp(&(*b - part.energy).abs()))
    {
        if (closest - part.energy).abs() <= tol_gap {
            return Err(Error::NearDegenerateElimination {
                energy: part.energy,
                eigenvalue: closest,
                tolerance: tol_gap,
            });
        }
    }

    let nb = part.eliminated.len();
    let resolvent = CMatrix::identity(nb, nb) * c(part.energy) - hb;
    let x = resolvent
        .lu()
        .solve(&v.adjoint())
        .ok_or(Error::NearDegenerateElimination {
            energy: part.energy,
            eigenvalue: part.energy,
            tolerance: tol_gap,
        })?;
    let correction = &v * x;
    Ok(EffectiveBlock { bare, correction })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(rows: &[&[f64]]) -> OperatorMatrix {
        let n = rows.len();
        OperatorMatrix::hermitian(CMatrix::from_fn(n, n, |i, j| c(rows[i][j]))).unwrap()
    }

    #[test]
    fn uncoupled_blocks_give_zero_correction() {
        let h = op(&[&[1.0, 0.2, 0.0], &[0.2, 1.1, 0.0], &[0.0, 0.0, 5.0]]);
        let part = SubspacePartition::new(vec![0, 1], vec![2], 1.0).unwrap();
        let blk = effective_correction(&h, &part).unwrap();
        assert!(blk.correction.iter().all(|z| *z == c(0.0)));
        assert_eq!(blk.bare[(0, 1)], c(0.2));
    }

    #[test]
    fn second_order_shift_of_single_state() {
        // one kept state at 0, one eliminated state at detuning 3, coupling v
        let v = 0.25;
        let e_b = 3.0;
        let h = op(&[&[0.0, v, 0.0], &[v, e_b, 0.0], &[0.0, 0.0, -7.0]]);
        let part = SubspacePartition::new(vec![0], vec![1, 2], 0.0).unwrap();
        let blk = effective_correction(&h, &part).unwrap();
        let expect = v * v / (0.0 - e_b);
        assert!((blk.correction[(0, 0)].re - expect).abs() < 1e-15);
    }

    #[test]
    fn degenerate_eliminated_level_is_rejected() {
        let h = op(&[&[0.0, 0.1], &[0.1, 1e-9]]);
        let part = SubspacePartition::new(vec![0], vec![1], 0.0).unwrap();
        assert!(matches!(
            effective_correction(&h, &part),
            Err(Error::NearDegenerateElimination { .. })
        ));
        assert!(effective_correction_with_gap(&h, &part, 1e-12).is_ok());
    }

    #[test]
    fn invalid_partitions() {
        assert!(SubspacePartition::new(vec![], vec![1], 0.0).is_err());
        assert!(SubspacePartition::new(vec![0, 1], vec![1], 0.0).is_err());
        let h = op(&[&[0.0, 0.1], &[0.1, 1.0]]);
        let part = SubspacePartition::new(vec![0], vec![5], 0.0).unwrap();
        assert!(effective_correction(&h, &part).is_err());
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        let h = OperatorMatrix::new(m);
        let part = SubspacePartition::new(vec![0], vec![1], 0.5).unwrap();
        assert!(matches!(effective_correction(&h, &part), Err(Error::NotHermitian { .. })));
    }
}

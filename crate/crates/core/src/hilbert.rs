//! Tensor-product Hilbert spaces built from qubits and truncated bosonic
//! modes, and the operators living on them.
//!
//! Conventions, fixed for the whole crate:
//! - qubit basis order is `(|g>, |e>)`, so index 0 is the ground state. In a
//!   dressed basis index 0 is `|->` and index 1 is `|+>`;
//! - `a|n> = sqrt(n)|n-1>`;
//! - the first subsystem of a [`SpaceSpec`] is the most significant tensor
//!   factor (`A (x) B` with `A` on subsystem 0).

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    Qubit,
    /// Truncated bosonic mode keeping Fock states `0..=truncation`.
    Mode { truncation: usize },
}

impl Subsystem {
    pub fn dim(&self) -> usize {
        match self {
            Subsystem::Qubit => 2,
            Subsystem::Mode { truncation } => truncation + 1,
        }
    }
}

/// Ordered list of subsystems defining a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    subsystems: Vec<Subsystem>,
}

impl SpaceSpec {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::invalid("subsystems", "at least one subsystem is required"));
        }
        if subsystems
            .iter()
            .any(|s| matches!(s, Subsystem::Mode { truncation: 0 }))
        {
            return Err(Error::invalid("truncation", "mode truncation must be >= 1"));
        }
        Ok(SpaceSpec { subsystems })
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(Subsystem::dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).product()
    }

    /// Flat basis index of a product state given per-subsystem levels.
    /// Returns `None` when a level does not exist in the truncated space.
    pub fn index_of(&self, levels: &[usize]) -> Option<usize> {
        if levels.len() != self.subsystems.len() {
            return None;
        }
        let mut index = 0;
        for (level, sub) in levels.iter().zip(&self.subsystems) {
            if *level >= sub.dim() {
                return None;
            }
            index = index * sub.dim() + level;
        }
        Some(index)
    }

    /// Inverse of [`SpaceSpec::index_of`].
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.subsystems.len()];
        for (slot, sub) in levels.iter_mut().zip(&self.subsystems).rev() {
            *slot = index % sub.dim();
            index /= sub.dim();
        }
        levels
    }

    pub fn identity(&self) -> OperatorMatrix {
        OperatorMatrix::identity(self.dim())
    }

    /// `1 (x) ... (x) local (x) ... (x) 1` with `local` on subsystem `which`.
    pub fn embed(&self, which: usize, local: &OperatorMatrix) -> Result<OperatorMatrix> {
        let sub = self.subsystems.get(which).ok_or(Error::IndexOutOfRange {
            index: which,
            len: self.subsystems.len(),
        })?;
        if local.dim() != sub.dim() {
            return Err(Error::DimensionMismatch {
                expected: sub.dim(),
                actual: local.dim(),
            });
        }
        let left: usize = self.subsystems[..which].iter().map(Subsystem::dim).product();
        let right: usize = self.subsystems[which + 1..]
            .iter()
            .map(Subsystem::dim)
            .product();
        let m = linalg::kron(
            &linalg::kron(&CMatrix::identity(left, left), local.matrix()),
            &CMatrix::identity(right, right),
        );
        Ok(OperatorMatrix {
            matrix: m,
            hermitian: local.hermitian,
        })
    }

    /// Annihilation operator of the mode at `which`.
    pub fn annihilation_on(&self, which: usize) -> Result<OperatorMatrix> {
        match self.subsystems.get(which) {
            Some(Subsystem::Mode { truncation }) => self.embed(which, &annihilation(*truncation)?),
            Some(Subsystem::Qubit) => Err(Error::invalid("which", "subsystem is a qubit, not a mode")),
            None => Err(Error::IndexOutOfRange {
                index: which,
                len: self.subsystems.len(),
            }),
        }
    }

    /// Lowering operator `|g><e|` of the qubit at `which`.
    pub fn lowering_on(&self, which: usize) -> Result<OperatorMatrix> {
        match self.subsystems.get(which) {
            Some(Subsystem::Qubit) => self.embed(which, &sigma_minus()),
            Some(Subsystem::Mode { .. }) => Err(Error::invalid("which", "subsystem is a mode, not a qubit")),
            None => Err(Error::IndexOutOfRange {
                index: which,
                len: self.subsystems.len(),
            }),
        }
    }

    /// Indices of the mode subsystems, in order.
    pub fn modes(&self) -> Vec<usize> {
        self.subsystems
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Subsystem::Mode { .. }))
            .map(|(k, _)| k)
            .collect()
    }
}

/// Dense complex square matrix with a Hermitian tag.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    matrix: CMatrix,
    hermitian: bool,
}

/// Relative tolerance used when certifying the Hermitian tag.
pub const HERMITIAN_RTOL: f64 = 1e-12;

impl OperatorMatrix {
    /// Untagged operator. Panics if `matrix` is not square.
    pub fn new(matrix: CMatrix) -> Self {
        assert!(matrix.is_square(), "operator matrices must be square");
        OperatorMatrix {
            matrix,
            hermitian: false,
        }
    }

    /// Operator certified Hermitian to `HERMITIAN_RTOL * max|M|`.
    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        OperatorMatrix::new(matrix).into_hermitian()
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix {
            matrix: CMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix {
            matrix: CMatrix::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = c(*d);
        }
        OperatorMatrix {
            matrix: m,
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    /// Checks the Hermitian property and sets the tag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_RTOL * self.max_abs() {
            return Err(Error::NotHermitian { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Errors unless tagged Hermitian or verifiably Hermitian.
    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            return Ok(());
        }
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_RTOL * self.max_abs() {
            Err(Error::NotHermitian { defect })
        } else {
            Ok(())
        }
    }

    pub fn dagger(&self) -> Self {
        OperatorMatrix {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn kron(&self, other: &OperatorMatrix) -> Self {
        OperatorMatrix {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        OperatorMatrix {
            matrix: &self.matrix * c(factor),
            hermitian: self.hermitian,
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        OperatorMatrix {
            matrix: &self.matrix * factor,
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    /// `self + self^dag`, always Hermitian.
    pub fn plus_dagger(&self) -> Self {
        OperatorMatrix {
            matrix: &self.matrix + self.matrix.adjoint(),
            hermitian: true,
        }
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> CMatrix {
        linalg::commutator(&self.matrix, &other.matrix)
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            matrix: &self.matrix + &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self + &rhs
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            matrix: &self.matrix - &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(&self.matrix * &rhs.matrix)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale(-1.0)
    }
}

/// Lowering matrix of a mode truncated at `truncation` photons.
pub fn annihilation(truncation: usize) -> Result<OperatorMatrix> {
    if truncation == 0 {
        return Err(Error::invalid("truncation", "must be >= 1"));
    }
    let n = truncation + 1;
    let mut m = CMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = c((k as f64).sqrt());
    }
    Ok(OperatorMatrix::new(m))
}

/// `a^dag a` on a mode truncated at `truncation` photons.
pub fn number(truncation: usize) -> Result<OperatorMatrix> {
    if truncation == 0 {
        return Err(Error::invalid("truncation", "must be >= 1"));
    }
    let diag: Vec<f64> = (0..=truncation).map(|k| k as f64).collect();
    Ok(OperatorMatrix::from_real_diagonal(&diag))
}

/// `|g><e|`.
pub fn sigma_minus() -> OperatorMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = c(1.0);
    OperatorMatrix::new(m)
}

/// `|e><g|`.
pub fn sigma_plus() -> OperatorMatrix {
    sigma_minus().dagger()
}

/// `diag(-1, +1)` in the `(|g>, |e>)` order.
pub fn sigma_z() -> OperatorMatrix {
    OperatorMatrix::from_real_diagonal(&[-1.0, 1.0])
}

pub fn sigma_x() -> OperatorMatrix {
    sigma_minus().plus_dagger()
}

pub fn sigma_y() -> OperatorMatrix {
    let mut m = CMatrix::zeros(2, 2);
    // sigma_y = i(sigma - sigma^dag) in this ordering
    m[(0, 1)] = linalg::I;
    m[(1, 0)] = -linalg::I;
    OperatorMatrix {
        matrix: m,
        hermitian: true,
    }
}

/// `sigma^dag sigma = |e><e|`.
pub fn excited_projector() -> OperatorMatrix {
    OperatorMatrix::from_real_diagonal(&[0.0, 1.0])
}

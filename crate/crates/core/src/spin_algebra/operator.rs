use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{HilbertSpace, SparseMatrix, StateVector};
use crate::error::{Error, Result};

/// Relative tolerance for the Hermitian flag: `max|A - A^dagger| <= tol * max|A|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Linear operator on a chain's Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: SparseMatrix,
    hermitian: bool,
}

impl Operator {
    /// Wraps a matrix, measuring Hermiticity numerically.
    pub fn new(space: HilbertSpace, matrix: SparseMatrix) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                found: matrix.dim(),
            });
        }
        let hermitian = matrix.hermiticity_defect() <= HERMITIAN_TOL * matrix.max_abs();
        Ok(Operator {
            space,
            matrix,
            hermitian,
        })
    }

    pub(crate) fn from_parts(space: HilbertSpace, matrix: SparseMatrix, hermitian: bool) -> Self {
        debug_assert_eq!(space.dim(), matrix.dim());
        Operator {
            space,
            matrix,
            hermitian,
        }
    }

    pub fn from_dense(space: HilbertSpace, m: &DMatrix<C64>) -> Result<Self> {
        Self::new(space, SparseMatrix::from_dense(m, 0.0))
    }

    pub fn zero(space: HilbertSpace) -> Self {
        Self::from_parts(space, SparseMatrix::zeros(space.dim()), true)
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self::from_parts(space, SparseMatrix::identity(space.dim()), true)
    }

    /// Diagonal operator; Hermitian when every entry is real.
    pub fn diagonal(space: HilbertSpace, diag: &[f64]) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                found: diag.len(),
            });
        }
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Ok(Self::from_parts(space, SparseMatrix::from_diagonal(&d), true))
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn apply(&self, psi: &StateVector) -> Result<Vec<C64>> {
        self.space.check_same(&psi.space())?;
        Ok(self.matrix.matvec(psi.amplitudes()))
    }

    pub fn scale(&self, factor: C64) -> Operator {
        let hermitian = self.hermitian && factor.im == 0.0;
        Self::from_parts(self.space, self.matrix.scale(factor), hermitian)
    }

    pub fn scale_real(&self, factor: f64) -> Operator {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        op_combine(&[(C64::new(1.0, 0.0), self), (C64::new(1.0, 0.0), other)])
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        op_combine(&[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)])
    }

    /// Matrix product `self * other`; the Hermitian flag is measured.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.space.check_same(&other.space)?;
        Operator::new(self.space, self.matrix.matmul(&other.matrix))
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_parts(self.space, self.matrix.adjoint(), self.hermitian)
    }

    /// Fails with a contract error unless the Hermitian flag is set.
    pub fn require_hermitian(&self, what: &str) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::contract(format!("{what} must be Hermitian")))
        }
    }
}

/// Linear combination `sum_k c_k O_k`.
///
/// The result is flagged Hermitian exactly when every coefficient is real
/// and every term is Hermitian.
pub fn op_combine(terms: &[(C64, &Operator)]) -> Result<Operator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::param("op_combine needs at least one term"))?;
    let space = first.1.space;
    for (_, op) in terms {
        space.check_same(&op.space)?;
    }
    let hermitian = terms.iter().all(|(c, op)| c.im == 0.0 && op.hermitian);
    let matrix = SparseMatrix::linear_combination(space.dim(), terms.iter().map(|(c, op)| (*c, &op.matrix)));
    Ok(Operator::from_parts(space, matrix, hermitian))
}

/// Real-coefficient convenience wrapper around [`op_combine`].
pub fn op_combine_real(terms: &[(f64, &Operator)]) -> Result<Operator> {
    let complex: Vec<(C64, &Operator)> = terms.iter().map(|&(c, op)| (C64::new(c, 0.0), op)).collect();
    op_combine(&complex)
}

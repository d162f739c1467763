//! Dense linear algebra on small operators: Hermitian eigendecomposition
//! and exponentials built from it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spin_algebra::Operator;

/// Eigendecomposition `H = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn of_operator(op: &Operator) -> Result<Self> {
        op.require_hermitian("operator to diagonalize")?;
        Self::of_matrix(op.to_dense())
    }

    pub fn of_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::numeric("non-finite entry in matrix to diagonalize"));
        }
        let eig = m.symmetric_eigen();
        Ok(HermitianEigen {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V f(diag) V^dagger` for a scalar function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|v| *v *= w);
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(i * factor * H)`.
    pub fn exp_i(&self, factor: f64) -> DMatrix<C64> {
        self.map(|lam| C64::from_polar(1.0, factor * lam))
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.map(|lam| C64::new(lam, 0.0))
    }

    /// Eigenvector `k` as a plain amplitude vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// Coefficients `V^dagger psi`.
    pub fn project(&self, psi: &[C64]) -> DVector<C64> {
        self.vectors.ad_mul(&DVector::from_column_slice(psi))
    }

    /// `V (phases .* coeffs)` with `phases_k = exp(-i t lambda_k)`.
    pub fn evolve_coefficients(&self, coeffs: &DVector<C64>, t: f64) -> Vec<C64> {
        let rotated = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.values)
                .map(|(c, &lam)| c * C64::from_polar(1.0, -t * lam)),
        );
        (&self.vectors * rotated).iter().copied().collect()
    }
}

/// Largest entry magnitude of a dense matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `exp(i * factor * H)` for a Hermitian operator.
pub fn exp_i_hermitian(op: &Operator, factor: f64) -> Result<DMatrix<C64>> {
    Ok(HermitianEigen::of_operator(op)?.exp_i(factor))
}

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::matrix::{CMatrix, C64};

/// A Hermitian operator on the ambient space.
///
/// Construction checks the Hermiticity defect against `sym_tol` and then
/// replaces the matrix by its Hermitian part, so downstream code sees an
/// exactly self-adjoint array. The defect measured on input is kept for
/// auditing.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    hermiticity_defect: f64,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tol.sym_tol {
            return Err(Error::NotHermitian {
                defect,
                tol: tol.sym_tol,
            });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Takes the Hermitian part without checking the defect. Meant for
    /// products such as `uρu*` that are Hermitian up to rounding.
    pub fn symmetrized(matrix: CMatrix) -> Self {
        let hermiticity_defect = matrix.hermiticity_defect();
        Self {
            matrix: matrix.hermitian_part(),
            hermiticity_defect,
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            matrix: CMatrix::from_real_diag(diag),
            hermiticity_defect: 0.0,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim),
            hermiticity_defect: 0.0,
        }
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Defect of the matrix handed to the constructor.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `u A u*`.
    pub fn conjugate(&self, u: &CMatrix) -> HermitianOperator {
        Self::symmetrized(&(u * &self.matrix) * &u.adjoint())
    }

    pub fn difference(&self, other: &HermitianOperator) -> HermitianOperator {
        Self::symmetrized(&self.matrix - &other.matrix)
    }

    pub fn scaled(&self, s: f64) -> HermitianOperator {
        Self::symmetrized(self.matrix.scale(C64::new(s, 0.0)))
    }
}

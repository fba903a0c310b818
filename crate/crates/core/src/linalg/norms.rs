//! Schatten norms and the operator absolute value.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::Result;

use super::eigh::{eigh, jacobi};
use super::hermitian::HermitianOperator;
use super::matrix::CMatrix;

/// Trace norm `Σ|λ|`, Hilbert–Schmidt norm `(Σλ²)^½` and operator norm
/// `max|λ|` of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchattenNorms {
    pub trace_norm: f64,
    pub hs_norm: f64,
    pub op_norm: f64,
}

impl SchattenNorms {
    pub fn from_eigenvalues(values: &[f64]) -> Self {
        Self {
            trace_norm: values.iter().map(|l| l.abs()).sum(),
            hs_norm: values.iter().map(|l| l * l).sum::<f64>().sqrt(),
            op_norm: values.iter().fold(0.0, |m, l| m.max(l.abs())),
        }
    }

    /// `op ≤ hs ≤ trace` up to `slack`.
    pub fn ordered(&self, slack: f64) -> bool {
        self.op_norm <= self.hs_norm + slack && self.hs_norm <= self.trace_norm + slack
    }
}

pub fn schatten_norms(a: &HermitianOperator, tol: &Tolerances) -> Result<SchattenNorms> {
    Ok(SchattenNorms::from_eigenvalues(&eigh(a, tol)?.values))
}

/// `|A| = Σ|λ_k| |x_k⟩⟨x_k|`.
pub fn op_abs(a: &HermitianOperator, tol: &Tolerances) -> Result<HermitianOperator> {
    let e = eigh(a, tol)?;
    Ok(HermitianOperator::symmetrized(e.map_values(f64::abs)))
}

/// Operator norm of an arbitrary square matrix, `λ_max(M*M)^½`.
pub fn operator_norm(m: &CMatrix, tol: &Tolerances) -> Result<f64> {
    let gram = &m.adjoint() * m;
    let e = jacobi(&gram, tol.max_sweeps)?;
    Ok(e.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

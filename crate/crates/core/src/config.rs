//! Numerical tolerances.
//!
//! Every threshold that turns an exact statement into a floating-point
//! decision lives in [`Tolerances`]. Operations take the record by reference
//! so a run can be audited against one set of numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the environment variable that may point at a JSON file overriding
/// any subset of the defaults.
pub const TOL_FILE_ENV: &str = "ORBITKIT_TOL_FILE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Maximum entrywise Hermiticity defect accepted on input.
    pub sym_tol: f64,
    /// Idempotence / self-adjointness slack for orthogonal projections.
    pub proj_tol: f64,
    /// Squared-sine threshold below which two directions count as shared
    /// by a meet (equivalently: `EFE` eigenvalue within `meet_tol` of one).
    pub meet_tol: f64,
    /// Orthonormality slack for computed bases.
    pub ortho_tol: f64,
    /// Reconstruction slack `‖Σ λ P − A‖`.
    pub recon_tol: f64,
    /// Gap used for single-linkage clustering of eigenvalues.
    pub cluster_tol: f64,
    /// Agreement required between an interpolation projector and the
    /// eigenvector projector.
    pub lagrange_tol: f64,
    /// Smallest admissible eigenvalue of `EFE` on the range of `E`.
    pub ker_tol: f64,
    /// Cyclic Jacobi sweep budget.
    pub max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym_tol: 1e-12,
            proj_tol: 1e-9,
            meet_tol: 1e-7,
            ortho_tol: 1e-10,
            recon_tol: 1e-9,
            cluster_tol: 1e-8,
            lagrange_tol: 1e-8,
            ker_tol: 1e-10,
            max_sweeps: 64,
        }
    }
}

impl Tolerances {
    /// Reads a (possibly partial) tolerance record from a JSON file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let tol: Tolerances = serde_json::from_str(&text).map_err(|e| {
            Error::Format(format!(
                "{}: line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        tol.validate()?;
        Ok(tol)
    }

    /// Defaults, overridden by the file named in `ORBITKIT_TOL_FILE` if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TOL_FILE_ENV) {
            Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("sym_tol", self.sym_tol),
            ("proj_tol", self.proj_tol),
            ("meet_tol", self.meet_tol),
            ("ortho_tol", self.ortho_tol),
            ("recon_tol", self.recon_tol),
            ("cluster_tol", self.cluster_tol),
            ("lagrange_tol", self.lagrange_tol),
            ("ker_tol", self.ker_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidArgument("max_sweeps must be positive".into()));
        }
        Ok(())
    }
}

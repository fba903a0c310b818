//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation acts on one coordinate pair `(p, q)`. Writing
//! `a_pq = |a_pq| e^{iφ}`, the phase is first moved onto the `q` axis so the
//! pivot becomes real, a real Jacobi rotation annihilates it, and the phase
//! is moved back. The combined rotation is
//!
//! ```text
//! J = | c          s e^{iφ} |
//!     | -s e^{-iφ}  c       |
//! ```
//!
//! with `t = tan ϑ` the smaller root of `t² + 2tθ − 1 = 0`,
//! `θ = (a_qq − a_pp) / (2|a_pq|)`.

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::hermitian::HermitianOperator;
use super::matrix::{CMatrix, CVector, C64};
use super::vector;

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
///
/// Eigenvectors are phase-fixed (first non-negligible component real
/// positive); eigenvectors of tied eigenvalues are listed in descending
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl Eigh {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, &CVector)> {
        self.values.iter().copied().zip(&self.vectors)
    }

    /// `Σ f(λ_k) |x_k⟩⟨x_k|`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let dim = self.len();
        let scaled: Vec<CVector> = self
            .pairs()
            .map(|(l, x)| vector::scale(x, C64::new(f(l), 0.0)))
            .collect();
        CMatrix::sum_of_outer(dim, &scaled, &self.vectors)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_values(|l| l)
    }
}

/// Eigendecomposition of a validated Hermitian operator.
pub fn eigh(a: &HermitianOperator, tol: &Tolerances) -> Result<Eigh> {
    jacobi(a.matrix(), tol.max_sweeps)
}

/// Jacobi on the Hermitian part of `m`.
pub(crate) fn jacobi(m: &CMatrix, max_sweeps: usize) -> Result<Eigh> {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    // Entries below `floor` are rounding noise: zeroing them is a backward
    // error of the same size and stops degenerate pairs from being rotated
    // back and forth forever.
    let target = f64::EPSILON * scale;
    let floor = target / (2 * n.max(1)) as f64;

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweep == max_sweeps {
            return Err(Error::NonConvergence {
                sweeps: max_sweeps,
                off_norm: off,
            });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, floor);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let mut values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors: Vec<CVector> = order
        .iter()
        .map(|&i| {
            let mut x = v.column(i);
            vector::fix_phase(&mut x);
            x
        })
        .collect();

    // Tie groups are re-ordered by the eigenvectors.
    let tie = 64.0 * f64::EPSILON * values.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= tie {
            end += 1;
        }
        if end - start > 1 {
            let mut group: Vec<(f64, CVector)> = values[start..end]
                .iter()
                .copied()
                .zip(vectors[start..end].iter().cloned())
                .collect();
            group.sort_by(|x, y| vector::lexicographic_desc(&x.1, &y.1));
            for (k, (l, x)) in group.into_iter().enumerate() {
                values[start + k] = l;
                vectors[start + k] = x;
            }
        }
        start = end;
    }
    Ok(Eigh { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[(i, j)].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, floor: f64) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= floor.max(f64::MIN_POSITIVE) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let sp = phase * s;
    let spc = phase.conj() * s;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - spc * akq;
        a[(k, q)] = sp * akp + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - sp * aqk;
        a[(q, k)] = spc * apk + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - spc * vkq;
        v[(k, q)] = sp * vkp + vkq * c;
    }
}

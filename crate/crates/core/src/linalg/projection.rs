//! Orthogonal projections and the two lattice operations on them.
//!
//! Both lattice operations read principal angles off compressions: for an
//! orthonormal basis `B` of `range(E)`, the eigenvalues of `B*(I−F)B` are the
//! squared sines of the angles between `range(E)` and `range(F)`. A direction
//! is shared when its squared sine is at most `meet_tol`, which is the same
//! as an `EFE` eigenvalue lying within `meet_tol` of one, computed without
//! the cancellation in `1 − cos²`.

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::eigh::jacobi;
use super::matrix::{CMatrix, CVector, C64};
use super::vector;

#[derive(Clone, Debug, PartialEq)]
pub struct OrthProjection {
    matrix: CMatrix,
    rank: usize,
}

impl OrthProjection {
    /// Validates idempotence, self-adjointness and integrality of the trace
    /// against `proj_tol`.
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        let d = matrix.dim();
        let idem = (&matrix * &matrix).distance(&matrix);
        if idem > tol.proj_tol {
            return Err(Error::NotProjection(format!(
                "‖P² − P‖ = {idem:e} exceeds {:e}",
                tol.proj_tol
            )));
        }
        let sa = matrix.distance(&matrix.adjoint());
        if sa > tol.proj_tol {
            return Err(Error::NotProjection(format!(
                "‖P − P*‖ = {sa:e} exceeds {:e}",
                tol.proj_tol
            )));
        }
        let tr = matrix.trace().re;
        let rank = tr.round().max(0.0) as usize;
        if (tr - rank as f64).abs() > tol.proj_tol * d as f64 {
            return Err(Error::NotProjection(format!("trace {tr} is not an integer")));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            rank,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim),
            rank: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
            rank: dim,
        }
    }

    /// Projection onto the span of the given standard basis vectors.
    pub fn coordinate(dim: usize, indices: &[usize]) -> Self {
        let mut diag = vec![0.0; dim];
        for &i in indices {
            diag[i] = 1.0;
        }
        let rank = diag.iter().filter(|&&x| x == 1.0).count();
        Self {
            matrix: CMatrix::from_real_diag(&diag),
            rank,
        }
    }

    /// `Σ |x⟩⟨x|` for an orthonormal list; the caller vouches for
    /// orthonormality.
    pub fn from_orthonormal(dim: usize, vectors: &[CVector]) -> Self {
        Self {
            matrix: CMatrix::sum_of_outer(dim, vectors, vectors).hermitian_part(),
            rank: vectors.len(),
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
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `I − P`.
    pub fn complement(&self) -> OrthProjection {
        Self {
            matrix: (&CMatrix::identity(self.dim()) - &self.matrix).hermitian_part(),
            rank: self.dim() - self.rank,
        }
    }

    /// Orthonormal basis of the range, taken from the leading eigenvectors.
    pub fn range_basis(&self, tol: &Tolerances) -> Result<Vec<CVector>> {
        if self.rank == 0 {
            return Ok(Vec::new());
        }
        let e = jacobi(&self.matrix, tol.max_sweeps)?;
        Ok(e.vectors.into_iter().take(self.rank).collect())
    }

    /// `Tr(PQ)`.
    pub fn overlap(&self, other: &OrthProjection) -> f64 {
        assert_eq!(self.dim(), other.dim());
        // Tr(PQ) = Σ_ij P_ij Q_ji = Σ_ij P_ij conj(Q_ij) for Hermitian Q.
        self.matrix
            .as_slice()
            .iter()
            .zip(other.matrix.as_slice())
            .map(|(p, q)| (p * q.conj()).re)
            .sum()
    }

    /// `Tr[(P − Q)²] = ‖P − Q‖₂²`.
    pub fn hs_distance_sq(&self, other: &OrthProjection) -> f64 {
        self.matrix
            .as_slice()
            .iter()
            .zip(other.matrix.as_slice())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    fn check_same_dim(&self, other: &OrthProjection) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }
}

/// Directions of `range(P)` (given by `basis`) at squared sine at most
/// `meet_tol` from `range(target)`.
pub(crate) fn shared_directions(
    basis: &[CVector],
    target: &OrthProjection,
    tol: &Tolerances,
) -> Result<Vec<CVector>> {
    let Some(comp) = target.complement().matrix().compress(basis) else {
        return Ok(Vec::new());
    };
    let e = jacobi(&comp, tol.max_sweeps)?;
    let mut shared = Vec::new();
    for (sin_sq, y) in e.pairs() {
        if sin_sq <= tol.meet_tol {
            shared.push(vector::combine(basis, y));
        } else if sin_sq < 10.0 * tol.meet_tol {
            return Err(Error::ToleranceAmbiguity(format!(
                "principal angle with sin² = {sin_sq:e} is within a decade of meet_tol = {:e}",
                tol.meet_tol
            )));
        }
    }
    Ok(shared)
}

/// `E ∧ F`: projection onto the intersection of the ranges.
pub fn meet(e: &OrthProjection, f: &OrthProjection, tol: &Tolerances) -> Result<OrthProjection> {
    e.check_same_dim(f)?;
    let d = e.dim();
    if e.rank() == 0 || f.rank() == 0 {
        return Ok(OrthProjection::zero(d));
    }
    let from_e = shared_directions(&e.range_basis(tol)?, f, tol)?;
    let from_f = shared_directions(&f.range_basis(tol)?, e, tol)?;
    if from_e.len() != from_f.len() {
        return Err(Error::ToleranceAmbiguity(format!(
            "meet rank differs by side: {} from E, {} from F",
            from_e.len(),
            from_f.len()
        )));
    }
    let q = OrthProjection::from_orthonormal(d, &from_e);
    let qm = q.matrix();
    let within_e = (qm * e.matrix()).distance(qm);
    let idem = (qm * qm).distance(qm);
    let within_f = (qm * f.matrix()).distance(qm);
    let f_slack = tol.proj_tol + (tol.meet_tol * q.rank() as f64).sqrt();
    if within_e > tol.proj_tol || idem > tol.proj_tol || within_f > f_slack {
        return Err(Error::ToleranceAmbiguity(format!(
            "meet failed verification: ‖QE−Q‖={within_e:e}, ‖Q²−Q‖={idem:e}, ‖QF−Q‖={within_f:e}"
        )));
    }
    Ok(q)
}

/// `E ∨ F`: projection onto `range(E) + range(F)`.
///
/// Adds to `E` the directions of `(I−E)·range(F)` whose squared sine against
/// `range(E)` exceeds `meet_tol`.
pub fn join(e: &OrthProjection, f: &OrthProjection, tol: &Tolerances) -> Result<OrthProjection> {
    e.check_same_dim(f)?;
    let d = e.dim();
    if f.rank() == 0 {
        return Ok(e.clone());
    }
    if e.rank() == 0 {
        return Ok(f.clone());
    }
    let outside = e.complement().range_basis(tol)?;
    let Some(comp) = f.matrix().compress(&outside) else {
        return Ok(e.clone());
    };
    let eig = jacobi(&comp, tol.max_sweeps)?;
    let mut extra = Vec::new();
    for (sin_sq, y) in eig.pairs() {
        if sin_sq > tol.meet_tol {
            if sin_sq < 10.0 * tol.meet_tol {
                return Err(Error::ToleranceAmbiguity(format!(
                    "range of E+F has a direction with weight {sin_sq:e} within a decade of meet_tol = {:e}",
                    tol.meet_tol
                )));
            }
            extra.push(vector::combine(&outside, y));
        }
    }
    let m = e.matrix() + &CMatrix::sum_of_outer(d, &extra, &extra);
    let j = OrthProjection::new(m, tol)?;
    debug_assert_eq!(j.rank(), e.rank() + extra.len());
    Ok(j)
}

/// `P − Q` for `Q ≤ P`, validated as a projection.
pub fn difference(
    p: &OrthProjection,
    q: &OrthProjection,
    tol: &Tolerances,
) -> Result<OrthProjection> {
    p.check_same_dim(q)?;
    let r = OrthProjection::new(p.matrix() - q.matrix(), tol)?;
    if r.rank() + q.rank() != p.rank() {
        return Err(Error::RankMismatch(p.rank(), r.rank() + q.rank()));
    }
    Ok(r)
}

/// Rank-one projection `|x⟩⟨x|` onto a nonzero vector.
pub fn rank_one(x: &[C64]) -> Result<OrthProjection> {
    let u = vector::normalized(x)
        .ok_or_else(|| Error::InvalidArgument("zero vector has no projection".into()))?;
    Ok(OrthProjection::from_orthonormal(x.len(), &[u]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn validation_rejects_non_idempotent() {
        let m = CMatrix::from_real_diag(&[1.0, 0.999]);
        assert!(matches!(OrthProjection::new(m, &tol()), Err(Error::NotProjection(_))));
    }

    #[test]
    fn meet_with_itself_is_itself() {
        let s = 0.5f64.sqrt();
        let e = rank_one(&[c(s), C64::new(0.0, s), c(0.0)]).unwrap();
        let q = meet(&e, &e, &tol()).unwrap();
        assert_eq!(q.rank(), 1);
        assert!(q.matrix().distance(e.matrix()) < 1e-14);
    }

    #[test]
    fn meet_of_half_overlap_rank_one_pair_is_zero() {
        // Tr(EF) = 1/2: the single EFE eigenvalue is 1/2, far from 1.
        let s = 0.5f64.sqrt();
        let e = rank_one(&[c(1.0), c(0.0), c(0.0)]).unwrap();
        let f = rank_one(&[c(s), c(s), c(0.0)]).unwrap();
        assert!((e.overlap(&f) - 0.5).abs() < 1e-15);
        assert_eq!(meet(&e, &f, &tol()).unwrap().rank(), 0);
    }

    #[test]
    fn commuting_diagonals_meet_and_join() {
        let e = OrthProjection::coordinate(4, &[0, 1]);
        let f = OrthProjection::coordinate(4, &[0, 2]);
        let q = meet(&e, &f, &tol()).unwrap();
        assert!(q.matrix().distance(&CMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0])) < 1e-14);
        let j = join(&e, &f, &tol()).unwrap();
        assert!(j.matrix().distance(&CMatrix::from_real_diag(&[1.0, 1.0, 1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn join_examples() {
        let e = OrthProjection::coordinate(3, &[0]);
        assert!(join(&e, &e, &tol()).unwrap().matrix().distance(e.matrix()) < 1e-14);

        let f = OrthProjection::coordinate(3, &[1]);
        let j = join(&e, &f, &tol()).unwrap();
        assert!(j.matrix().distance(&CMatrix::from_real_diag(&[1.0, 1.0, 0.0])) < 1e-14);

        // Gram–Schmidt on x = e₀ and y = (e₀ + e₁)/√2 spans {e₀, e₁}.
        let s = 0.5f64.sqrt();
        let g = rank_one(&[c(s), c(s), c(0.0)]).unwrap();
        let j = join(&e, &g, &tol()).unwrap();
        assert_eq!(j.rank(), 2);
        assert!(j.matrix().distance(&CMatrix::from_real_diag(&[1.0, 1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn near_shared_direction_inside_ambiguity_band_is_reported() {
        // sin²θ = 5e-7 sits between meet_tol and 10·meet_tol.
        let theta = (5e-7f64).sqrt().asin();
        let e = rank_one(&[c(1.0), c(0.0)]).unwrap();
        let f = rank_one(&[c(theta.cos()), c(theta.sin())]).unwrap();
        assert!(matches!(meet(&e, &f, &tol()), Err(Error::ToleranceAmbiguity(_))));
        assert!(matches!(join(&e, &f, &tol()), Err(Error::ToleranceAmbiguity(_))));
    }

    #[test]
    fn zero_projections_are_legal() {
        let z = OrthProjection::zero(3);
        let e = OrthProjection::coordinate(3, &[1]);
        assert_eq!(meet(&z, &e, &tol()).unwrap().rank(), 0);
        assert_eq!(join(&z, &e, &tol()).unwrap(), e);
        assert_eq!(join(&z, &z, &tol()).unwrap().rank(), 0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = OrthProjection::zero(2);
        let b = OrthProjection::zero(3);
        assert_eq!(meet(&a, &b, &tol()), Err(Error::DimensionMismatch(2, 3)));
    }
}

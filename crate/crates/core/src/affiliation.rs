//! Affiliated orthonormal bases for a pair of projections.
//!
//! Given projections `E`, `F` of equal rank with trivial meet, the
//! eigenvectors `e_j` of `EFE` on `range(E)` give `f_j = Fe_j/‖Fe_j‖`, and the
//! two systems are biorthogonal: `⟨f_j|e_k⟩ = δ_jk ‖Fe_j‖`. Each `f_j` lives
//! in the plane of `e_j` and a unit vector `e_j^⊥ ⊥ range(E)`:
//!
//! ```text
//! f_j = α_j e_j + β_j e_j^⊥,   α_j = ⟨e_j|f_j⟩ > 0,   β_j = ‖(I−E) f_j‖ > 0.
//! ```
//!
//! These are the principal vectors of the pair; `α_j` are the cosines of
//! the principal angles.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{difference, join, meet, shared_directions, vector, CMatrix, CVector, OrthProjection};

/// Decomposition of a pair `(E, F)` into the common part `Q = E∧F`, the
/// remainders `E′ = E − Q`, `F′ = F − Q`, and the complements of `E′` and `F′`
/// inside `E′∨F′`.
#[derive(Clone, Debug)]
pub struct ProjectionPairSplit {
    pub meet: OrthProjection,
    pub e_prime: OrthProjection,
    pub f_prime: OrthProjection,
    pub e_perp: OrthProjection,
    pub f_perp: OrthProjection,
}

impl ProjectionPairSplit {
    /// `N′ = rank(E′)`.
    pub fn reduced_rank(&self) -> usize {
        self.e_prime.rank()
    }
}

/// Splits off the meet of `E` and `F`.
///
/// `Q` is taken from the `E` side; `F′` subtracts the matching directions
/// found from the `F` side, so that `F′` is a projection to working
/// precision even when shared directions are only shared up to `meet_tol`.
pub fn split(e: &OrthProjection, f: &OrthProjection, tol: &Tolerances) -> Result<ProjectionPairSplit> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(e.dim(), f.dim()));
    }
    if e.rank() != f.rank() {
        return Err(Error::RankMismatch(e.rank(), f.rank()));
    }
    let d = e.dim();
    let q = meet(e, f, tol)?;
    let q_f = if f.rank() == 0 {
        OrthProjection::zero(d)
    } else {
        OrthProjection::from_orthonormal(d, &shared_directions(&f.range_basis(tol)?, e, tol)?)
    };
    if q_f.rank() != q.rank() {
        return Err(Error::ToleranceAmbiguity(format!(
            "meet has rank {} seen from E but {} seen from F",
            q.rank(),
            q_f.rank()
        )));
    }
    let e_prime = difference(e, &q, tol)?;
    let f_prime = difference(f, &q_f, tol)?;
    let hull = join(&e_prime, &f_prime, tol)?;
    let e_perp = difference(&hull, &e_prime, tol)?;
    let f_perp = difference(&hull, &f_prime, tol)?;
    Ok(ProjectionPairSplit {
        meet: q,
        e_prime,
        f_prime,
        e_perp,
        f_perp,
    })
}

/// Paired systems `{e_j}`, `{f_j}`, `{e_j^⊥}` with real positive
/// coefficients `f_j = α_j e_j + β_j e_j^⊥`.
#[derive(Clone, Debug, Serialize)]
pub struct AffiliatedBases {
    pub e: Vec<CVector>,
    pub f: Vec<CVector>,
    pub e_perp: Vec<CVector>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `⟨f_j|e_j⟩`, equal to `α_j`.
    pub overlaps: Vec<f64>,
    /// Eigenvalues of `EFE` on `range(E)`, descending.
    pub efe_eigenvalues: Vec<f64>,
}

impl AffiliatedBases {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// `Σ_j |f_j⟩⟨f_j|`.
    pub fn f_projection(&self, dim: usize) -> CMatrix {
        CMatrix::sum_of_outer(dim, &self.f, &self.f)
    }

    /// Largest `|⟨f_j|e_k⟩ − δ_jk α_j|`.
    pub fn cross_orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, fj) in self.f.iter().enumerate() {
            for (k, ek) in self.e.iter().enumerate() {
                let target = if j == k { self.overlaps[j] } else { 0.0 };
                worst = worst.max((vector::inner(fj, ek) - target).norm());
            }
        }
        worst
    }

    /// Largest `‖f_j − α_j e_j − β_j e_j^⊥‖`.
    pub fn reconstruction_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.len() {
            let r: f64 = self.f[j]
                .iter()
                .zip(&self.e[j])
                .zip(&self.e_perp[j])
                .map(|((f, e), p)| (f - e * self.alpha[j] - p * self.beta[j]).norm_sqr())
                .sum();
            worst = worst.max(r.sqrt());
        }
        worst
    }
}

/// Eigenvalues of a compression closer than this are treated as one
/// eigenvalue for ordering.
const ORDER_GAP: f64 = 1e-9;

/// Affiliated bases of `(E, F)`; expects `E∧F = 0` (apply [`split`] first).
///
/// Fails with [`Error::KernelHit`] if `Fe = 0` for some unit `e` in
/// `range(E)` up to `ker_tol`, and with [`Error::NonTrivialMeet`] if some
/// direction of `range(E)` lies in `range(F)` up to `meet_tol`.
pub fn affiliate(e: &OrthProjection, f: &OrthProjection, tol: &Tolerances) -> Result<AffiliatedBases> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(e.dim(), f.dim()));
    }
    if e.rank() != f.rank() {
        return Err(Error::RankMismatch(e.rank(), f.rank()));
    }
    let basis = e.range_basis(tol)?;
    let pairs = block_pairs(&basis, f.matrix(), tol)?;
    if let Some(&top) = pairs.eigenvalues.first() {
        if top >= 1.0 - tol.meet_tol {
            let rank = pairs.eigenvalues.iter().filter(|&&m| m >= 1.0 - tol.meet_tol).count();
            return Err(Error::NonTrivialMeet { rank });
        }
    }

    let outside = e.complement();
    let mut perp = Vec::with_capacity(pairs.f.len());
    for fj in &pairs.f {
        let p = outside.matrix().apply(fj);
        let p = outside.matrix().apply(&p);
        perp.push(vector::normalized(&p).ok_or(Error::NonTrivialMeet { rank: 1 })?);
    }
    let e_perp = symmetric_orthonormalize(&perp, tol)?;
    let mut out = AffiliatedBases {
        e: pairs.e,
        f: pairs.f,
        e_perp,
        alpha: Vec::new(),
        beta: Vec::new(),
        overlaps: Vec::new(),
        efe_eigenvalues: pairs.eigenvalues,
    };
    for ((ej, fj), pj) in out.e.iter().zip(&out.f).zip(&out.e_perp) {
        out.alpha.push(vector::inner(ej, fj).re);
        out.beta.push(vector::inner(pj, fj).re);
        out.overlaps.push(vector::inner(fj, ej).re);
    }
    Ok(out)
}

/// `X (X*X)^{-1/2}`: the orthonormal system closest to `X`.
///
/// `(I−E)f_j` carries a relative error of order `eps/β_j`, so for tiny
/// principal angles the normalised vectors drift from orthonormality; this
/// removes the drift without favouring any vector.
fn symmetric_orthonormalize(xs: &[CVector], tol: &Tolerances) -> Result<Vec<CVector>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let n = xs.len();
    let gram = CMatrix::from_fn(n, |a, b| vector::inner(&xs[a], &xs[b]));
    let eig = crate::linalg::jacobi(&gram, tol.max_sweeps)?;
    if eig.values.last().is_some_and(|&m| m <= tol.ker_tol) {
        return Err(Error::NonTrivialMeet { rank: 1 });
    }
    let inv_sqrt = eig.map_values(|m| 1.0 / m.sqrt());
    Ok((0..n)
        .map(|j| {
            let coeffs: Vec<_> = (0..n).map(|a| inv_sqrt[(a, j)]).collect();
            vector::combine(xs, &coeffs)
        })
        .collect())
}

/// `(Tr[(E−F)²], Tr[(E−F)²] < 2)`.
pub fn proximity_check(e: &OrthProjection, f: &OrthProjection) -> Result<(f64, bool)> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(e.dim(), f.dim()));
    }
    let hs_sq = e.hs_distance_sq(f);
    Ok((hs_sq, hs_sq < 2.0))
}

/// Eigenvectors `e_k` of `B*FB` (mapped back through `B`) and their
/// normalised images `f_k = Fe_k/‖Fe_k‖`.
pub(crate) struct BlockPairs {
    pub e: Vec<CVector>,
    pub f: Vec<CVector>,
    pub eigenvalues: Vec<f64>,
}

impl BlockPairs {
    /// `Σ_k |f_k⟩⟨e_k|`, the unitary part of `F·P_B` restricted to `range(B)`.
    pub fn transfer(&self, dim: usize) -> CMatrix {
        CMatrix::sum_of_outer(dim, &self.f, &self.e)
    }
}

pub(crate) fn block_pairs(basis: &[CVector], f: &CMatrix, tol: &Tolerances) -> Result<BlockPairs> {
    let Some(comp) = f.compress(basis) else {
        return Ok(BlockPairs {
            e: Vec::new(),
            f: Vec::new(),
            eigenvalues: Vec::new(),
        });
    };
    let eig = crate::linalg::jacobi(&comp, tol.max_sweeps)?;
    if let Some(&low) = eig.values.last() {
        if low <= tol.ker_tol {
            return Err(Error::KernelHit { eigenvalue: low });
        }
    }
    let mut items: Vec<(f64, CVector, CVector)> = Vec::with_capacity(basis.len());
    for (m, y) in eig.pairs() {
        let mut e = vector::combine(basis, y);
        vector::fix_phase(&mut e);
        let fe = f.apply(&e);
        let fv = vector::normalized(&fe).ok_or(Error::KernelHit { eigenvalue: m })?;
        items.push((m, e, fv));
    }
    // Near-degenerate groups are ordered by the vectors, not by rounding.
    let mut start = 0;
    while start < items.len() {
        let mut end = start + 1;
        while end < items.len() && items[end - 1].0 - items[end].0 < ORDER_GAP {
            end += 1;
        }
        items[start..end].sort_by(|a, b| vector::lexicographic_desc(&a.1, &b.1));
        start = end;
    }
    let mut out = BlockPairs {
        e: Vec::with_capacity(items.len()),
        f: Vec::with_capacity(items.len()),
        eigenvalues: Vec::with_capacity(items.len()),
    };
    for (m, e, f) in items {
        out.eigenvalues.push(m);
        out.e.push(e);
        out.f.push(f);
    }
    Ok(out)
}

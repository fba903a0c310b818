//! Unitary invariants and the geometry of rank-one projections.
//!
//! The moments `a_n = Tr(ρ^{n+2})` are the moments of the finite atomic
//! measure `Σ_j λ_j² m_j δ_{λ_j}`, so they are constant along the unitary
//! orbit of `ρ` and a finite number of them pins the orbit down.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{schatten_norms, vector, CVector, HermitianOperator, OrthProjection, C64};
use crate::sampling::Sampler;
use crate::spectral::{decompose, SpectralDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub value: f64,
    /// `λ² · m`.
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentSignature {
    /// `a_0, …, a_K`, computed from matrix powers.
    pub moments: Vec<f64>,
    /// Atoms of the spectral measure, from the clustered spectrum.
    pub atoms: Vec<Atom>,
    pub order: usize,
}

impl MomentSignature {
    /// `Σ weight · λ^n`.
    pub fn atomic_moment(&self, n: usize) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.value.powi(n as i32)).sum()
    }

    /// Largest `|a_n − Σ weight·λ^n| / (1 + |a_n|)` over `n ≤ K`.
    pub fn duality_defect(&self) -> f64 {
        self.moments
            .iter()
            .enumerate()
            .map(|(n, a)| (a - self.atomic_moment(n)).abs() / (1.0 + a.abs()))
            .fold(0.0, f64::max)
    }
}

/// Default truncation order `2n + 2` for `n` distinct nonzero eigenvalues.
pub fn default_order(blocks: usize) -> usize {
    2 * blocks + 2
}

fn signature_from(rho: &HermitianOperator, decomp: &SpectralDecomposition, order: usize) -> MomentSignature {
    let atoms = decomp
        .eigenvalues()
        .iter()
        .zip(decomp.multiplicities())
        .map(|(&l, &m)| Atom {
            value: l,
            weight: l * l * m as f64,
        })
        .collect();
    let mut power = rho.matrix() * rho.matrix();
    let mut moments = Vec::with_capacity(order + 1);
    for n in 0..=order {
        moments.push(power.trace().re);
        if n < order {
            power = &power * rho.matrix();
        }
    }
    MomentSignature { moments, atoms, order }
}

/// `a_0, …, a_K` and the atoms `(λ_j, λ_j² m_j)`. `order` defaults to
/// `2n + 2` and must be at least `2n − 1`.
pub fn moment_signature(
    rho: &HermitianOperator,
    order: Option<usize>,
    tol: &Tolerances,
) -> Result<MomentSignature> {
    let decomp = decompose(rho, tol)?;
    let n = decomp.block_count();
    let order = order.unwrap_or_else(|| default_order(n));
    if n > 0 && order + 1 < 2 * n {
        return Err(Error::InvalidArgument(format!(
            "order {order} cannot separate {n} atoms; need at least {}",
            2 * n - 1
        )));
    }
    Ok(signature_from(rho, &decomp, order))
}

/// Outcome of comparing two operators by moments and by spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitComparison {
    pub moments_agree: bool,
    pub spectra_agree: bool,
    pub same: bool,
    /// The two certificates disagree.
    pub anomaly: bool,
}

/// Moment test `|a_n(ρ) − a_n(ν)| ≤ rel_tol · (1 + max(|a_n(ρ)|, |a_n(ν)|))`
/// for `n ≤ K`, and clustered spectra equal within `cluster_tol`.
pub fn same_orbit(
    rho: &HermitianOperator,
    nu: &HermitianOperator,
    order: Option<usize>,
    rel_tol: f64,
    tol: &Tolerances,
) -> Result<OrbitComparison> {
    if rho.dim() != nu.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), nu.dim()));
    }
    let da = decompose(rho, tol)?;
    let db = decompose(nu, tol)?;
    if da.block_count() == 0 || db.block_count() == 0 {
        return Err(Error::InvalidArgument("orbit comparison needs nonzero operators".into()));
    }
    let order = order.unwrap_or_else(|| default_order(da.block_count().max(db.block_count())));
    let sa = signature_from(rho, &da, order);
    let sb = signature_from(nu, &db, order);
    let moments_agree = sa
        .moments
        .iter()
        .zip(&sb.moments)
        .all(|(a, b)| (a - b).abs() <= rel_tol * (1.0 + a.abs().max(b.abs())));
    let spectra_agree = da.block_count() == db.block_count()
        && da.multiplicities() == db.multiplicities()
        && da
            .eigenvalues()
            .iter()
            .zip(db.eigenvalues())
            .all(|(a, b)| (a - b).abs() <= tol.cluster_tol);
    Ok(OrbitComparison {
        moments_agree,
        spectra_agree,
        same: moments_agree && spectra_agree,
        anomaly: moments_agree != spectra_agree,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormChain {
    pub trace_norm: f64,
    pub hs_norm: f64,
    pub op_norm: f64,
    /// `‖·‖₂ ≤ ‖·‖₁ ≤ 2N‖·‖_∞ ≤ 2N‖·‖₂` for `A − B`.
    pub chain_ok: bool,
}

/// Norms of `A − B` for operators of rank at most `cap`, with the
/// equivalence chain using the constant `2·cap`.
pub fn norm_chain(
    a: &HermitianOperator,
    b: &HermitianOperator,
    cap: usize,
    tol: &Tolerances,
) -> Result<NormChain> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    for op in [a, b] {
        let rank = decompose(op, tol)?.total_rank();
        if rank > cap {
            return Err(Error::RankExceeded { rank, cap });
        }
    }
    let n = schatten_norms(&a.difference(b), tol)?;
    let c = 2.0 * cap as f64;
    let slack = 1e-12 * (1.0 + n.trace_norm);
    let chain_ok = n.hs_norm <= n.trace_norm + slack
        && n.trace_norm <= c * n.op_norm + slack
        && c * n.op_norm <= c * n.hs_norm + slack;
    Ok(NormChain {
        trace_norm: n.trace_norm,
        hs_norm: n.hs_norm,
        op_norm: n.op_norm,
        chain_ok,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProjectiveDistances {
    /// `√2 · arccos √Tr(PR)`.
    pub geodesic: f64,
    /// `Tr|P − R|`, from the eigenvalues of `P − R`.
    pub trace_dist: f64,
    /// `Tr(PR)`.
    pub overlap: f64,
    /// `|trace_dist − 2√(1 − cos²(geodesic/√2))|`.
    pub relation_defect: f64,
}

fn unit_range_vector(p: &OrthProjection, tol: &Tolerances) -> Result<CVector> {
    if p.rank() != 1 {
        return Err(Error::RankMismatch(p.rank(), 1));
    }
    Ok(p.range_basis(tol)?.remove(0))
}

/// Fubini–Study geodesic distance and trace distance of two rank-one
/// projections.
///
/// The angle is taken from `atan2(‖y − x⟨x|y⟩‖, |⟨x|y⟩|)` for unit range
/// vectors `x`, `y`, which stays accurate near `0` where `arccos` does not.
pub fn projective_distances(
    p: &OrthProjection,
    r: &OrthProjection,
    tol: &Tolerances,
) -> Result<ProjectiveDistances> {
    if p.dim() != r.dim() {
        return Err(Error::DimensionMismatch(p.dim(), r.dim()));
    }
    let x = unit_range_vector(p, tol)?;
    let y = unit_range_vector(r, tol)?;
    let c = vector::inner(&x, &y);
    let s = vector::norm(&vector::sub(&y, &vector::scale(&x, c)));
    let angle = s.atan2(c.norm());
    let geodesic = std::f64::consts::SQRT_2 * angle;
    let diff = HermitianOperator::symmetrized(p.matrix() - r.matrix());
    let trace_dist = schatten_norms(&diff, tol)?.trace_norm;
    let predicted = 2.0 * (geodesic / std::f64::consts::SQRT_2).sin();
    Ok(ProjectiveDistances {
        geodesic,
        trace_dist,
        overlap: p.overlap(r),
        relation_defect: (trace_dist - predicted).abs(),
    })
}

/// Closed-form predictions for a generated pair.
#[derive(Clone, Debug, Serialize)]
pub struct ExampleExpectation {
    /// `{|α_j|²}`, descending.
    pub efe_spectrum: Vec<f64>,
    /// `2(N − Σ|α_j|²)`.
    pub hs_sq: f64,
    /// `max √(1 − |α_j|²)`.
    pub op_norm: f64,
}

#[derive(Clone, Debug)]
pub struct ExamplePair {
    pub e: OrthProjection,
    pub f: OrthProjection,
    pub expected: ExampleExpectation,
}

impl ExamplePair {
    /// The same three quantities measured from the matrices.
    pub fn measured(&self, tol: &Tolerances) -> Result<ExampleExpectation> {
        let basis = self.e.range_basis(tol)?;
        let efe_spectrum = match self.f.matrix().compress(&basis) {
            Some(m) => crate::linalg::jacobi(&m, tol.max_sweeps)?.values,
            None => Vec::new(),
        };
        let diff = HermitianOperator::symmetrized(self.e.matrix() - self.f.matrix());
        Ok(ExampleExpectation {
            efe_spectrum,
            hs_sq: self.e.hs_distance_sq(&self.f),
            op_norm: schatten_norms(&diff, tol)?.op_norm,
        })
    }
}

/// `E` onto `e_0, …, e_{N−1}` and `F` onto `f_j = α_j e_j + β_j e_{N+j}` with
/// `β_j = √(1 − |α_j|²)`.
///
/// With a seed, both projections are conjugated by one seeded random
/// unitary, which leaves every prediction unchanged.
pub fn example_pair_generator(dim: usize, alpha: &[C64], seed: Option<u64>) -> Result<ExamplePair> {
    let n = alpha.len();
    if n == 0 {
        return Err(Error::InvalidArgument("alpha must not be empty".into()));
    }
    if dim < 2 * n {
        return Err(Error::DimensionTooSmall {
            dim,
            required: 2 * n,
        });
    }
    for a in alpha {
        let m = a.norm();
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidArgument(format!("|alpha| must lie in (0, 1), got {m}")));
        }
    }
    let zero = C64::new(0.0, 0.0);
    let es: Vec<CVector> = (0..n)
        .map(|j| {
            let mut v = vec![zero; dim];
            v[j] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    let fs: Vec<CVector> = alpha
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let mut v = vec![zero; dim];
            v[j] = *a;
            v[n + j] = C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0);
            v
        })
        .collect();
    let (es, fs) = match seed {
        Some(s) => {
            let w = Sampler::new(s).unitary(dim);
            let rot = |xs: Vec<CVector>| xs.iter().map(|x| w.apply(x)).collect::<Vec<_>>();
            (rot(es), rot(fs))
        }
        None => (es, fs),
    };
    let mut efe_spectrum: Vec<f64> = alpha.iter().map(|a| a.norm_sqr()).collect();
    efe_spectrum.sort_by(|a, b| b.total_cmp(a));
    let sum: f64 = efe_spectrum.iter().sum();
    let op_norm = alpha
        .iter()
        .map(|a| (1.0 - a.norm_sqr()).sqrt())
        .fold(0.0, f64::max);
    Ok(ExamplePair {
        e: OrthProjection::from_orthonormal(dim, &es),
        f: OrthProjection::from_orthonormal(dim, &fs),
        expected: ExampleExpectation {
            efe_spectrum,
            hs_sq: 2.0 * (n as f64 - sum),
            op_norm,
        },
    })
}

/// `|x⟩⟨x|` padded into a matrix, as a Hermitian operator.
pub fn rank_one_operator(x: &[C64]) -> Result<HermitianOperator> {
    let p = crate::linalg::rank_one(x)?;
    Ok(HermitianOperator::symmetrized(p.into_matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_one;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, SQRT_2};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn real(v: &[f64]) -> CVector {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn moments_of_half_identity() {
        let s = moment_signature(&HermitianOperator::from_real_diag(&[0.5, 0.5]), Some(2), &tol()).unwrap();
        assert_eq!(s.moments, vec![0.5, 0.25, 0.125]);
        assert_eq!(s.atoms, vec![Atom { value: 0.5, weight: 0.5 }]);
    }

    #[test]
    fn moments_of_padded_projector_and_signed_pair() {
        let p = rank_one_operator(&real(&[0.0, 1.0, 0.0])).unwrap();
        let s = moment_signature(&p, None, &tol()).unwrap();
        assert_eq!(s.order, 4);
        assert!(s.moments.iter().all(|&a| a == 1.0));
        assert_eq!(s.atoms, vec![Atom { value: 1.0, weight: 1.0 }]);

        // Two atoms need K ≥ 3; the first three moments are the hand values.
        let s = moment_signature(&HermitianOperator::from_real_diag(&[0.5, -0.5]), Some(3), &tol()).unwrap();
        assert_eq!(s.moments[..3], [0.5, 0.0, 0.125]);
        assert!(s.duality_defect() < 1e-16);
    }

    #[test]
    fn too_few_moments_rejected() {
        let rho = HermitianOperator::from_real_diag(&[1.0, 0.5, 0.25]);
        assert!(moment_signature(&rho, Some(4), &tol()).is_err());
        assert!(moment_signature(&rho, Some(5), &tol()).is_ok());
    }

    #[test]
    fn orbit_examples() {
        let x = real(&[1.0, 0.0, 0.0]);
        let p = rank_one_operator(&x).unwrap();
        let half = p.scaled(0.5);
        let c = same_orbit(&p, &half, None, 1e-10, &tol()).unwrap();
        assert!(!c.same && !c.anomaly);

        let a = HermitianOperator::from_real_diag(&[0.5, 0.5, 0.0]);
        let b = HermitianOperator::from_real_diag(&[0.5, 0.25, 0.25]);
        let c = same_orbit(&a, &b, None, 1e-10, &tol()).unwrap();
        assert!(!c.same && !c.anomaly);

        let u = Sampler::new(5).unitary(3);
        let c = same_orbit(&a, &a.conjugate(&u), None, 1e-10, &tol()).unwrap();
        assert!(c.same && !c.anomaly);
    }

    #[test]
    fn norm_chain_examples() {
        let x = rank_one_operator(&real(&[1.0, 0.0])).unwrap();
        let c = norm_chain(&x, &x, 1, &tol()).unwrap();
        assert_eq!((c.trace_norm, c.hs_norm, c.op_norm), (0.0, 0.0, 0.0));
        assert!(c.chain_ok);

        let y = rank_one_operator(&real(&[0.0, 1.0])).unwrap();
        let c = norm_chain(&x, &y, 1, &tol()).unwrap();
        assert!((c.trace_norm - 2.0).abs() < 1e-15);
        assert!((c.hs_norm - SQRT_2).abs() < 1e-15);
        assert!((c.op_norm - 1.0).abs() < 1e-15);
        assert!(c.chain_ok);

        let z = rank_one_operator(&real(&[FRAC_PI_4.cos(), FRAC_PI_4.sin()])).unwrap();
        let c = norm_chain(&x, &z, 1, &tol()).unwrap();
        assert!((c.trace_norm - SQRT_2).abs() < 1e-15);
        assert!((c.hs_norm - 1.0).abs() < 1e-15);
        assert!((c.op_norm - SQRT_2 / 2.0).abs() < 1e-15);

        let two = HermitianOperator::from_real_diag(&[1.0, 1.0]);
        assert!(matches!(norm_chain(&two, &x, 1, &tol()), Err(Error::RankExceeded { rank: 2, cap: 1 })));
    }

    #[test]
    fn projective_distance_examples() {
        let p = rank_one(&real(&[1.0, 0.0])).unwrap();
        let d = projective_distances(&p, &p, &tol()).unwrap();
        assert_eq!((d.geodesic, d.trace_dist), (0.0, 0.0));

        let r = rank_one(&real(&[SQRT_2 / 2.0, SQRT_2 / 2.0])).unwrap();
        let d = projective_distances(&p, &r, &tol()).unwrap();
        assert!((d.geodesic - SQRT_2 * FRAC_PI_4).abs() < 1e-15);
        assert!((d.trace_dist - SQRT_2).abs() < 1e-15);

        let q = rank_one(&real(&[0.0, 1.0])).unwrap();
        let d = projective_distances(&p, &q, &tol()).unwrap();
        assert!((d.geodesic - SQRT_2 * 2.0 * FRAC_PI_4).abs() < 1e-15);
        assert!((d.trace_dist - 2.0).abs() < 1e-15);

        let two = OrthProjection::identity(2);
        assert!(matches!(projective_distances(&two, &p, &tol()), Err(Error::RankMismatch(2, 1))));
    }

    #[test]
    fn example_pair_closed_forms() {
        let alpha = [C64::new(FRAC_PI_6.cos(), 0.0), C64::new(FRAC_PI_4.cos(), 0.0)];
        let pair = example_pair_generator(4, &alpha, None).unwrap();
        let x = &pair.expected;
        assert!((x.efe_spectrum[0] - 0.75).abs() < 1e-15 && (x.efe_spectrum[1] - 0.5).abs() < 1e-15);
        assert!((x.hs_sq - 1.5).abs() < 1e-15);
        assert!((x.op_norm - SQRT_2 / 2.0).abs() < 1e-15);
        let m = pair.measured(&tol()).unwrap();
        assert!((m.hs_sq - 1.5).abs() < 1e-14);
        assert!((m.op_norm - SQRT_2 / 2.0).abs() < 1e-14);

        let degenerate = example_pair_generator(8, &[C64::new(0.9, 0.0); 3], Some(4)).unwrap();
        let m = degenerate.measured(&tol()).unwrap();
        assert!(m.efe_spectrum.iter().all(|l| (l - 0.81).abs() < 1e-13));
        assert!((m.op_norm - 0.19f64.sqrt()).abs() < 1e-13);

        assert!(matches!(
            example_pair_generator(3, &alpha, None),
            Err(Error::DimensionTooSmall { dim: 3, required: 4 })
        ));
        assert!(example_pair_generator(4, &[C64::new(1.0, 0.0)], None).is_err());
    }
}

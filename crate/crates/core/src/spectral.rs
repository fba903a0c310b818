//! Spectral decompositions of finite-rank Hermitian operators and spectral
//! projections as interpolation polynomials.
//!
//! For a Hermitian `ρ` with distinct eigenvalues `λ_1, …, λ_n` plus the node
//! `λ_0 = 0`, the polynomial
//!
//! ```text
//! p_j(z) = Π_{k≠j} (z − λ_k) / (λ_j − λ_k)
//! ```
//!
//! satisfies `p_j(λ_k) = δ_jk`, hence `p_j(ρ) = E_j`. The projection is
//! therefore a polynomial in `ρ` and depends continuously on `ρ` along any
//! family with fixed spectrum. [`lagrange_projector`] evaluates it in
//! product form; [`decompose`] gets the same projections from eigenvectors.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{eigh, schatten_norms, CMatrix, CVector, HermitianOperator, OrthProjection, C64};

/// Clustered spectral data of a Hermitian operator.
///
/// Block `0` is the kernel (eigenvalue exactly `0` after clustering);
/// blocks `1..=n` carry the distinct nonzero eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
    bases: Vec<Vec<CVector>>,
    projections: Vec<OrthProjection>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.projections[0].dim()
    }

    /// Number `n` of distinct nonzero eigenvalues.
    pub fn block_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `λ_1, …, λ_n`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `N_1, …, N_n`.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// `N = Σ N_j`.
    pub fn total_rank(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Interpolation nodes `λ_0 = 0, λ_1, …, λ_n`.
    pub fn nodes(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.eigenvalues.iter().copied()).collect()
    }

    /// `E_j` for `j ∈ 0..=n`; `E_0 = I − Σ E_j`.
    pub fn projection(&self, j: usize) -> &OrthProjection {
        &self.projections[j]
    }

    pub fn projections(&self) -> &[OrthProjection] {
        &self.projections
    }

    pub fn complement(&self) -> &OrthProjection {
        &self.projections[0]
    }

    /// Orthonormal eigenvectors spanning block `j`.
    pub fn block_basis(&self, j: usize) -> &[CVector] {
        &self.bases[j]
    }

    /// `E = Σ_{j≥1} E_j`, the support projection.
    pub fn support(&self) -> OrthProjection {
        self.projections[0].complement()
    }
}

/// Eigendecomposition followed by single-linkage clustering with gap
/// `cluster_tol`.
///
/// Each cluster is replaced by the mean of its members. Clusters containing
/// an eigenvalue of modulus at most `cluster_tol` are folded into the kernel.
/// Two clusters ending up closer than `10·cluster_tol` (the kernel node `0`
/// included) raise [`Error::ClusterAmbiguity`]. A chained cluster whose
/// members sit further than `cluster_tol` from its mean raises
/// [`Error::ToleranceAmbiguity`].
pub fn decompose(rho: &HermitianOperator, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let ct = tol.cluster_tol;
    let eig = eigh(rho, tol)?;
    let d = rho.dim();

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=d {
        if k == d || eig.values[k - 1] - eig.values[k] > ct {
            clusters.push((start, k));
            start = k;
        }
    }

    struct Cluster {
        lo: f64,
        hi: f64,
        mean: f64,
        members: std::ops::Range<usize>,
        zero: bool,
    }
    let mut merged: Vec<Cluster> = Vec::new();
    for (a, b) in clusters {
        let vals = &eig.values[a..b];
        let zero = vals.iter().any(|l| l.abs() <= ct);
        let c = Cluster {
            hi: vals[0],
            lo: vals[vals.len() - 1],
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
            members: a..b,
            zero,
        };
        match merged.last_mut() {
            Some(prev) if prev.zero && c.zero => {
                prev.lo = c.lo;
                prev.members = prev.members.start..b;
            }
            _ => merged.push(c),
        }
    }
    for c in merged.iter_mut().filter(|c| c.zero) {
        c.mean = 0.0;
    }

    for w in merged.windows(2) {
        let gap = w[0].lo - w[1].hi;
        if gap < 10.0 * ct {
            return Err(Error::ClusterAmbiguity {
                left: w[0].mean,
                right: w[1].mean,
                gap,
            });
        }
    }
    if !merged.iter().any(|c| c.zero) {
        for c in &merged {
            let dist = c.lo.abs().min(c.hi.abs());
            if dist < 10.0 * ct {
                return Err(Error::ClusterAmbiguity {
                    left: c.mean,
                    right: 0.0,
                    gap: dist,
                });
            }
        }
    }

    // Replacing members by the cluster mean moves ρ by exactly the largest
    // member offset in operator norm. Folding near-zero values is allowed to
    // cost up to cluster_tol; single-linkage chains drifting further are not.
    let scale = eig.values.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let limit = (tol.recon_tol * scale).max(ct);
    for c in &merged {
        let spread = eig.values[c.members.clone()]
            .iter()
            .fold(0.0f64, |m, l| m.max((l - c.mean).abs()));
        if spread > limit {
            return Err(Error::ToleranceAmbiguity(format!(
                "cluster at {} spans {spread:e}, beyond both recon_tol and cluster_tol; lower cluster_tol",
                c.mean
            )));
        }
    }

    let mut eigenvalues = Vec::new();
    let mut multiplicities = Vec::new();
    let mut bases = vec![Vec::new()];
    for c in &merged {
        let vecs: Vec<CVector> = eig.vectors[c.members.clone()].to_vec();
        if c.zero {
            bases[0] = vecs;
        } else {
            eigenvalues.push(c.mean);
            multiplicities.push(vecs.len());
            bases.push(vecs);
        }
    }
    let projections = bases
        .iter()
        .map(|b| OrthProjection::from_orthonormal(d, b))
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        multiplicities,
        bases,
        projections,
    })
}

/// `Σ_j λ_j E_j`.
pub fn reconstruct(decomp: &SpectralDecomposition) -> HermitianOperator {
    let d = decomp.dim();
    let mut m = CMatrix::zeros(d);
    for (j, &l) in decomp.eigenvalues().iter().enumerate() {
        m = &m + &decomp.projection(j + 1).matrix().scale_real(l);
    }
    HermitianOperator::symmetrized(m)
}

/// `p_j(ρ)` evaluated as the product `Π_{k≠j} (ρ − λ_k I)/(λ_j − λ_k)` over
/// the nodes of `decomp`.
///
/// Fails with [`Error::ConditioningOverflow`] when
/// `Π_{k≠j} |λ_j − λ_k| < 1e-12 · spread^n`.
pub fn lagrange_projector(
    rho: &HermitianOperator,
    decomp: &SpectralDecomposition,
    j: usize,
    tol: &Tolerances,
) -> Result<OrthProjection> {
    let nodes = decomp.nodes();
    if j >= nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "block index {j} out of range 0..={}",
            nodes.len() - 1
        )));
    }
    if rho.dim() != decomp.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), decomp.dim()));
    }
    let n = nodes.len() - 1;
    let lj = nodes[j];
    let product: f64 = nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &lk)| (lj - lk).abs())
        .product();
    let hi = nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = nodes.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = 1e-12 * (hi - lo).powi(n as i32);
    if n > 0 && product < floor {
        return Err(Error::ConditioningOverflow {
            node: j,
            product,
            floor,
        });
    }

    let mut p = CMatrix::identity(rho.dim());
    for (k, &lk) in nodes.iter().enumerate() {
        if k == j {
            continue;
        }
        let factor = rho
            .matrix()
            .shift(-lk)
            .scale(C64::new(1.0 / (lj - lk), 0.0));
        p = &p * &factor;
    }
    OrthProjection::new(p.hermitian_part(), tol)
}

/// `‖P − E_j‖` in operator norm.
pub fn projector_deviation(
    p: &OrthProjection,
    decomp: &SpectralDecomposition,
    j: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let diff = HermitianOperator::symmetrized(p.matrix() - decomp.projection(j).matrix());
    Ok(schatten_norms(&diff, tol)?.op_norm)
}

//! Near-identity unitaries conjugating one projection, or one finite-rank
//! Hermitian operator, onto an isospectral neighbour.
//!
//! For each matched pair of spectral projections `(E_j, F_j)`, the block
//! map `Σ_k |f_k⟩⟨e_k|` built from the affiliated vectors of the pair sends
//! `range(E_j)` onto `range(F_j)`: on the common part `E_j∧F_j` it is the
//! identity, on the remainder it rotates each `e_k` onto `f_k`. The sum over
//! all blocks, the kernel block `(E_0, F_0)` included, is unitary and
//! satisfies `vρv* = ρ′`.
//!
//! Writing `c_k` for the cosines of the principal angles of the pair,
//! block `j` contributes `2Σ(1 − c_k) ≤ 2Σ(1 − c_k²) = 2δ_j` to
//! `‖v − I‖₂²`. The kernel block has defect `δ = N − Tr(EF)`, which gives
//!
//! ```text
//! ‖v − I‖² ≤ ‖v − I‖₂² ≤ 2Σδ_j + 2δ ≤ 4Σδ_j.
//! ```

use serde::Serialize;

use crate::affiliation::block_pairs;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, schatten_norms, CMatrix, HermitianOperator, OrthProjection};
use crate::spectral::{decompose, SpectralDecomposition};

/// Slack used when checking the links of the bound chain.
const CHAIN_SLACK: f64 = 1e-12;

/// The unitary together with every audited quantity of the bound.
#[derive(Clone, Debug, Serialize)]
pub struct IntertwinerCertificate {
    #[serde(skip)]
    pub v: CMatrix,
    pub epsilon: f64,
    /// `N_j − Tr(E_j F_j)` per nonzero eigenvalue block.
    pub delta_j: Vec<f64>,
    /// `N − Tr(EF)` for the supports.
    pub delta: f64,
    /// `‖v − I‖`.
    pub op_norm_dev: f64,
    /// `‖v − I‖₂`.
    pub hs_norm_dev: f64,
    /// `‖v*v − I‖₂`.
    pub unitarity_defect: f64,
    /// `‖vρv* − ρ′‖₁`.
    pub conjugation_residual: f64,
    pub chain: BoundChain,
    /// Every link of the chain holds and `‖v − I‖ < ε`.
    pub bound_ok: bool,
}

/// The four terms of `‖v−I‖² ≤ ‖v−I‖₂² ≤ 2Σδ_j + 2δ ≤ 4Σδ_j`, with one flag
/// per link.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundChain {
    pub op_sq: f64,
    pub hs_sq: f64,
    pub two_sum_plus_two_delta: f64,
    pub four_sum: f64,
    pub op_le_hs: bool,
    pub hs_le_mid: bool,
    pub mid_le_four: bool,
}

impl BoundChain {
    fn new(op: f64, hs: f64, delta_j: &[f64], delta: f64) -> Self {
        let sum: f64 = delta_j.iter().sum();
        let op_sq = op * op;
        let hs_sq = hs * hs;
        let mid = 2.0 * sum + 2.0 * delta;
        let four = 4.0 * sum;
        Self {
            op_sq,
            hs_sq,
            two_sum_plus_two_delta: mid,
            four_sum: four,
            op_le_hs: op_sq <= hs_sq + CHAIN_SLACK,
            hs_le_mid: hs_sq <= mid + CHAIN_SLACK,
            mid_le_four: mid <= four + CHAIN_SLACK,
        }
    }

    pub fn holds(&self) -> bool {
        self.op_le_hs && self.hs_le_mid && self.mid_le_four
    }
}

/// Per-block and total overlap defects of an isospectral pair.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaAudit {
    pub delta_j: Vec<f64>,
    pub delta: f64,
}

impl DeltaAudit {
    pub fn sum(&self) -> f64 {
        self.delta_j.iter().sum()
    }
}

/// Decomposes both operators and checks that the clustered spectra match:
/// same number of blocks, equal multiplicities, eigenvalues within
/// `cluster_tol`.
pub fn matched_decompositions(
    rho: &HermitianOperator,
    rho_prime: &HermitianOperator,
    tol: &Tolerances,
) -> Result<(SpectralDecomposition, SpectralDecomposition)> {
    if rho.dim() != rho_prime.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), rho_prime.dim()));
    }
    let a = decompose(rho, tol)?;
    let b = decompose(rho_prime, tol)?;
    if a.block_count() != b.block_count() {
        return Err(Error::NotIsospectral(format!(
            "{} distinct nonzero eigenvalues against {}",
            a.block_count(),
            b.block_count()
        )));
    }
    for j in 0..a.block_count() {
        let (l, m) = (a.eigenvalues()[j], a.multiplicities()[j]);
        let (lp, mp) = (b.eigenvalues()[j], b.multiplicities()[j]);
        if m != mp || (l - lp).abs() > tol.cluster_tol {
            return Err(Error::NotIsospectral(format!(
                "block {}: ({l}, {m}) against ({lp}, {mp})",
                j + 1
            )));
        }
    }
    Ok((a, b))
}

fn audit(a: &SpectralDecomposition, b: &SpectralDecomposition) -> DeltaAudit {
    let delta_j = (1..=a.block_count())
        .map(|j| a.multiplicities()[j - 1] as f64 - a.projection(j).overlap(b.projection(j)))
        .collect();
    let n = a.total_rank() as f64;
    let delta = n - a.support().overlap(&b.support());
    DeltaAudit { delta_j, delta }
}

/// `δ_j = N_j − Tr(E_j F_j)` and `δ = N − Tr(EF)`.
pub fn delta_audit(
    rho: &HermitianOperator,
    rho_prime: &HermitianOperator,
    tol: &Tolerances,
) -> Result<DeltaAudit> {
    let (a, b) = matched_decompositions(rho, rho_prime, tol)?;
    Ok(audit(&a, &b))
}

/// `Σ_j` of the block transfer maps for bases of `range(E_j)` against `F_j`.
fn assemble(dim: usize, blocks: &[(&[crate::linalg::CVector], &CMatrix)], tol: &Tolerances) -> Result<CMatrix> {
    let mut v = CMatrix::zeros(dim);
    for (basis, f) in blocks {
        let pairs = block_pairs(basis, f, tol)?;
        v = &v + &pairs.transfer(dim);
    }
    Ok(v)
}

fn certify(
    v: CMatrix,
    epsilon: f64,
    delta_j: Vec<f64>,
    delta: f64,
    residual: f64,
    tol: &Tolerances,
) -> Result<IntertwinerCertificate> {
    let dev = &v - &CMatrix::identity(v.dim());
    let op_norm_dev = operator_norm(&dev, tol)?;
    let hs_norm_dev = dev.frobenius_norm();
    let chain = BoundChain::new(op_norm_dev, hs_norm_dev, &delta_j, delta);
    Ok(IntertwinerCertificate {
        unitarity_defect: v.unitarity_defect(),
        bound_ok: chain.holds() && op_norm_dev < epsilon,
        v,
        epsilon,
        delta_j,
        delta,
        op_norm_dev,
        hs_norm_dev,
        conjugation_residual: residual,
        chain,
    })
}

fn trace_distance(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(schatten_norms(&HermitianOperator::symmetrized(a - b), tol)?.trace_norm)
}

/// A unitary `u` with `uEu* = F` and `‖u − I‖ < ε`, for
/// `N − Tr(EF) < ε²/4` and `0 < ε < 2`.
///
/// `u` rotates `range(E)` onto `range(F)` and `range(I−E)` onto
/// `range(I−F)` through their principal vectors and is the identity on
/// `range(E∧F)` and outside `E∨F`.
pub fn projection_intertwiner(
    e: &OrthProjection,
    f: &OrthProjection,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<IntertwinerCertificate> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch(e.dim(), f.dim()));
    }
    if e.rank() != f.rank() {
        return Err(Error::RankMismatch(e.rank(), f.rank()));
    }
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 2), got {epsilon}")));
    }
    let delta = e.rank() as f64 - e.overlap(f);
    if delta >= epsilon * epsilon / 4.0 {
        return Err(Error::HypothesisViolated(format!(
            "N − Tr(EF) = {delta} is not below ε²/4 = {}",
            epsilon * epsilon / 4.0
        )));
    }
    let d = e.dim();
    let inside = e.range_basis(tol)?;
    let outside = e.complement().range_basis(tol)?;
    let f_out = f.complement();
    let v = assemble(d, &[(&inside, f.matrix()), (&outside, f_out.matrix())], tol)?;
    let moved = (&(&v * e.matrix()) * &v.adjoint()).hermitian_part();
    let residual = trace_distance(&moved, f.matrix(), tol)?;
    certify(v, epsilon, vec![delta], delta, residual, tol)
}

/// A unitary `v` with `vρv* = ρ′` and `‖v − I‖ < ε` for isospectral `ρ`,
/// `ρ′` with `Σδ_j < ε²/4` and `0 < ε < 1`.
///
/// `ρ′` only has to be isospectral up to `cluster_tol`; its eigenvalues are
/// effectively replaced by those of `ρ` and the discrepancy shows up in the
/// conjugation residual.
pub fn orbit_intertwiner(
    rho: &HermitianOperator,
    rho_prime: &HermitianOperator,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<IntertwinerCertificate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let (a, b) = matched_decompositions(rho, rho_prime, tol)?;
    let DeltaAudit { delta_j, delta } = audit(&a, &b);
    let sum: f64 = delta_j.iter().sum();
    if sum >= epsilon * epsilon / 4.0 {
        return Err(Error::HypothesisViolated(format!(
            "Σδ_j = {sum} is not below ε²/4 = {}",
            epsilon * epsilon / 4.0
        )));
    }
    let d = rho.dim();
    let blocks: Vec<(&[crate::linalg::CVector], &CMatrix)> = (0..=a.block_count())
        .map(|j| (a.block_basis(j), b.projection(j).matrix()))
        .collect();
    let v = assemble(d, &blocks, tol)?;
    let moved = rho.conjugate(&v);
    let residual = trace_distance(moved.matrix(), rho_prime.matrix(), tol)?;
    certify(v, epsilon, delta_j, delta, residual, tol)
}

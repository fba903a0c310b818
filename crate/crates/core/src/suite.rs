//! Seeded property battery behind `verify suite`.
//!
//! Each check draws `count` independent instances from a per-instance seed
//! derived from the suite seed, runs them in parallel, and collects the
//! outcomes in instance order so the report does not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::affiliation::{affiliate, proximity_check, split};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::intertwiner::{delta_audit, orbit_intertwiner, projection_intertwiner};
use crate::invariants::{example_pair_generator, moment_signature, norm_chain, projective_distances, same_orbit};
use crate::linalg::{
    eigh, join, meet, op_abs, operator_norm, schatten_norms, vector, CMatrix, CVector, HermitianOperator,
    OrthProjection, C64,
};
use crate::sampling::{exp_i, padded_diagonal, Sampler};
use crate::spectral::{decompose, lagrange_projector, projector_deviation};

/// `ε` used by the orbit batteries.
pub const ORBIT_EPSILON: f64 = 0.99;

/// Outcome of one instance.
#[derive(Clone, Debug)]
pub enum Outcome {
    /// Passed, with the check's headline metric.
    Pass(f64),
    /// Correctly refused because the hypothesis of the construction failed.
    Rejected,
    /// Not testable at the configured tolerances (ambiguity band).
    Skipped(String),
    Fail(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub instances: usize,
    pub passed: usize,
    pub rejected: usize,
    pub skipped: usize,
    pub failed: usize,
    /// Largest headline metric over passing instances.
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CheckSummary {
    pub fn from_outcomes(name: &'static str, outcomes: &[Outcome]) -> Self {
        let mut s = CheckSummary {
            name,
            instances: outcomes.len(),
            passed: 0,
            rejected: 0,
            skipped: 0,
            failed: 0,
            worst: 0.0,
            first_failure: None,
        };
        for (i, o) in outcomes.iter().enumerate() {
            match o {
                Outcome::Pass(m) => {
                    s.passed += 1;
                    s.worst = s.worst.max(*m);
                }
                Outcome::Rejected => s.rejected += 1,
                Outcome::Skipped(_) => s.skipped += 1,
                Outcome::Fail(msg) => {
                    s.failed += 1;
                    if s.first_failure.is_none() {
                        s.first_failure = Some(format!("instance {i}: {msg}"));
                    }
                }
            }
        }
        s
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<CheckSummary>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckSummary::ok)
    }
}

/// Per-instance seed for check `tag`.
pub fn instance_seed(seed: u64, tag: u64, index: u64) -> u64 {
    Sampler::new(seed ^ tag.rotate_left(32) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
}

/// Runs `f` on `count` derived seeds in parallel and keeps instance order.
pub fn run_check<F>(name: &'static str, seed: u64, tag: u64, count: usize, f: F) -> CheckSummary
where
    F: Fn(u64) -> Outcome + Sync,
{
    let outcomes: Vec<Outcome> = (0..count as u64)
        .into_par_iter()
        .map(|i| f(instance_seed(seed, tag, i)))
        .collect();
    CheckSummary::from_outcomes(name, &outcomes)
}

type CheckFn = fn(u64, &Tolerances) -> Outcome;

/// Every check of the battery, in report order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("linalg_substrate", check_linalg),
    ("lagrange_projector", check_lagrange),
    ("continuity_probe", check_continuity),
    ("affiliation", check_affiliation),
    ("projection_pair_unitary", check_projection_pair_unitary),
    ("dual_route", check_dual_route),
    ("orbit_bound_chain", check_orbit_bound_chain),
    ("monotone_shrinkage", check_shrinkage),
    ("example_closed_forms", check_example),
    ("norm_chain", check_norm_chain),
    ("projective_distances", check_projective),
    ("moment_invariance", check_moments),
    ("matrix_file_roundtrip", check_roundtrip),
];

pub fn run_suite(seed: u64, count: usize, tol: &Tolerances) -> SuiteReport {
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(tag, (name, f))| run_check(name, seed, tag as u64 + 1, count, |s| f(s, tol)))
        .collect();
    SuiteReport { seed, count, checks }
}

/// Runs one named check.
pub fn run_named(name: &str, seed: u64, count: usize, tol: &Tolerances) -> Option<CheckSummary> {
    let (tag, (name, f)) = CHECKS.iter().enumerate().find(|(_, (n, _))| *n == name)?;
    Some(run_check(name, seed, tag as u64 + 1, count, |s| f(s, tol)))
}

// ---------------------------------------------------------------------------
// Instance generators

/// Zero-padded copy of `a` in dimension `dim`.
pub fn embed(a: &CMatrix, dim: usize) -> CMatrix {
    let m = a.dim();
    CMatrix::from_fn(dim, |i, j| if i < m && j < m { a[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// `n` distinct values in `±[0.1, 1]` with pairwise gaps at least `gap`.
pub fn random_levels(s: &mut Sampler, n: usize, gap: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(n);
    while out.len() < n {
        let mag = s.uniform_in(0.1, 1.0);
        let l = if s.uniform() < 0.3 { -mag } else { mag };
        if out.iter().all(|x| (x - l).abs() >= gap) {
            out.push(l);
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Block spectrum with at most `blocks` levels, multiplicities `1..=3` and
/// total rank at most `max_rank`.
pub fn random_spectrum(s: &mut Sampler, blocks: usize, max_rank: usize) -> Vec<(f64, usize)> {
    let n = s.int_in(1, blocks.min(max_rank).max(1));
    let levels = random_levels(s, n, 0.05);
    let mut mult: Vec<usize> = (0..n).map(|_| s.int_in(1, 3)).collect();
    while mult.iter().sum::<usize>() > max_rank {
        let k = (0..n).max_by_key(|&k| mult[k]).unwrap_or(0);
        if mult[k] > 1 {
            mult[k] -= 1;
        } else {
            mult.pop();
        }
    }
    levels.into_iter().zip(mult).collect()
}

/// An isospectral pair `ρ`, `ρ′ = uρu*` with `u = exp(iH)`, `‖H‖ = t`.
///
/// Both `ρ` and `H` live on the first `support` coordinates, so the
/// remaining coordinates are orthogonal to both supports exactly.
#[derive(Clone, Debug)]
pub struct OrbitInstance {
    pub dim: usize,
    pub support: usize,
    pub spectrum: Vec<(f64, usize)>,
    pub perturbation: f64,
    pub rho: HermitianOperator,
    pub rho_prime: HermitianOperator,
    pub generator: HermitianOperator,
}

impl OrbitInstance {
    pub fn random(seed: u64, tol: &Tolerances) -> Result<Self> {
        let mut s = Sampler::new(seed);
        let t = s.log_uniform(1e-4, 0.3);
        Self::with_perturbation(seed, t, tol)
    }

    /// Same `ρ` and direction of `H` for a given seed, any `t`.
    pub fn with_perturbation(seed: u64, t: f64, tol: &Tolerances) -> Result<Self> {
        let mut s = Sampler::new(seed ^ 0x5EED);
        let dim = s.int_in(4, 32);
        let spectrum = random_spectrum(&mut s, 4, (dim - 1) / 2);
        let rank: usize = spectrum.iter().map(|x| x.1).sum();
        let support = s.int_in(2 * rank + 1, dim);
        let small = s.finite_rank(support, &spectrum);
        let rho = HermitianOperator::symmetrized(embed(small.matrix(), dim));
        let generator = HermitianOperator::symmetrized(embed(s.hermitian(support).matrix(), dim));
        let u = exp_i(&generator, t, tol)?;
        let rho_prime = rho.conjugate(&u);
        Ok(Self {
            dim,
            support,
            spectrum,
            perturbation: t,
            rho,
            rho_prime,
            generator,
        })
    }

    /// Projection onto the coordinates outside the support.
    pub fn tail(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| {
            C64::new(if i == j && i >= self.support { 1.0 } else { 0.0 }, 0.0)
        })
    }
}

/// Random rank-`rank` projection on the first `support` coordinates of
/// dimension `dim`.
pub fn embedded_projection(s: &mut Sampler, dim: usize, support: usize, rank: usize) -> OrthProjection {
    let p = s.projection(support, rank);
    let cols: Vec<CVector> = p
        .range_basis(&Tolerances::default())
        .unwrap_or_default()
        .into_iter()
        .map(|mut c| {
            c.resize(dim, C64::new(0.0, 0.0));
            c
        })
        .collect();
    OrthProjection::from_orthonormal(dim, &cols)
}

// ---------------------------------------------------------------------------
// Checks

macro_rules! fail_if {
    ($cond:expr, $($arg:tt)*) => {
        if $cond {
            return Outcome::Fail(format!($($arg)*));
        }
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(Error::ToleranceAmbiguity(m)) => return Outcome::Skipped(m),
            Err(e) => return Outcome::Fail(e.to_string()),
        }
    };
}

fn check_linalg(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(1, 24);
    let a = s.hermitian(d);
    let e = tri!(eigh(&a, tol));
    let recon = &e.reconstruct() - a.matrix();
    let a_norm = tri!(operator_norm(a.matrix(), tol));
    let err = tri!(operator_norm(&recon, tol));
    fail_if!(err > 1e-10 * a_norm + 1e-14, "reconstruction error {err:e}");
    let ortho = vector::orthonormality_defect(&e.vectors);
    fail_if!(ortho > tol.ortho_tol, "orthonormality defect {ortho:e}");
    fail_if!(e.values.windows(2).any(|w| w[0] < w[1]), "eigenvalues not descending");
    let n = tri!(schatten_norms(&a, tol));
    fail_if!(!n.ordered(1e-12), "norm ordering violated: {n:?}");
    let abs = tri!(op_abs(&a, tol));
    let low = tri!(eigh(&abs, tol)).values.last().copied().unwrap_or(0.0);
    fail_if!(low < -1e-12, "|A| has eigenvalue {low:e}");

    // Lattice laws on commuting diagonal projections.
    let x: Vec<f64> = (0..d).map(|_| if s.uniform() < 0.5 { 1.0 } else { 0.0 }).collect();
    let y: Vec<f64> = (0..d).map(|_| if s.uniform() < 0.5 { 1.0 } else { 0.0 }).collect();
    let px = tri!(OrthProjection::new(CMatrix::from_real_diag(&x), tol));
    let py = tri!(OrthProjection::new(CMatrix::from_real_diag(&y), tol));
    let lo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.min(*b)).collect();
    let hi: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.max(*b)).collect();
    let m = tri!(meet(&px, &py, tol));
    let j = tri!(join(&px, &py, tol));
    fail_if!(m.matrix().distance(&CMatrix::from_real_diag(&lo)) > tol.proj_tol, "meet is not entrywise min");
    fail_if!(j.matrix().distance(&CMatrix::from_real_diag(&hi)) > tol.proj_tol, "join is not entrywise max");
    Outcome::Pass(err / (a_norm + 1e-300))
}

fn check_lagrange(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(4, 16);
    let spectrum = random_spectrum(&mut s, 6, 6.min(d - 1));
    let rho = s.finite_rank(d, &spectrum);
    let decomp = tri!(decompose(&rho, tol));
    fail_if!(decomp.block_count() != spectrum.len(), "expected {} blocks", spectrum.len());
    let mut worst = 0.0f64;
    for j in 0..=decomp.block_count() {
        let p = tri!(lagrange_projector(&rho, &decomp, j, tol));
        let dev = tri!(projector_deviation(&p, &decomp, j, tol));
        fail_if!(dev > tol.lagrange_tol, "block {j}: ‖p_j(ρ) − E_j‖ = {dev:e}");
        worst = worst.max(dev);
    }
    Outcome::Pass(worst)
}

fn check_continuity(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(3, 12);
    let spectrum = random_spectrum(&mut s, 3, (d - 1) / 2);
    let rho = s.finite_rank(d, &spectrum);
    let h = s.hermitian(d);
    let base = tri!(decompose(&rho, tol));
    let mut devs = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let u = tri!(exp_i(&h, eps, tol));
        let moved = tri!(decompose(&rho.conjugate(&u), tol));
        fail_if!(moved.block_count() != base.block_count(), "block count changed at ε = {eps}");
        let mut dev = 0.0f64;
        for j in 0..=base.block_count() {
            let diff = HermitianOperator::symmetrized(moved.projection(j).matrix() - base.projection(j).matrix());
            dev = dev.max(tri!(schatten_norms(&diff, tol)).op_norm);
        }
        devs.push((eps, dev));
    }
    fail_if!(
        devs.windows(2).any(|w| w[1].1 >= w[0].1),
        "projection deviations not decreasing: {devs:?}"
    );
    let c = devs.iter().map(|(e, d)| d / e).fold(0.0, f64::max);
    fail_if!(!c.is_finite(), "continuity constant not finite");
    Outcome::Pass(c)
}

fn check_affiliation(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let (e, f) = if s.uniform() < 0.25 {
        // Degenerate EFE: every principal angle equal.
        let n = s.int_in(1, 4);
        let a = s.uniform_in(0.1, 0.95);
        let d = s.int_in(2 * n, 2 * n + 3);
        let pair = tri!(example_pair_generator(d, &vec![C64::new(a, 0.0); n], Some(s.next_u64())));
        (pair.e, pair.f)
    } else {
        let d = s.int_in(2, 16);
        let support = s.int_in(2, d);
        let rank = s.int_in(1, support / 2);
        let e = embedded_projection(&mut s, d, support, rank);
        let t = s.log_uniform(0.02, 1.2);
        let h = HermitianOperator::symmetrized(embed(s.hermitian(support).matrix(), d));
        let u = tri!(exp_i(&h, t, tol));
        let f = tri!(OrthProjection::new(
            (&(&u * e.matrix()) * &u.adjoint()).hermitian_part(),
            tol
        ));
        (e, f)
    };
    let parts = tri!(split(&e, &f, tol));
    let (_, near) = tri!(proximity_check(&parts.e_prime, &parts.f_prime));
    let hs_total = e.hs_distance_sq(&f);
    let hs_prime = parts.e_prime.hs_distance_sq(&parts.f_prime);
    let hs_perp = parts.e_perp.hs_distance_sq(&parts.f_perp);
    fail_if!(
        (hs_total - hs_prime).abs() > 1e-9 && parts.meet.rank() == 0,
        "Tr[(E−F)²] changed by splitting"
    );
    fail_if!((hs_prime - hs_perp).abs() > 1e-9, "perp pair distance {hs_perp} against {hs_prime}");
    let a = match affiliate(&parts.e_prime, &parts.f_prime, tol) {
        Ok(a) => a,
        Err(Error::KernelHit { eigenvalue }) => {
            fail_if!(near, "kernel hit ({eigenvalue:e}) although Tr[(E′−F′)²] < 2");
            return Outcome::Rejected;
        }
        Err(Error::ToleranceAmbiguity(m)) => return Outcome::Skipped(m),
        Err(err) => return Outcome::Fail(err.to_string()),
    };
    let cross = a.cross_orthogonality_defect();
    fail_if!(cross > 1e-10, "cross-orthogonality defect {cross:e}");
    let recon = a.reconstruction_defect();
    fail_if!(recon > 1e-10, "reconstruction defect {recon:e}");
    for sys in [&a.e, &a.f, &a.e_perp] {
        let o = vector::orthonormality_defect(sys);
        fail_if!(o > tol.ortho_tol, "orthonormality defect {o:e}");
    }
    for j in 0..a.len() {
        fail_if!(!(a.alpha[j] > 0.0 && a.beta[j] > 0.0), "non-positive coefficients at {j}");
        let unit = a.alpha[j].powi(2) + a.beta[j].powi(2) - 1.0;
        fail_if!(unit.abs() > 1e-10, "|α|² + |β|² − 1 = {unit:e}");
    }
    let fsum = a.f_projection(e.dim()).distance(parts.f_prime.matrix());
    fail_if!(fsum > 1e-9, "Σ P_f differs from F′ by {fsum:e}");
    Outcome::Pass(cross.max(recon))
}

fn check_projection_pair_unitary(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(2, 24);
    let support = s.int_in(2, d);
    let rank = s.int_in(1, support / 2);
    let e = embedded_projection(&mut s, d, support, rank);
    let eps = s.uniform_in(0.05, 1.95);
    let f = if s.uniform() < 0.2 {
        embedded_projection(&mut s, d, support, rank)
    } else {
        let t = s.log_uniform(1e-4, 1.0);
        let h = HermitianOperator::symmetrized(embed(s.hermitian(support).matrix(), d));
        let u = tri!(exp_i(&h, t, tol));
        tri!(OrthProjection::new((&(&u * e.matrix()) * &u.adjoint()).hermitian_part(), tol))
    };
    let delta = rank as f64 - e.overlap(&f);
    match projection_intertwiner(&e, &f, eps, tol) {
        Ok(c) => {
            fail_if!(delta >= eps * eps / 4.0, "certificate issued although δ = {delta} ≥ ε²/4");
            fail_if!(!c.bound_ok, "bound failed: {:?}, ‖u−I‖ = {}", c.chain, c.op_norm_dev);
            fail_if!(c.conjugation_residual > 1e-9, "‖uEu* − F‖₁ = {:e}", c.conjugation_residual);
            fail_if!(c.unitarity_defect > 1e-10, "unitarity defect {:e}", c.unitarity_defect);
            Outcome::Pass(c.conjugation_residual)
        }
        Err(Error::HypothesisViolated(_)) => {
            fail_if!(delta < eps * eps / 4.0, "rejected although δ = {delta} < ε²/4");
            Outcome::Rejected
        }
        Err(err) => Outcome::Fail(err.to_string()),
    }
}

/// Builds the projection-pair unitary a second way, from the split and the
/// affiliated bases of `(E′, F′)` and `(E′^⊥, F′^⊥)`, and compares.
fn check_dual_route(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let q = s.int_in(0, 2);
    let moving = s.int_in(1, 3);
    let support = q + 2 * moving + s.int_in(0, 4);
    let d = support + s.int_in(0, 3);
    // E = Q + E₁ and F = Q + uE₁u*, with u acting off range(Q).
    let inner_dim = support - q;
    let e1 = s.projection(inner_dim, moving);
    let t = s.uniform_in(0.05, 0.5);
    let u_inner = tri!(s.near_identity_unitary(inner_dim, t, tol));
    let f1 = (&(&u_inner * e1.matrix()) * &u_inner.adjoint()).hermitian_part();
    let place = |m: &CMatrix| {
        CMatrix::from_fn(d, |i, j| {
            if i < q && j < q {
                C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
            } else if i >= q && j >= q && i < support && j < support {
                m[(i - q, j - q)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let e = tri!(OrthProjection::new(place(e1.matrix()), tol));
    let f = tri!(OrthProjection::new(place(&f1), tol));
    let cert = match projection_intertwiner(&e, &f, 1.99, tol) {
        Ok(c) => c,
        Err(Error::HypothesisViolated(_)) => return Outcome::Rejected,
        Err(err) => return Outcome::Fail(err.to_string()),
    };
    let parts = tri!(split(&e, &f, tol));
    fail_if!(parts.meet.rank() != q, "meet rank {} instead of {q}", parts.meet.rank());
    let main = tri!(affiliate(&parts.e_prime, &parts.f_prime, tol));
    let perp = tri!(affiliate(&parts.e_perp, &parts.f_perp, tol));
    let hull = tri!(join(&parts.e_prime, &parts.f_prime, tol));
    let rest = &(&CMatrix::identity(d) - hull.matrix()) - parts.meet.matrix();
    let u = &(&(parts.meet.matrix() + &rest) + &CMatrix::sum_of_outer(d, &main.f, &main.e))
        + &CMatrix::sum_of_outer(d, &perp.f, &perp.e);
    let gap = cert.v.distance(&u);
    fail_if!(gap > 1e-8, "routes differ by {gap:e}");
    Outcome::Pass(gap)
}

fn locality_defects(inst: &OrbitInstance, v: &CMatrix, tol: &Tolerances) -> Result<(f64, Option<f64>)> {
    let dev = v - &CMatrix::identity(inst.dim);
    let tail = operator_norm(&(&dev * &inst.tail()), tol)?;
    let e = decompose(&inst.rho, tol)?.support();
    let f = decompose(&inst.rho_prime, tol)?.support();
    // Only a full-rank join is trustworthy: otherwise tiny principal angles
    // were folded into the meet by the tolerance.
    let generic = match join(&e, &f, tol) {
        Ok(j) if j.rank() == (e.rank() + f.rank()).min(inst.dim) => {
            let off = &CMatrix::identity(inst.dim) - j.matrix();
            Some(operator_norm(&(&dev * &off), tol)?)
        }
        Ok(_) | Err(Error::ToleranceAmbiguity(_)) => None,
        Err(err) => return Err(err),
    };
    Ok((tail, generic))
}

fn check_orbit_bound_chain(seed: u64, tol: &Tolerances) -> Outcome {
    let inst = tri!(OrbitInstance::random(seed, tol));
    orbit_outcome(&inst, ORBIT_EPSILON, tol)
}

/// The orbit certificate checks on one instance.
pub fn orbit_outcome(inst: &OrbitInstance, eps: f64, tol: &Tolerances) -> Outcome {
    match orbit_intertwiner(&inst.rho, &inst.rho_prime, eps, tol) {
        Ok(c) => {
            let ch = &c.chain;
            fail_if!(!ch.op_le_hs, "‖v−I‖² = {} > ‖v−I‖₂² = {}", ch.op_sq, ch.hs_sq);
            fail_if!(!ch.hs_le_mid, "‖v−I‖₂² = {} > 2Σδ_j + 2δ = {}", ch.hs_sq, ch.two_sum_plus_two_delta);
            fail_if!(!ch.mid_le_four, "2Σδ_j + 2δ = {} > 4Σδ_j = {}", ch.two_sum_plus_two_delta, ch.four_sum);
            fail_if!(!c.bound_ok, "‖v−I‖ = {} not below ε", c.op_norm_dev);
            let trace = tri!(schatten_norms(&inst.rho, tol)).trace_norm;
            let scaled = c.conjugation_residual / (1.0 + trace);
            fail_if!(scaled > 1e-9, "‖vρv* − ρ′‖₁ = {:e}", c.conjugation_residual);
            fail_if!(c.unitarity_defect > 1e-10, "unitarity defect {:e}", c.unitarity_defect);
            let (tail, generic) = tri!(locality_defects(inst, &c.v, tol));
            fail_if!(tail > 1e-10, "v moves vectors outside both supports by {tail:e}");
            if let Some(g) = generic {
                fail_if!(g > 1e-10, "v moves vectors outside E∨F by {g:e}");
            }
            Outcome::Pass(scaled)
        }
        Err(Error::HypothesisViolated(_)) => {
            let audit = tri!(delta_audit(&inst.rho, &inst.rho_prime, tol));
            fail_if!(audit.sum() < eps * eps / 4.0, "rejected although Σδ_j = {}", audit.sum());
            Outcome::Rejected
        }
        Err(err) => Outcome::Fail(err.to_string()),
    }
}

fn check_shrinkage(seed: u64, tol: &Tolerances) -> Outcome {
    let mut devs = Vec::new();
    for t in [1e-1, 1e-2, 1e-3] {
        let inst = tri!(OrbitInstance::with_perturbation(seed, t, tol));
        match orbit_intertwiner(&inst.rho, &inst.rho_prime, ORBIT_EPSILON, tol) {
            Ok(c) => devs.push(c.op_norm_dev),
            Err(Error::HypothesisViolated(_)) => return Outcome::Rejected,
            Err(err) => return Outcome::Fail(err.to_string()),
        }
    }
    fail_if!(devs.windows(2).any(|w| w[1] >= w[0]), "‖v−I‖ not decreasing: {devs:?}");
    Outcome::Pass(devs[2] / devs[0].max(1e-300))
}

fn check_example(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let n = s.int_in(1, 5);
    let d = s.int_in(2 * n, 2 * n + 4);
    let alpha: Vec<C64> = if s.uniform() < 0.3 {
        vec![C64::from_polar(s.uniform_in(0.05, 0.95), s.uniform_in(0.0, std::f64::consts::TAU)); n]
    } else {
        (0..n)
            .map(|_| C64::from_polar(s.uniform_in(0.05, 0.95), s.uniform_in(0.0, std::f64::consts::TAU)))
            .collect()
    };
    let rot = (s.uniform() < 0.5).then(|| s.next_u64());
    let pair = tri!(example_pair_generator(d, &alpha, rot));
    let m = tri!(pair.measured(tol));
    let x = &pair.expected;
    let spec = m
        .efe_spectrum
        .iter()
        .zip(&x.efe_spectrum)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let worst = spec.max((m.hs_sq - x.hs_sq).abs()).max((m.op_norm - x.op_norm).abs());
    fail_if!(worst > 1e-9, "closed forms off by {worst:e}");
    let a = tri!(affiliate(&pair.e, &pair.f, tol));
    let mut mags: Vec<f64> = alpha.iter().map(|a| a.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let ov = a.overlaps.iter().zip(&mags).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    fail_if!(ov > 1e-9, "affiliated overlaps off by {ov:e}");
    fail_if!(a.cross_orthogonality_defect() > 1e-10, "cross-orthogonality");
    Outcome::Pass(worst.max(ov))
}

fn check_norm_chain(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(2, 12);
    let cap = s.int_in(1, 4.min(d));
    let spec_a = random_spectrum(&mut s, 3, cap);
    let a = s.finite_rank(d, &spec_a);
    let b = if s.uniform() < 0.1 {
        a.clone()
    } else {
        let spec_b = random_spectrum(&mut s, 3, cap);
        s.finite_rank(d, &spec_b)
    };
    let c = tri!(norm_chain(&a, &b, cap, tol));
    fail_if!(!c.chain_ok, "chain violated: {c:?}");
    Outcome::Pass(c.trace_norm / (2.0 * cap as f64 * c.op_norm).max(1e-300))
}

fn check_projective(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(2, 10);
    let x = s.complex_vector(d);
    let y = match s.int_in(0, 3) {
        0 => x.clone(),
        1 => {
            // Close pair.
            let tiny = s.log_uniform(1e-8, 1e-2);
            let z = s.complex_vector(d);
            x.iter().zip(&z).map(|(a, b)| a + b * tiny).collect()
        }
        _ => s.complex_vector(d),
    };
    let p = tri!(crate::linalg::rank_one(&x));
    let r = tri!(crate::linalg::rank_one(&y));
    let dist = tri!(projective_distances(&p, &r, tol));
    fail_if!(dist.relation_defect > 1e-10, "relation defect {:e}", dist.relation_defect);
    let back = tri!(projective_distances(&r, &p, tol));
    fail_if!(
        (back.geodesic - dist.geodesic).abs() > 1e-12,
        "geodesic not symmetric"
    );
    Outcome::Pass(dist.relation_defect)
}

fn check_moments(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(2, 12);
    let spectrum = random_spectrum(&mut s, 4, d);
    let rho = s.finite_rank(d, &spectrum);
    let u = s.unitary(d);
    let moved = rho.conjugate(&u);
    let a = tri!(moment_signature(&rho, None, tol));
    let b = tri!(moment_signature(&moved, Some(a.order), tol));
    let mut worst = 0.0f64;
    for (x, y) in a.moments.iter().zip(&b.moments) {
        let r = (x - y).abs() / (1.0 + x.abs());
        worst = worst.max(r);
    }
    fail_if!(worst > 1e-10, "moment drift {worst:e}");
    let dual = a.duality_defect();
    fail_if!(dual > 1e-10, "moments and atoms disagree by {dual:e}");

    let same = tri!(same_orbit(&rho, &moved, None, 1e-10, tol));
    let back = tri!(same_orbit(&moved, &rho, None, 1e-10, tol));
    fail_if!(!same.same || same.anomaly, "conjugate not recognised: {same:?}");
    fail_if!(same != back, "comparison not symmetric");

    // A genuinely different spectrum: one level moved.
    let mut other = spectrum.clone();
    let k = s.int_in(0, other.len() - 1);
    let shift = s.log_uniform(1e-3, 0.2) * if s.uniform() < 0.5 { 1.0 } else { -1.0 };
    other[k].0 += shift;
    let clash = other
        .iter()
        .enumerate()
        .any(|(i, a)| a.0.abs() < 1e-3 || other.iter().skip(i + 1).any(|b| (a.0 - b.0).abs() < 1e-3));
    if clash {
        return Outcome::Pass(worst);
    }
    let diag = padded_diagonal(d, &other);
    let nu = HermitianOperator::from_real_diag(&diag).conjugate(&s.unitary(d));
    let cmp = tri!(same_orbit(&rho, &nu, None, 1e-10, tol));
    fail_if!(cmp.same || cmp.anomaly, "distinct spectra accepted: {cmp:?}");
    Outcome::Pass(worst)
}

fn check_roundtrip(seed: u64, tol: &Tolerances) -> Outcome {
    let mut s = Sampler::new(seed);
    let d = s.int_in(1, 8);
    let a = s.hermitian(d);
    let file = crate::io::MatrixFile::hermitian(&a, Default::default());
    let text = tri!(file.to_json());
    let back = tri!(crate::io::MatrixFile::from_json(&text, tol));
    let m = tri!(back.matrix());
    let exact = m
        .as_slice()
        .iter()
        .zip(a.matrix().as_slice())
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
    fail_if!(!exact, "roundtrip changed bits");
    Outcome::Pass(0.0)
}

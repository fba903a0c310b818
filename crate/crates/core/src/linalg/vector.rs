//! Small helpers on complex column vectors.
//!
//! Inner products are linear in the second argument.

use std::cmp::Ordering;

use super::matrix::{CVector, C64, ZERO};

/// `⟨x|y⟩ = Σ conj(x_i) y_i`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(x: &[C64], s: C64) -> CVector {
    x.iter().map(|z| z * s).collect()
}

/// `x − y`.
pub fn sub(x: &[C64], y: &[C64]) -> CVector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Scales `x` to unit length; returns `None` for the zero vector.
pub fn normalized(x: &[C64]) -> Option<CVector> {
    let n = norm(x);
    (n > 0.0).then(|| x.iter().map(|z| z / n).collect())
}

/// `Σ_a y_a b_a`.
pub fn combine(basis: &[CVector], coeffs: &[C64]) -> CVector {
    let dim = basis.first().map_or(0, |b| b.len());
    let mut out = vec![ZERO; dim];
    for (b, &c) in basis.iter().zip(coeffs) {
        for (o, z) in out.iter_mut().zip(b) {
            *o += c * z;
        }
    }
    out
}

/// Threshold below which a component counts as zero when fixing phases.
const PHASE_PIVOT: f64 = 1e-12;

/// Rotates the phase of `x` so that its first non-negligible component is
/// real and positive.
pub fn fix_phase(x: &mut [C64]) {
    if let Some(p) = x.iter().find(|z| z.norm() > PHASE_PIVOT) {
        let rot = p.conj() / p.norm();
        for z in x.iter_mut() {
            *z *= rot;
        }
    }
}

/// Descending lexicographic order on `(re, im)` of the components; used to
/// order eigenvectors of tied eigenvalues deterministically. Vectors are
/// expected to be phase-fixed.
pub fn lexicographic_desc(x: &[C64], y: &[C64]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        match b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Maximum deviation of the Gram matrix of `xs` from the identity.
pub fn orthonormality_defect(xs: &[CVector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(x, y) - target).norm());
        }
    }
    worst
}

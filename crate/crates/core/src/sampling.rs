//! Seeded random instances.
//!
//! The stream is SplitMix64 with the state initialised to the seed:
//!
//! ```text
//! x  ← x + 0x9E3779B97F4A7C15
//! z  ← (x ⊕ (x >> 30)) · 0xBF58476D1CE4E5B9
//! z  ← (z ⊕ (z >> 27)) · 0x94D049BB133111EB
//! out = z ⊕ (z >> 31)
//! ```
//!
//! Uniform doubles are `(out >> 11) · 2⁻⁵³`; normals come from Box–Muller,
//! one pair per two uniforms with the second value discarded. Any
//! implementation of these three lines reproduces the fixtures.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::config::Tolerances;
use crate::error::Result;
use crate::linalg::{eigh, vector, CMatrix, CVector, HermitianOperator, OrthProjection, C64};

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Log-uniform on `[lo, hi]`, both positive.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.uniform()).exp()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Standard complex normal, `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(s * self.normal(), s * self.normal())
    }

    pub fn complex_vector(&mut self, dim: usize) -> CVector {
        (0..dim).map(|_| self.complex_normal()).collect()
    }

    /// `(G + G*)/2` for a complex Ginibre `G`.
    pub fn hermitian(&mut self, dim: usize) -> HermitianOperator {
        let g = CMatrix::from_fn(dim, |_, _| self.complex_normal());
        HermitianOperator::symmetrized(g)
    }

    /// Haar-like unitary from Gram–Schmidt on Ginibre columns.
    pub fn unitary(&mut self, dim: usize) -> CMatrix {
        let mut cols: Vec<CVector> = Vec::with_capacity(dim);
        while cols.len() < dim {
            let mut x = self.complex_vector(dim);
            for _ in 0..2 {
                for c in &cols {
                    let p = vector::inner(c, &x);
                    for (xi, ci) in x.iter_mut().zip(c) {
                        *xi -= p * ci;
                    }
                }
            }
            if let Some(u) = vector::normalized(&x) {
                cols.push(u);
            }
        }
        CMatrix::from_fn(dim, |i, j| cols[j][i])
    }

    /// `exp(iH)` for a random Hermitian `H` scaled to operator norm `t`.
    pub fn near_identity_unitary(&mut self, dim: usize, t: f64, tol: &Tolerances) -> Result<CMatrix> {
        let h = self.hermitian(dim);
        exp_i(&h, t, tol)
    }

    /// Projection onto the span of `rank` random orthonormal vectors.
    pub fn projection(&mut self, dim: usize, rank: usize) -> OrthProjection {
        let u = self.unitary(dim);
        let cols: Vec<CVector> = (0..rank).map(|j| u.column(j)).collect();
        OrthProjection::from_orthonormal(dim, &cols)
    }

    /// `W diag(λ_1^{m_1}, …, 0, …) W*` with `W` random unitary.
    pub fn finite_rank(&mut self, dim: usize, spectrum: &[(f64, usize)]) -> HermitianOperator {
        let diag = padded_diagonal(dim, spectrum);
        let w = self.unitary(dim);
        HermitianOperator::from_real_diag(&diag).conjugate(&w)
    }
}

/// The diagonal `(λ_1 × m_1, λ_2 × m_2, …, 0, …)` of length `dim`.
pub fn padded_diagonal(dim: usize, spectrum: &[(f64, usize)]) -> Vec<f64> {
    let mut diag: Vec<f64> = spectrum
        .iter()
        .flat_map(|&(l, m)| std::iter::repeat_n(l, m))
        .collect();
    assert!(diag.len() <= dim, "spectrum does not fit in dimension {dim}");
    diag.resize(dim, 0.0);
    diag
}

/// `exp(i·t·H/‖H‖)`; the identity when `H = 0` or `t = 0`.
pub fn exp_i(h: &HermitianOperator, t: f64, tol: &Tolerances) -> Result<CMatrix> {
    let e = eigh(h, tol)?;
    let norm = e.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let s = if norm > 0.0 { t / norm } else { 0.0 };
    let scaled: Vec<CVector> = e
        .pairs()
        .map(|(l, x)| vector::scale(x, C64::from_polar(1.0, s * l)))
        .collect();
    Ok(CMatrix::sum_of_outer(h.dim(), &scaled, &e.vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_matches_reference_splitmix() {
        // First output of SplitMix64 from state 0.
        let mut s = Sampler::new(0);
        assert_eq!(s.next_u64(), 0xE220A8397B1DCDAF);
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<f64> = {
            let mut s = Sampler::new(7);
            (0..5).map(|_| s.normal()).collect()
        };
        let mut s = Sampler::new(7);
        for x in a {
            assert_eq!(x.to_bits(), s.normal().to_bits());
        }
    }

    #[test]
    fn unitary_and_near_identity() {
        let tol = Tolerances::default();
        let mut s = Sampler::new(3);
        let u = s.unitary(9);
        assert!(u.unitarity_defect() < 1e-13);
        let v = s.near_identity_unitary(6, 0.05, &tol).unwrap();
        assert!(v.unitarity_defect() < 1e-13);
        let dev = crate::linalg::operator_norm(&(&v - &CMatrix::identity(6)), &tol).unwrap();
        // ‖e^{iH} − I‖ = 2 sin(‖H‖/2).
        assert!((dev - 2.0 * (0.025f64).sin()).abs() < 1e-12);
    }

    #[test]
    fn finite_rank_has_requested_spectrum() {
        let tol = Tolerances::default();
        let mut s = Sampler::new(11);
        let rho = s.finite_rank(5, &[(0.7, 2), (-0.2, 1)]);
        let e = eigh(&rho, &tol).unwrap();
        let expect = [0.7, 0.7, 0.0, 0.0, -0.2];
        for (l, x) in e.values.iter().zip(expect) {
            assert!((l - x).abs() < 1e-13);
        }
    }
}

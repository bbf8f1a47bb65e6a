//! Legendre transform of the real Schrödinger flow and the resulting
//! second-order equation on `R^N`.
//!
//! Solving Hamilton's equation for `qdot` gives `p = (H^R)^{-1}(hbar qdot - H^I q)`.
//! Substituting into `L = p.qdot - H(q,p)` yields a quadratic Lagrangian
//!
//! ```text
//! L(q, qdot) = qdot^T A qdot + q^T B qdot + q^T C q
//! A = (hbar/2) (H^R)^{-1}
//! B = H^I (H^R)^{-1}
//! C = -(1/2hbar) [H^I (H^R)^{-1} H^I + H^R]
//! ```
//!
//! whose Euler–Lagrange equations are `qddot = L1 qdot + L0 q` with
//!
//! ```text
//! L0 = -(1/hbar^2) [H^R H^I (H^R)^{-1} H^I + (H^R)^2]
//! L1 =  (1/hbar)   [H^I + H^R H^I (H^R)^{-1}]
//! ```
//!
//! The map `(q, p) -> (q, qdot)` is the linear conjugation
//! `T = [[I, 0], [H^I/hbar, H^R/hbar]]`, so the embedded first-order
//! generator `[[0, I], [L0, L1]]` equals `T G T^{-1}` and shares the
//! spectrum of the phase-space generator `G`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::RealPhaseState;
use crate::linalg::{complex_eigenvalues, symmetrize};
use crate::operator::{Fingerprint, RealImagSplit};

/// Position and velocity `(q, qdot)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianState {
    q: DVector<f64>,
    qdot: DVector<f64>,
    pub t: f64,
}

impl LagrangianState {
    pub fn new(q: DVector<f64>, qdot: DVector<f64>, t: f64) -> Result<Self> {
        if q.len() != qdot.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), found: qdot.len() });
        }
        Ok(Self { q, qdot, t })
    }

    pub fn from_stacked(v: &DVector<f64>, t: f64) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("stacked Lagrangian vector has odd length {}", v.len())));
        }
        let n = v.len() / 2;
        Ok(Self { q: v.rows(0, n).into_owned(), qdot: v.rows(n, n).into_owned(), t })
    }

    /// `kappa = (q, qdot)`.
    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.dim(), self.q.iter().chain(self.qdot.iter()).copied())
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }

    pub fn qdot(&self) -> &DVector<f64> {
        &self.qdot
    }
}

/// Everything the Legendre transform needs: the split, `(H^R)^{-1}` and hbar.
///
/// Building one of these is the point where a singular `H^R` is rejected.
#[derive(Debug, Clone)]
pub struct LegendreMap {
    split: RealImagSplit,
    hr_inv: DMatrix<f64>,
    hbar: f64,
    fingerprint: Fingerprint,
}

impl LegendreMap {
    pub fn new(split: RealImagSplit, hbar: f64, tol: f64) -> Result<Self> {
        let hr_inv = split.invert_real_part(tol)?;
        let fingerprint = split.fingerprint(hbar);
        Ok(Self { split, hr_inv, hbar, fingerprint })
    }

    /// Uses a caller-supplied inverse; it is checked against `H^R`.
    pub fn with_inverse(split: RealImagSplit, hr_inv: DMatrix<f64>, hbar: f64) -> Result<Self> {
        let n = split.dim();
        if hr_inv.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: hr_inv.nrows() });
        }
        let residual = crate::linalg::max_abs(&(&hr_inv * split.h_real() - DMatrix::identity(n, n)));
        if !(residual <= 1e-6) {
            return Err(Error::InvalidArgument(format!("supplied inverse has residual {residual:e}")));
        }
        let fingerprint = split.fingerprint(hbar);
        Ok(Self { split, hr_inv, hbar, fingerprint })
    }

    pub fn split(&self) -> &RealImagSplit {
        &self.split
    }

    pub fn hr_inv(&self) -> &DMatrix<f64> {
        &self.hr_inv
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn dim(&self) -> usize {
        self.split.dim()
    }

    /// `p = (H^R)^{-1} (hbar qdot - H^I q)`.
    pub fn momentum_from_velocity(&self, s: &LagrangianState) -> DVector<f64> {
        &self.hr_inv * (s.qdot() * self.hbar - self.split.h_imag() * s.q())
    }

    /// `qdot = (H^R p + H^I q) / hbar`.
    pub fn velocity_from_momentum(&self, s: &RealPhaseState) -> DVector<f64> {
        (self.split.h_real() * s.p() + self.split.h_imag() * s.q()) / self.hbar
    }

    /// `psi = q + i p(q, qdot)`.
    pub fn reconstruct_psi(&self, s: &LagrangianState) -> DVector<Complex64> {
        let p = self.momentum_from_velocity(s);
        s.q().zip_map(&p, Complex64::new)
    }

    pub fn to_phase_state(&self, s: &LagrangianState) -> RealPhaseState {
        RealPhaseState::new(s.q().clone(), self.momentum_from_velocity(s), s.t)
            .expect("q and p share the state dimension")
    }

    pub fn to_lagrangian_state(&self, s: &RealPhaseState) -> LagrangianState {
        LagrangianState { q: s.q().clone(), qdot: self.velocity_from_momentum(s), t: s.t }
    }

    /// `q = Re psi0`, `qdot` from Hamilton's equation with `p = Im psi0`.
    pub fn initial_state(&self, psi0: &DVector<Complex64>, t0: f64) -> Result<LagrangianState> {
        if psi0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi0.len() });
        }
        Ok(self.to_lagrangian_state(&RealPhaseState::from_psi(psi0, t0)))
    }

    pub fn coeffs(&self) -> LagrangianCoeffs {
        let hr_inv = &self.hr_inv;
        let hi = self.split.h_imag();
        let hbar = self.hbar;
        let l_qdqd = hr_inv * (hbar / 2.0);
        let l_qqd = hi * hr_inv;
        let l_qq = symmetrize(&((hi * hr_inv * hi + self.split.h_real()) * (-1.0 / (2.0 * hbar))));
        LagrangianCoeffs { l_qdqd, l_qqd, l_qq, fingerprint: self.fingerprint }
    }

    pub fn system(&self) -> LagrangianSystem {
        let hr = self.split.h_real();
        let hi = self.split.h_imag();
        let hr_inv = &self.hr_inv;
        let hbar = self.hbar;
        let hr_hi_hrinv = hr * hi * hr_inv;
        let l0 = (&hr_hi_hrinv * hi + hr * hr) * (-1.0 / (hbar * hbar));
        let l1 = (hi + &hr_hi_hrinv) / hbar;
        LagrangianSystem { l0, l1, coeffs: self.coeffs(), hbar, fingerprint: self.fingerprint }
    }
}

/// Coefficient blocks of `L = qdot^T A qdot + q^T B qdot + q^T C q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianCoeffs {
    pub l_qdqd: DMatrix<f64>,
    pub l_qqd: DMatrix<f64>,
    pub l_qq: DMatrix<f64>,
    pub fingerprint: Fingerprint,
}

impl LagrangianCoeffs {
    pub fn evaluate(&self, s: &LagrangianState) -> f64 {
        let q = s.q();
        let qd = s.qdot();
        qd.dot(&(&self.l_qdqd * qd)) + q.dot(&(&self.l_qqd * qd)) + q.dot(&(&self.l_qq * q))
    }

    /// The same Lagrangian as a single quadratic form `kappa^T K kappa` with
    /// `K = [[C, B/2], [B^T/2, A]]`.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let n = self.l_qq.nrows();
        let mut k = DMatrix::zeros(2 * n, 2 * n);
        k.view_mut((0, 0), (n, n)).copy_from(&self.l_qq);
        k.view_mut((0, n), (n, n)).copy_from(&(&self.l_qqd * 0.5));
        k.view_mut((n, 0), (n, n)).copy_from(&(self.l_qqd.transpose() * 0.5));
        k.view_mut((n, n), (n, n)).copy_from(&self.l_qdqd);
        k
    }

    pub fn evaluate_block(&self, s: &LagrangianState) -> f64 {
        let kappa = s.stacked();
        kappa.dot(&(self.block_matrix() * &kappa))
    }
}

/// The operators of `qddot = L1 qdot + L0 q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSystem {
    pub l0: DMatrix<f64>,
    pub l1: DMatrix<f64>,
    pub coeffs: LagrangianCoeffs,
    pub hbar: f64,
    pub fingerprint: Fingerprint,
}

impl LagrangianSystem {
    pub fn dim(&self) -> usize {
        self.l0.nrows()
    }

    pub fn rhs(&self, s: &LagrangianState) -> DVector<f64> {
        &self.l1 * s.qdot() + &self.l0 * s.q()
    }

    /// `[[0, I], [L0, L1]]`.
    pub fn embed_first_order(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, n), (n, n)).fill_with_identity();
        m.view_mut((n, 0), (n, n)).copy_from(&self.l0);
        m.view_mut((n, n), (n, n)).copy_from(&self.l1);
        m
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        complex_eigenvalues(&self.embed_first_order())
    }

    /// Compares against operators freshly derived from `map`.
    pub fn matches(&self, map: &LegendreMap) -> bool {
        if self.fingerprint != map.fingerprint() {
            return false;
        }
        let fresh = map.system();
        let scale = 1.0 + crate::linalg::max_abs(&fresh.l0).max(crate::linalg::max_abs(&fresh.l1));
        crate::linalg::max_abs(&(&fresh.l0 - &self.l0)) <= 1e-12 * scale
            && crate::linalg::max_abs(&(&fresh.l1 - &self.l1)) <= 1e-12 * scale
    }
}

//! Real phase-space form of the Schrödinger equation.
//!
//! Writing `psi = q + i p` turns `i hbar dpsi/dt = H psi` into a linear
//! Hamiltonian system on `R^{2N}` with generator
//!
//! ```text
//!        1  | H^I   H^R |
//!  G = ---- |           |
//!      hbar | -H^R  H^I |
//! ```
//!
//! and Hamilton's function `H(q,p) = <psi|H|psi> / (2 hbar)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::complex_eigenvalues;
use crate::operator::{Fingerprint, RealImagSplit};

/// A state `(q, p)` at time `t`, with `psi_n = q_n + i p_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPhaseState {
    q: DVector<f64>,
    p: DVector<f64>,
    pub t: f64,
}

impl RealPhaseState {
    pub fn new(q: DVector<f64>, p: DVector<f64>, t: f64) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), found: p.len() });
        }
        Ok(Self { q, p, t })
    }

    pub fn from_psi(psi: &DVector<Complex64>, t: f64) -> Self {
        Self { q: psi.map(|z| z.re), p: psi.map(|z| z.im), t }
    }

    pub fn to_psi(&self) -> DVector<Complex64> {
        self.q.zip_map(&self.p, Complex64::new)
    }

    /// Interprets a stacked `(q, p)` vector of even length.
    pub fn from_stacked(v: &DVector<f64>, t: f64) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("stacked phase vector has odd length {}", v.len())));
        }
        let n = v.len() / 2;
        Ok(Self { q: v.rows(0, n).into_owned(), p: v.rows(n, n).into_owned(), t })
    }

    pub fn stacked(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_iterator(2 * n, self.q.iter().chain(self.p.iter()).copied())
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }

    /// `sum q^2 + p^2`, the squared norm of `psi`.
    pub fn norm_sqr(&self) -> f64 {
        self.q.norm_squared() + self.p.norm_squared()
    }
}

/// Hamilton's function `(1/2hbar) sum (q_n q_m H^R + p_n p_m H^R - 2 q_n p_m H^I)`.
pub fn hamilton_function(state: &RealPhaseState, split: &RealImagSplit, hbar: f64) -> f64 {
    let hr = split.h_real();
    let hi = split.h_imag();
    let q = state.q();
    let p = state.p();
    (q.dot(&(hr * q)) + p.dot(&(hr * p)) - 2.0 * q.dot(&(hi * p))) / (2.0 * hbar)
}

/// The `2N x 2N` linear generator of the real Schrödinger flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGenerator {
    matrix: DMatrix<f64>,
    hbar: f64,
    fingerprint: Fingerprint,
}

impl PhaseGenerator {
    pub fn build(split: &RealImagSplit, hbar: f64) -> Self {
        Self { matrix: assemble(split, hbar), hbar, fingerprint: split.fingerprint(hbar) }
    }

    /// Recomputes the block structure from `split` and compares exactly.
    pub fn matches(&self, split: &RealImagSplit) -> bool {
        self.fingerprint == split.fingerprint(self.hbar) && self.matrix == assemble(split, self.hbar)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    /// Time derivative `(qdot, pdot)` of a state, i.e. Hamilton's equations.
    pub fn rhs(&self, state: &RealPhaseState) -> Result<DVector<f64>> {
        if 2 * state.dim() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch { expected: self.matrix.nrows() / 2, found: state.dim() });
        }
        Ok(&self.matrix * state.stacked())
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        complex_eigenvalues(&self.matrix)
    }
}

fn assemble(split: &RealImagSplit, hbar: f64) -> DMatrix<f64> {
    let n = split.dim();
    let hr = split.h_real();
    let hi = split.h_imag();
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(hi);
    g.view_mut((0, n), (n, n)).copy_from(hr);
    g.view_mut((n, 0), (n, n)).copy_from(&(-hr));
    g.view_mut((n, n), (n, n)).copy_from(hi);
    g / hbar
}

//! Hermitian Hamiltonians in a chosen basis and their real/imaginary split.
//!
//! A Hamiltonian matrix `H = H^R + i H^I` has a symmetric real part and an
//! antisymmetric imaginary part. Everything downstream (phase-space generator,
//! Legendre transform, Lagrangian operators) is assembled from those two
//! real matrices, and the Legendre transform only exists when `H^R` is
//! invertible. This module owns the validation, the split, the
//! invertibility test and the basis changes that can repair a singular `H^R`.

use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_norm_c, sym_eigen_sorted};

/// Relative tolerance used when validating Hermiticity.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Absolute tolerance on `max |U^dagger U - I|`.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Default relative spectral gap for treating `H^R` as invertible.
pub const DEFAULT_INVERTIBILITY_TOL: f64 = 1e-10;

/// Identifies the `(H^R, H^I, hbar)` triple a derived object was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint(pub u64);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Fingerprint {
    pub fn ensure_same(self, other: Fingerprint) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SystemMismatch { left: self.0, right: other.0 })
        }
    }
}

/// A complex Hermitian `N x N` matrix together with the value of hbar it is
/// measured against.
///
/// The stored entries are the exact Hermitian part `(H + H^dagger)/2` of the
/// validated input, so the split is exactly (anti)symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<Complex64>,
    hbar: f64,
}

impl HermitianOperator {
    pub fn new(entries: DMatrix<Complex64>, hbar: f64) -> Result<Self> {
        if entries.nrows() == 0 {
            return Err(Error::InvalidArgument("Hamiltonian dimension must be at least 1".into()));
        }
        if !entries.is_square() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive and finite, got {hbar}")));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidArgument("Hamiltonian has non-finite entries".into()));
        }
        let adjoint = entries.adjoint();
        let deviation = max_norm_c(&(&entries - &adjoint));
        let tolerance = HERMITICITY_TOL * max_norm_c(&entries);
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        let entries = (&entries + adjoint) * Complex64::new(0.5, 0.0);
        Ok(Self { entries, hbar })
    }

    /// Operator with a purely real (symmetric) matrix.
    pub fn from_real(matrix: &DMatrix<f64>, hbar: f64) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)), hbar)
    }

    pub fn from_parts(h_real: &DMatrix<f64>, h_imag: &DMatrix<f64>, hbar: f64) -> Result<Self> {
        if h_real.shape() != h_imag.shape() {
            return Err(Error::DimensionMismatch { expected: h_real.nrows(), found: h_imag.nrows() });
        }
        Self::new(h_real.zip_map(h_imag, Complex64::new), hbar)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.entries.clone(), hbar)
    }

    /// Elementwise real and imaginary parts.
    pub fn split(&self) -> RealImagSplit {
        RealImagSplit {
            h_real: self.entries.map(|z| z.re),
            h_imag: self.entries.map(|z| z.im),
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> DVector<f64> {
        self.eigen().values
    }

    /// Eigendecomposition with ascending eigenvalues and phase-fixed
    /// eigenvectors: in every column the largest-magnitude component (lowest
    /// index on ties) is real and positive.
    pub fn eigen(&self) -> HermitianEigen {
        let n = self.dim();
        let eig = SymmetricEigen::new(self.entries.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            fix_phase(&mut col);
            vectors.set_column(dst, &col);
        }
        HermitianEigen { values, vectors }
    }

    /// Returns `U^dagger H U`.
    pub fn change_basis(&self, unitary: &DMatrix<Complex64>) -> Result<Self> {
        let n = self.dim();
        if unitary.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: unitary.nrows() });
        }
        check_unitary(unitary)?;
        let rotated = unitary.adjoint() * &self.entries * unitary;
        Self::new(rotated, self.hbar)
    }

    /// Eigenvector unitary that makes the operator real diagonal, with the
    /// near-zero eigenvalues (`|e| <= tol * max|e|`) flagged.
    pub fn regularizing_rotation(&self) -> RegularizingRotation {
        self.regularizing_rotation_with_tol(DEFAULT_INVERTIBILITY_TOL)
    }

    pub fn regularizing_rotation_with_tol(&self, tol: f64) -> RegularizingRotation {
        let HermitianEigen { values, vectors } = self.eigen();
        let scale = values.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
        let near_zero = values
            .iter()
            .enumerate()
            .filter(|(_, e)| e.abs() <= tol * scale)
            .map(|(i, _)| i)
            .collect();
        RegularizingRotation { unitary: vectors, eigenvalues: values, near_zero }
    }

    /// `<psi|H|psi>`, which is real for a Hermitian operator.
    pub fn expectation(&self, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(&self.entries * psi)).re
    }
}

/// Eigenpairs of a [`HermitianOperator`]; `vectors` holds one eigenvector per column.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Result of [`HermitianOperator::regularizing_rotation`].
#[derive(Debug, Clone)]
pub struct RegularizingRotation {
    pub unitary: DMatrix<Complex64>,
    pub eigenvalues: DVector<f64>,
    /// Indices (into `eigenvalues`) of eigenvalues numerically equal to zero.
    /// Rotating does not remove these; see `restrict_nonzero_subspace`.
    pub near_zero: Vec<usize>,
}

fn fix_phase(col: &mut DVector<Complex64>) {
    let mut best = 0;
    let mut best_mag = 0.0;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag == 0.0 {
        return;
    }
    let phase = col[best].conj() / best_mag;
    col.iter_mut().for_each(|z| *z *= phase);
    col[best] = Complex64::new(col[best].re, 0.0);
}

/// Fails with [`Error::NotUnitary`] unless `max |U^dagger U - I| <= UNITARITY_TOL`.
pub fn check_unitary(u: &DMatrix<Complex64>) -> Result<()> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
    }
    let gram = u.adjoint() * u;
    let identity = DMatrix::<Complex64>::identity(u.nrows(), u.nrows());
    let deviation = max_norm_c(&(gram - identity));
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// The real symmetric part `H^R` and real antisymmetric part `H^I` of a
/// Hamiltonian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImagSplit {
    h_real: DMatrix<f64>,
    h_imag: DMatrix<f64>,
}

impl RealImagSplit {
    /// Validates that `h_real` is symmetric and `h_imag` antisymmetric.
    pub fn from_parts(h_real: DMatrix<f64>, h_imag: DMatrix<f64>) -> Result<Self> {
        let op = HermitianOperator::from_parts(&h_real, &h_imag, 1.0)?;
        Ok(op.split())
    }

    pub fn dim(&self) -> usize {
        self.h_real.nrows()
    }

    pub fn h_real(&self) -> &DMatrix<f64> {
        &self.h_real
    }

    pub fn h_imag(&self) -> &DMatrix<f64> {
        &self.h_imag
    }

    /// Hash of the exact bit patterns of both parts and `hbar`.
    pub fn fingerprint(&self, hbar: f64) -> Fingerprint {
        let mut hasher = DefaultHasher::new();
        self.dim().hash(&mut hasher);
        hbar.to_bits().hash(&mut hasher);
        for x in self.h_real.iter().chain(self.h_imag.iter()) {
            x.to_bits().hash(&mut hasher);
        }
        Fingerprint(hasher.finish())
    }

    /// Spectral test of `H^R`: invertible iff `min|e| > tol * max|e|`.
    pub fn check_real_part_invertible(&self, tol: f64) -> InvertibilityReport {
        let (values, _) = sym_eigen_sorted(&self.h_real);
        report_from_eigenvalues(values.as_slice(), tol)
    }

    /// `(H^R)^{-1}` via the symmetric eigendecomposition, so the result is
    /// exactly symmetric.
    pub fn invert_real_part(&self, tol: f64) -> Result<DMatrix<f64>> {
        let (values, vectors) = sym_eigen_sorted(&self.h_real);
        let report = report_from_eigenvalues(values.as_slice(), tol);
        if !report.invertible {
            return Err(Error::SingularRealPart(report));
        }
        let inv_diag = DMatrix::from_diagonal(&values.map(|e| 1.0 / e));
        let inverse = &vectors * inv_diag * vectors.transpose();
        Ok(crate::linalg::symmetrize(&inverse))
    }

    pub fn is_zero(&self) -> bool {
        max_abs(&self.h_real) == 0.0 && max_abs(&self.h_imag) == 0.0
    }
}

fn report_from_eigenvalues(values: &[f64], tol: f64) -> InvertibilityReport {
    let min_abs = values.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    let max_abs = values.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let tolerance_used = tol * max_abs;
    let condition_number = if min_abs > 0.0 { max_abs / min_abs } else { f64::INFINITY };
    InvertibilityReport {
        invertible: min_abs > tolerance_used,
        min_abs_eigenvalue: min_abs,
        condition_number,
        tolerance_used,
    }
}

/// Outcome of the spectral invertibility test on `H^R`.
///
/// `tolerance_used` is the absolute threshold the smallest eigenvalue
/// magnitude was compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub invertible: bool,
    pub min_abs_eigenvalue: f64,
    #[serde(with = "crate::serde_util::extended_f64")]
    pub condition_number: f64,
    pub tolerance_used: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_y() -> HermitianOperator {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        HermitianOperator::new(m, 1.0).unwrap()
    }

    #[test]
    fn split_sigma_y_has_zero_real_part() {
        let s = sigma_y().split();
        assert_eq!(s.h_real(), &DMatrix::zeros(2, 2));
        assert_eq!(s.h_imag(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn split_identity_and_general() {
        let id = HermitianOperator::from_real(&DMatrix::identity(2, 2), 1.0).unwrap().split();
        assert_eq!(id.h_real(), &DMatrix::identity(2, 2));
        assert_eq!(id.h_imag(), &DMatrix::zeros(2, 2));

        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 3.0), c(2.0, -3.0), c(5.0, 0.0)]);
        let s = HermitianOperator::new(m, 1.0).unwrap().split();
        assert_eq!(s.h_real(), &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 5.0]));
        assert_eq!(s.h_imag(), &DMatrix::from_row_slice(2, 2, &[0.0, 3.0, -3.0, 0.0]));
    }

    #[test]
    fn rejects_non_hermitian_and_bad_shapes() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.5, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianOperator::new(m, 1.0), Err(Error::NotHermitian { .. })));
        assert!(HermitianOperator::new(DMatrix::zeros(0, 0), 1.0).is_err());
        assert!(HermitianOperator::new(DMatrix::zeros(2, 3), 1.0).is_err());
        assert!(HermitianOperator::new(DMatrix::identity(2, 2), 0.0).is_err());
    }

    #[test]
    fn accepts_round_off_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1e-15), c(2.0, 0.0), c(1.0, 0.0)]);
        let op = HermitianOperator::new(m, 1.0).unwrap();
        let s = op.split();
        assert_eq!(s.h_imag()[(0, 1)], -s.h_imag()[(1, 0)]);
    }

    #[test]
    fn invertibility_reports() {
        let r = sigma_y().split().check_real_part_invertible(DEFAULT_INVERTIBILITY_TOL);
        assert!(!r.invertible);
        assert_eq!(r.min_abs_eigenvalue, 0.0);
        assert!(r.condition_number.is_infinite());

        let d = RealImagSplit::from_parts(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])), DMatrix::zeros(2, 2)).unwrap();
        let r = d.check_real_part_invertible(DEFAULT_INVERTIBILITY_TOL);
        assert!(r.invertible);
        assert_eq!(r.min_abs_eigenvalue, 1.0);
        assert_eq!(r.condition_number, 1.0);

        let z = RealImagSplit::from_parts(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 2.0])), DMatrix::zeros(3, 3)).unwrap();
        assert!(!z.check_real_part_invertible(DEFAULT_INVERTIBILITY_TOL).invertible);
    }

    #[test]
    fn inverse_examples() {
        let diag = |v: Vec<f64>| {
            let n = v.len();
            RealImagSplit::from_parts(DMatrix::from_diagonal(&DVector::from_vec(v)), DMatrix::zeros(n, n)).unwrap()
        };
        let inv = diag(vec![1.0, -1.0]).invert_real_part(1e-10).unwrap();
        assert!(max_abs(&(inv - DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])))) < 1e-15);
        let inv = diag(vec![2.0, 4.0]).invert_real_part(1e-10).unwrap();
        assert!(max_abs(&(inv - DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.25])))) < 1e-15);

        let hr = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 5.0]);
        let s = RealImagSplit::from_parts(hr.clone(), DMatrix::zeros(2, 2)).unwrap();
        let inv = s.invert_real_part(1e-10).unwrap();
        assert_eq!(inv, inv.transpose());
        assert!(max_abs(&(&inv * &hr - DMatrix::identity(2, 2))) < 1e-13);
        assert!(max_abs(&(inv - DMatrix::from_row_slice(2, 2, &[5.0, -2.0, -2.0, 1.0]))) < 1e-13);

        match sigma_y().split().invert_real_part(1e-10) {
            Err(Error::SingularRealPart(report)) => assert!(!report.invertible),
            other => panic!("expected SingularRealPart, got {other:?}"),
        }
    }

    #[test]
    fn sigma_y_rotation_into_eigenbasis() {
        let h = sigma_y();
        let rot = h.regularizing_rotation();
        assert!(rot.near_zero.is_empty());
        let rotated = h.change_basis(&rot.unitary).unwrap();
        let s = rotated.split();
        // ascending order: diag(-1, 1)
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0]));
        assert!(max_abs(&(s.h_real() - expected)) < 1e-14);
        assert!(max_abs(s.h_imag()) < 1e-14);
        // phase convention: dominant component (ties -> lowest index) real positive
        for j in 0..2 {
            let col = rot.unitary.column(j);
            assert!(col[0].im.abs() < 1e-15 && col[0].re > 0.0);
        }
    }

    #[test]
    fn diagonal_operator_rotation_is_permutation_of_identity() {
        let h = HermitianOperator::from_real(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0])), 1.0).unwrap();
        let rot = h.regularizing_rotation();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(max_abs(&(rot.unitary.map(|z| z.re) - expected)) < 1e-15);
        assert_eq!(rot.eigenvalues.as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn near_zero_eigenvalues_are_reported() {
        let h = HermitianOperator::from_real(&DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0])), 1.0).unwrap();
        assert_eq!(h.regularizing_rotation().near_zero, vec![0]);
    }

    #[test]
    fn identity_change_of_basis_is_noop() {
        let h = sigma_y();
        let same = h.change_basis(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(same, h);
        let not_unitary = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(h.change_basis(&not_unitary), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn fingerprints_distinguish_hbar_and_entries() {
        let s = sigma_y().split();
        assert_eq!(s.fingerprint(1.0), s.fingerprint(1.0));
        assert_ne!(s.fingerprint(1.0), s.fingerprint(2.0));
        let other = HermitianOperator::from_real(&DMatrix::identity(2, 2), 1.0).unwrap().split();
        assert_ne!(s.fingerprint(1.0), other.fingerprint(1.0));
    }
}

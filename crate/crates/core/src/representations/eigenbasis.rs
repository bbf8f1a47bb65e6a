use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

/// `H = diag(energies)`, real and diagonal, so `H^I = 0`.
pub fn build_eigenbasis_hamiltonian(energies: &[f64], hbar: f64) -> Result<HermitianOperator> {
    if energies.is_empty() {
        return Err(Error::InvalidArgument("eigenbasis Hamiltonian needs at least one energy".into()));
    }
    HermitianOperator::from_real(&DMatrix::from_diagonal(&DVector::from_column_slice(energies)), hbar)
}

/// A Hamiltonian restricted to the orthogonal complement of its (numerical)
/// zero eigenspace.
#[derive(Debug, Clone)]
pub struct SubspaceRestriction {
    pub operator: HermitianOperator,
    /// `N x (N - k)` isometry whose columns span the kept subspace.
    pub isometry: DMatrix<Complex64>,
    /// Eigenvalues that were dropped.
    pub removed: Vec<f64>,
}

impl SubspaceRestriction {
    /// Coordinates of `psi` in the kept subspace.
    pub fn project(&self, psi: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if psi.len() != self.isometry.nrows() {
            return Err(Error::DimensionMismatch { expected: self.isometry.nrows(), found: psi.len() });
        }
        Ok(self.isometry.adjoint() * psi)
    }

    /// Maps reduced coordinates back to the full space.
    pub fn embed(&self, reduced: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if reduced.len() != self.isometry.ncols() {
            return Err(Error::DimensionMismatch { expected: self.isometry.ncols(), found: reduced.len() });
        }
        Ok(&self.isometry * reduced)
    }

    pub fn removed_count(&self) -> usize {
        self.removed.len()
    }
}

/// Removes eigendirections with `|e| <= tol * max|e|`.
///
/// When nothing is removed the operator is returned unchanged with the
/// identity as isometry.
pub fn restrict_nonzero_subspace(h: &HermitianOperator, tol: f64) -> Result<SubspaceRestriction> {
    let n = h.dim();
    let eig = h.eigen();
    let scale = eig.values.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let (kept, removed): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| eig.values[i].abs() > tol * scale);
    if kept.is_empty() {
        return Err(Error::AllZeroSpectrum);
    }
    if removed.is_empty() {
        return Ok(SubspaceRestriction {
            operator: h.clone(),
            isometry: DMatrix::identity(n, n),
            removed: Vec::new(),
        });
    }
    let mut isometry = DMatrix::zeros(n, kept.len());
    for (dst, &src) in kept.iter().enumerate() {
        isometry.set_column(dst, &eig.vectors.column(src));
    }
    let reduced = isometry.adjoint() * h.entries() * &isometry;
    Ok(SubspaceRestriction {
        operator: HermitianOperator::new(reduced, h.hbar())?,
        isometry,
        removed: removed.iter().map(|&i| eig.values[i]).collect(),
    })
}

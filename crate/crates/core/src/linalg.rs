//! Small dense linear-algebra helpers shared across modules.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Largest absolute entry of a real matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest modulus of a complex matrix.
pub fn max_norm_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `(m + m^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `(m - m^T) / 2`.
pub fn antisymmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Eigendecomposition of a real symmetric matrix with eigenvalues in ascending order.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a general real square matrix.
pub fn complex_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    m.clone().complex_eigenvalues().iter().copied().collect()
}

/// Orders eigenvalues by imaginary part, then real part.
///
/// The flows handled here have (numerically) purely imaginary spectra, so
/// the imaginary part is the informative key; round-off in the real parts
/// would otherwise scramble a real-first ordering.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| match a.im.total_cmp(&b.im) {
        Ordering::Equal => a.re.total_cmp(&b.re),
        other => other,
    });
}

/// Max pairwise distance between two spectra after sorting each.
///
/// Returns `f64::INFINITY` when the lengths differ.
pub fn spectrum_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort_spectrum(&mut a);
    sort_spectrum(&mut b);
    a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Euclidean norm of a complex vector.
pub fn norm_c(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_eigen_is_ascending() {
        let m = DMatrix::from_row_slice(3, 3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, vecs) = sym_eigen_sorted(&m);
        assert_eq!(vals.as_slice(), &[-1.0, 2.0, 3.0]);
        let recon = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!(max_abs(&(recon - m)) < 1e-14);
    }

    #[test]
    fn mismatch_ignores_input_order() {
        let a = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        let b = [Complex64::new(0.0, -1.0), Complex64::new(1e-17, 1.0)];
        assert!(spectrum_mismatch(&a, &b) < 1e-16);
        assert!(spectrum_mismatch(&a, &b[..1]).is_infinite());
    }
}

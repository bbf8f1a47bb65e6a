//! Coordinate representation `H = P^2/2m + V(X)` on a periodic grid.
//!
//! Integrals over `x` become `dx`-weighted sums and the Laplacian is the
//! spectral one, so the grid operator `K = V - (hbar^2/2m) Delta` is a dense
//! real symmetric matrix. Its inverse, which the momentum map needs, is
//! non-local; it is formed densely.

use nalgebra::DVector;

use super::grid::{GridSpec, SpectralKernel};
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

pub fn kinetic_kernel(grid: &GridSpec, mass: f64, hbar: f64) -> SpectralKernel {
    let c = hbar * hbar / (2.0 * mass);
    grid.kernel(|k| c * k * k)
}

/// Real symmetric `-(hbar^2/2m) Delta + diag(V)`.
pub fn build_coordinate_hamiltonian(
    grid: &GridSpec,
    potential: &DVector<f64>,
    mass: f64,
    hbar: f64,
) -> Result<HermitianOperator> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
    }
    if potential.len() != grid.n_points() {
        return Err(Error::DimensionMismatch { expected: grid.n_points(), found: potential.len() });
    }
    let mut h = kinetic_kernel(grid, mass, hbar).to_matrix();
    for (j, v) in potential.iter().enumerate() {
        h[(j, j)] += v;
    }
    HermitianOperator::from_real(&h, hbar)
}

/// Discretized field functionals for `psi(x) = phi(x) + i pi(x)`.
#[derive(Debug, Clone)]
pub struct FieldFunctionals {
    grid: GridSpec,
    potential: DVector<f64>,
    mass: f64,
    hbar: f64,
    laplacian: SpectralKernel,
}

impl FieldFunctionals {
    pub fn new(grid: GridSpec, potential: DVector<f64>, mass: f64, hbar: f64) -> Result<Self> {
        if potential.len() != grid.n_points() {
            return Err(Error::DimensionMismatch { expected: grid.n_points(), found: potential.len() });
        }
        Ok(Self { laplacian: grid.laplacian_kernel(), grid, potential, mass, hbar })
    }

    fn potential_term(&self, phi: &DVector<f64>, pi: &DVector<f64>) -> f64 {
        self.potential
            .iter()
            .zip(phi.iter().zip(pi.iter()))
            .map(|(v, (a, b))| v * (a * a + b * b))
            .sum()
    }

    /// `(1/2hbar) sum dx [ -(hbar^2/2m)(phi Lap phi + pi Lap pi) + V (phi^2 + pi^2) ]`.
    pub fn hamiltonian_laplacian_form(&self, phi: &DVector<f64>, pi: &DVector<f64>) -> f64 {
        let kin = -(self.hbar * self.hbar / (2.0 * self.mass))
            * (phi.dot(&self.laplacian.apply(phi)) + pi.dot(&self.laplacian.apply(pi)));
        self.grid.dx() * (kin + self.potential_term(phi, pi)) / (2.0 * self.hbar)
    }

    /// `(1/2hbar) sum dx [ (hbar^2/2m)((d phi)^2 + (d pi)^2) + V (phi^2 + pi^2) ]`,
    /// with the gradient energy taken in Fourier space, where `|i k v_hat|^2`
    /// is well defined for every bin including Nyquist.
    pub fn hamiltonian_gradient_form(&self, phi: &DVector<f64>, pi: &DVector<f64>) -> f64 {
        let grad_sq = self.grid.kernel(|k| k * k);
        let kin = (self.hbar * self.hbar / (2.0 * self.mass)) * (grad_sq.quadratic_form(phi) + grad_sq.quadratic_form(pi));
        self.grid.dx() * (kin + self.potential_term(phi, pi)) / (2.0 * self.hbar)
    }

    /// `sum dx [ -(1/2hbar) phi K phi + (hbar/2) phidot K^{-1} phidot ]`
    /// with `K = V - (hbar^2/2m) Lap`.
    pub fn lagrangian(&self, phi: &DVector<f64>, phidot: &DVector<f64>) -> Result<f64> {
        let k = build_coordinate_hamiltonian(&self.grid, &self.potential, self.mass, self.hbar)?;
        let kmat = k.split().h_real().clone();
        let kinv = k.split().invert_real_part(crate::operator::DEFAULT_INVERTIBILITY_TOL)?;
        let value = -phi.dot(&(&kmat * phi)) / (2.0 * self.hbar) + 0.5 * self.hbar * phidot.dot(&(kinv * phidot));
        Ok(self.grid.dx() * value)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

/// `V(x) = m omega^2 x^2 / 2` sampled on the grid.
pub fn harmonic_potential(grid: &GridSpec, mass: f64, omega: f64) -> DVector<f64> {
    grid.positions().map(|x| 0.5 * mass * omega * omega * x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, sym_eigen_sorted};

    #[test]
    fn free_particle_spectrum_is_symbol() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let h = build_coordinate_hamiltonian(&g, &DVector::zeros(16), 0.7, 1.3).unwrap();
        assert_eq!(max_abs(h.split().h_imag()), 0.0);
        let (vals, _) = sym_eigen_sorted(h.split().h_real());
        let mut expected: Vec<f64> = g.wavenumbers().iter().map(|k| 1.3 * 1.3 * k * k / 1.4).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10 * (1.0 + b), "{a} vs {b}");
        }
    }

    #[test]
    fn harmonic_ground_state() {
        let g = GridSpec::new(256, 32.0).unwrap();
        let v = harmonic_potential(&g, 1.0, 1.0);
        let h = build_coordinate_hamiltonian(&g, &v, 1.0, 1.0).unwrap();
        let e0 = nalgebra::SymmetricEigen::new(h.split().h_real().clone()).eigenvalues.min();
        assert!((e0 - 0.5).abs() / 0.5 < 1e-4, "{e0}");
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let g = GridSpec::new(4, 2.0).unwrap();
        let h0 = build_coordinate_hamiltonian(&g, &DVector::zeros(4), 1.0, 1.0).unwrap();
        let hc = build_coordinate_hamiltonian(&g, &DVector::from_element(4, 0.75), 1.0, 1.0).unwrap();
        let (e0, _) = sym_eigen_sorted(h0.split().h_real());
        let (ec, _) = sym_eigen_sorted(hc.split().h_real());
        assert!((ec - e0).map(|d| d - 0.75).amax() < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = GridSpec::new(8, 2.0).unwrap();
        assert!(build_coordinate_hamiltonian(&g, &DVector::zeros(8), 0.0, 1.0).is_err());
        assert!(build_coordinate_hamiltonian(&g, &DVector::zeros(7), 1.0, 1.0).is_err());
    }

    #[test]
    fn laplacian_and_gradient_forms_agree() {
        let g = GridSpec::new(32, 10.0).unwrap();
        let v = harmonic_potential(&g, 1.0, 0.8);
        let f = FieldFunctionals::new(g, v, 1.2, 0.9).unwrap();
        let x = g.positions();
        // includes a Nyquist component
        let phi = x.map(|x| (-(x * x) / 4.0).exp() * (1.3 * x).cos())
            + DVector::from_fn(32, |j, _| if j % 2 == 0 { 0.01 } else { -0.01 });
        let pi = x.map(|x| 0.3 * (-(x - 1.0) * (x - 1.0)).exp());
        let a = f.hamiltonian_laplacian_form(&phi, &pi);
        let b = f.hamiltonian_gradient_form(&phi, &pi);
        assert!((a - b).abs() < 1e-12 * a.abs(), "{a} vs {b}");
    }
}

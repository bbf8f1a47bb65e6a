use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{LinearStepper, PreparedStep};
use crate::operator::HermitianOperator;

/// `exp(A t)` by scaling-and-squaring Padé (nalgebra's `Matrix::exp`).
pub fn exact_propagator(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    assert!(a.is_square(), "propagator needs a square generator");
    if a.nrows() == 0 {
        return DMatrix::zeros(0, 0);
    }
    (a * t).exp()
}

/// `exp(-i H t / hbar)` from the Hermitian eigendecomposition.
pub fn unitary_propagator(h: &HermitianOperator, t: f64) -> DMatrix<Complex64> {
    let eig = h.eigen();
    let phases = DVector::from_iterator(
        h.dim(),
        eig.values.iter().map(|&e| Complex64::from_polar(1.0, -e * t / h.hbar())),
    );
    &eig.vectors * DMatrix::from_diagonal(&phases) * eig.vectors.adjoint()
}

/// Steps with the exact propagator; used as an oracle method.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactStepper;

impl LinearStepper for ExactStepper {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn order(&self) -> Option<u32> {
        None
    }

    fn stability_limit(&self) -> Option<f64> {
        None
    }

    fn prepare<'a>(&self, a: &'a DMatrix<f64>) -> Box<dyn PreparedStep + 'a> {
        Box::new(PreparedExact { a, cache: Vec::new() })
    }
}

struct PreparedExact<'a> {
    a: &'a DMatrix<f64>,
    // a uniform grid only ever needs the full step and one shortened final step
    cache: Vec<(u64, DMatrix<f64>)>,
}

impl PreparedStep for PreparedExact<'_> {
    fn step(&mut self, y: &DVector<f64>, dt: f64) -> DVector<f64> {
        let key = dt.to_bits();
        let idx = match self.cache.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                self.cache.push((key, exact_propagator(self.a, dt)));
                self.cache.len() - 1
            }
        };
        &self.cache[idx].1 * y
    }
}

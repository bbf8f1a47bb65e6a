use nalgebra::{DMatrix, DVector};

use super::{LinearStepper, PreparedStep};

/// Imaginary-axis stability bound of classical RK4 (`2*sqrt(2)` rounded down).
pub const RK4_IMAGINARY_STABILITY: f64 = 2.8;

/// One classical Runge–Kutta step for `y' = A y`.
pub fn rk4_step(a: &DMatrix<f64>, y: &DVector<f64>, dt: f64) -> DVector<f64> {
    let mut work = Rk4Work::new(y.len());
    work.step(a, y, dt)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4;

impl LinearStepper for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn order(&self) -> Option<u32> {
        Some(4)
    }

    fn stability_limit(&self) -> Option<f64> {
        Some(RK4_IMAGINARY_STABILITY)
    }

    fn prepare<'a>(&self, a: &'a DMatrix<f64>) -> Box<dyn PreparedStep + 'a> {
        Box::new(PreparedRk4 { a, work: Rk4Work::new(a.nrows()) })
    }
}

struct PreparedRk4<'a> {
    a: &'a DMatrix<f64>,
    work: Rk4Work,
}

impl PreparedStep for PreparedRk4<'_> {
    fn step(&mut self, y: &DVector<f64>, dt: f64) -> DVector<f64> {
        self.work.step(self.a, y, dt)
    }
}

struct Rk4Work {
    k1: DVector<f64>,
    k2: DVector<f64>,
    k3: DVector<f64>,
    k4: DVector<f64>,
    tmp: DVector<f64>,
}

impl Rk4Work {
    fn new(n: usize) -> Self {
        Self {
            k1: DVector::zeros(n),
            k2: DVector::zeros(n),
            k3: DVector::zeros(n),
            k4: DVector::zeros(n),
            tmp: DVector::zeros(n),
        }
    }

    fn step(&mut self, a: &DMatrix<f64>, y: &DVector<f64>, dt: f64) -> DVector<f64> {
        self.k1.gemv(1.0, a, y, 0.0);

        self.tmp.copy_from(y);
        self.tmp.axpy(0.5 * dt, &self.k1, 1.0);
        self.k2.gemv(1.0, a, &self.tmp, 0.0);

        self.tmp.copy_from(y);
        self.tmp.axpy(0.5 * dt, &self.k2, 1.0);
        self.k3.gemv(1.0, a, &self.tmp, 0.0);

        self.tmp.copy_from(y);
        self.tmp.axpy(dt, &self.k3, 1.0);
        self.k4.gemv(1.0, a, &self.tmp, 0.0);

        let mut out = y.clone();
        out.axpy(dt / 6.0, &self.k1, 1.0);
        out.axpy(dt / 3.0, &self.k2, 1.0);
        out.axpy(dt / 3.0, &self.k3, 1.0);
        out.axpy(dt / 6.0, &self.k4, 1.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_generator_leaves_state() {
        let y = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        assert_eq!(rk4_step(&DMatrix::zeros(3, 3), &y, 0.1), y);
    }

    #[test]
    fn rotation_step() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let y = rk4_step(&a, &DVector::from_vec(vec![1.0, 0.0]), 0.1);
        assert!((y[0] - 0.1_f64.cos()).abs() <= 1e-7);
        assert!((y[1] + 0.1_f64.sin()).abs() <= 1e-7);
    }

    #[test]
    fn scalar_decay_step() {
        let y = rk4_step(&DMatrix::from_element(1, 1, -1.0), &DVector::from_element(1, 1.0), 0.01);
        assert!((y[0] - (-0.01_f64).exp()).abs() <= 1e-12);
    }
}

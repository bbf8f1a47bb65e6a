use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic 1-D grid on `[-length/2, length/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 4 {
            return Err(Error::InvalidArgument(format!("grid needs at least 4 points, got {n_points}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid length must be positive, got {length}")));
        }
        if !n_points.is_power_of_two() {
            log::debug!("grid size {n_points} is not a power of two");
        }
        Ok(Self { n_points, length })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn positions(&self) -> DVector<f64> {
        let dx = self.dx();
        DVector::from_fn(self.n_points, |j, _| -0.5 * self.length + j as f64 * dx)
    }

    /// Wavenumber of FFT bin `j`: `2 pi m / length` with `m` in
    /// `0, 1, ..., n/2 - 1, -n/2, ..., -1` (Nyquist bin negative).
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n_points as isize;
        let j = j as isize;
        let m = if j < (n + 1) / 2 { j } else { j - n };
        2.0 * PI * m as f64 / self.length
    }

    pub fn wavenumbers(&self) -> DVector<f64> {
        DVector::from_fn(self.n_points, |j, _| self.wavenumber(j))
    }

    /// Diagonal Fourier symbol of `f(k)`.
    pub fn kernel(&self, symbol: impl Fn(f64) -> f64) -> SpectralKernel {
        let wavenumbers = self.wavenumbers();
        let multipliers = wavenumbers.map(symbol);
        SpectralKernel { wavenumbers, multipliers }
    }

    /// The periodic Laplacian, symbol `-k^2`.
    pub fn laplacian_kernel(&self) -> SpectralKernel {
        self.kernel(|k| -k * k)
    }
}

/// A translation-invariant operator given by its Fourier multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralKernel {
    pub wavenumbers: DVector<f64>,
    pub multipliers: DVector<f64>,
}

impl SpectralKernel {
    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    /// Position-space matrix `F^{-1} diag(multipliers) F`.
    ///
    /// The result is circulant; its first column is the inverse DFT of the
    /// multipliers. Symbols used here are even in `k`, so the column is real
    /// and symmetric under `d -> n - d`; both are enforced exactly.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut buf: Vec<Complex64> = self.multipliers.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let column: Vec<f64> = (0..n).map(|d| 0.5 * (buf[d].re + buf[(n - d) % n].re) * scale).collect();
        DMatrix::from_fn(n, n, |a, b| column[(a + n - b) % n])
    }

    /// Applies the operator to a real grid function via FFT.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.len();
        let mut planner = FftPlanner::new();
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut buf);
        for (z, s) in buf.iter_mut().zip(self.multipliers.iter()) {
            *z *= s;
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        DVector::from_iterator(n, buf.iter().map(|z| z.re / n as f64))
    }

    /// `sum_x v(x) (K v)(x)` evaluated in Fourier space: `(1/n) sum_k s(k) |v_hat(k)|^2`.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        let n = self.len();
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        buf.iter().zip(self.multipliers.iter()).map(|(z, s)| s * z.norm_sqr()).sum::<f64>() / n as f64
    }
}

//! Relativistic square-root Hamiltonian on a periodic grid and its
//! Klein–Gordon Lagrangian form.
//!
//! The Fourier symbol is `sqrt(m^2 c^4 + hbar^2 c^2 k^2)`. Squaring it gives
//! `m^2 c^4 - hbar^2 c^2 Lap`, so the second-order equation
//! `qddot = -(H/hbar)^2 q` is the discretized `(1/c^2) phi_tt = Lap phi - (mc/hbar)^2 phi`.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::grid::{GridSpec, SpectralKernel};
use crate::error::{Error, Result};
use crate::integrators::{LinearStepper, Rk4};
use crate::lagrangian::{LagrangianState, LegendreMap};
use crate::operator::{HermitianOperator, DEFAULT_INVERTIBILITY_TOL};

pub fn kg_kernel(grid: &GridSpec, mass: f64, c_light: f64, hbar: f64) -> SpectralKernel {
    let rest = mass * c_light * c_light;
    grid.kernel(|k| (rest * rest + (hbar * c_light * k).powi(2)).sqrt())
}

/// Discretized `m^2 c^4 - hbar^2 c^2 Lap`.
pub fn kg_squared_kernel(grid: &GridSpec, mass: f64, c_light: f64, hbar: f64) -> SpectralKernel {
    let rest = mass * c_light * c_light;
    grid.kernel(|k| rest * rest + (hbar * c_light * k).powi(2))
}

pub fn build_kg_hamiltonian(grid: &GridSpec, mass: f64, c_light: f64, hbar: f64) -> Result<HermitianOperator> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
    }
    if !(c_light > 0.0 && c_light.is_finite()) {
        return Err(Error::InvalidArgument(format!("speed of light must be positive, got {c_light}")));
    }
    HermitianOperator::from_real(&kg_kernel(grid, mass, c_light, hbar).to_matrix(), hbar)
}

/// `E_k / hbar = sqrt(c^2 k^2 + m^2 c^4 / hbar^2)`.
pub fn kg_omega(k: f64, mass: f64, c_light: f64, hbar: f64) -> f64 {
    let rest = mass * c_light * c_light / hbar;
    (c_light * c_light * k * k + rest * rest).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KgDispersion {
    pub k: f64,
    pub omega_measured: f64,
    pub omega_theory: f64,
    /// Number of probe zero crossings the measurement used.
    pub crossings: usize,
}

impl KgDispersion {
    /// `|omega_m^2 - omega_t^2| / omega_t^2`.
    pub fn relative_error_sq(&self) -> f64 {
        (self.omega_measured.powi(2) - self.omega_theory.powi(2)).abs() / self.omega_theory.powi(2)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KgDispersionOptions {
    /// Time step; by default a thousandth of the mode period, capped for
    /// stability of the fastest grid mode.
    pub dt: Option<f64>,
    /// Number of half periods to observe.
    pub half_periods: usize,
}

impl Default for KgDispersionOptions {
    fn default() -> Self {
        Self { dt: None, half_periods: 8 }
    }
}

/// Evolves the standing wave `q(0) = cos(k x)`, `qdot(0) = 0` through the
/// Lagrangian equation and measures its angular frequency from the zero
/// crossings of the probe point `x = 0`.
pub fn kg_dispersion_check(
    grid: &GridSpec,
    mass: f64,
    c_light: f64,
    hbar: f64,
    mode_index: usize,
) -> Result<KgDispersion> {
    kg_dispersion_check_with(grid, mass, c_light, hbar, mode_index, &KgDispersionOptions::default())
}

pub fn kg_dispersion_check_with(
    grid: &GridSpec,
    mass: f64,
    c_light: f64,
    hbar: f64,
    mode_index: usize,
    opts: &KgDispersionOptions,
) -> Result<KgDispersion> {
    let n = grid.n_points();
    if mode_index > n / 2 {
        return Err(Error::InvalidArgument(format!("mode index {mode_index} exceeds Nyquist index {}", n / 2)));
    }
    if opts.half_periods < 2 {
        return Err(Error::InvalidArgument("need at least two half periods".into()));
    }
    let k = 2.0 * PI * mode_index as f64 / grid.length();
    let omega_theory = kg_omega(k, mass, c_light, hbar);

    let h = build_kg_hamiltonian(grid, mass, c_light, hbar)?;
    let map = LegendreMap::new(h.split(), hbar, DEFAULT_INVERTIBILITY_TOL)?;
    let generator = map.system().embed_first_order();

    let k_max = PI / grid.dx();
    let omega_max = kg_omega(k_max, mass, c_light, hbar);
    let period = 2.0 * PI / omega_theory;
    let dt = opts.dt.unwrap_or_else(|| (period / 1000.0).min(0.5 / omega_max));
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let t_end = (opts.half_periods as f64 + 0.75) * 0.5 * period;
    let steps = (t_end / dt).ceil() as usize;

    let x = grid.positions();
    let probe = n / 2; // x = 0
    let q0 = x.map(|x| (k * x).cos());
    let start = LagrangianState::new(q0, DVector::zeros(n), 0.0)?;
    let mut y = start.stacked();

    let mut stepper = Rk4.prepare(&generator);
    let mut crossings = Vec::new();
    let (mut t_prev, mut q_prev, mut v_prev) = (0.0, y[probe], y[n + probe]);
    for step in 1..=steps {
        y = stepper.step(&y, dt);
        let t = step as f64 * dt;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        let (q, v) = (y[probe], y[n + probe]);
        if q == 0.0 || q_prev * q < 0.0 {
            crossings.push(hermite_root(t_prev, q_prev, v_prev, t, q, v));
        }
        t_prev = t;
        q_prev = q;
        v_prev = v;
    }
    if crossings.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "probe crossed zero {} times; cannot measure a period",
            crossings.len()
        )));
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    let omega_measured = PI * (crossings.len() - 1) as f64 / span;
    Ok(KgDispersion { k, omega_measured, omega_theory, crossings: crossings.len() })
}

/// Root of the cubic Hermite interpolant through `(t0, q0, v0)` and
/// `(t1, q1, v1)`, assuming a sign change (or `q1 == 0`).
fn hermite_root(t0: f64, q0: f64, v0: f64, t1: f64, q1: f64, v1: f64) -> f64 {
    if q1 == 0.0 {
        return t1;
    }
    let h = t1 - t0;
    let eval = |s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * q0 + (s3 - 2.0 * s2 + s) * h * v0 + (-2.0 * s3 + 3.0 * s2) * q1 + (s3 - s2) * h * v1
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let positive_at_lo = q0 > 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (eval(mid) > 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    t0 + 0.5 * (lo + hi) * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, sym_eigen_sorted};

    #[test]
    fn rest_energy_at_zero_mode() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let kern = kg_kernel(&g, 2.0, 1.5, 1.0);
        assert!((kern.multipliers[0] - 2.0 * 1.5 * 1.5).abs() < 1e-15);
    }

    #[test]
    fn spectrum_bounded_below_by_rest_energy() {
        let g = GridSpec::new(32, 16.0).unwrap();
        let h = build_kg_hamiltonian(&g, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(max_abs(h.split().h_imag()), 0.0);
        let (vals, _) = sym_eigen_sorted(h.split().h_real());
        assert!(vals.iter().all(|&e| e >= 1.0 - 1e-12));
    }

    #[test]
    fn heavy_mass_is_nearly_rest_energy_times_identity() {
        let g = GridSpec::new(16, 64.0).unwrap();
        // m c^2 / hbar = 1e3, c k_max ~ 0.79
        let h = build_kg_hamiltonian(&g, 1e3, 1.0, 1.0).unwrap();
        let dev = h.split().h_real() - nalgebra::DMatrix::identity(16, 16) * 1e3;
        // first-order correction hbar^2 k^2 / 2m is below 3.1e-4
        assert!(max_abs(&dev) < 4e-4);
    }

    #[test]
    fn zero_mode_oscillates_at_rest_frequency() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let d = kg_dispersion_check(&g, 1.0, 1.0, 1.0, 0).unwrap();
        assert!((d.omega_measured - 1.0).abs() < 1e-8, "{d:?}");
    }

    #[test]
    fn hermite_root_of_line() {
        let t = hermite_root(0.0, 1.0, -1.0, 2.0, -1.0, -1.0);
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mode_index_beyond_nyquist_is_rejected() {
        let g = GridSpec::new(16, 8.0).unwrap();
        assert!(kg_dispersion_check(&g, 1.0, 1.0, 1.0, 9).is_err());
    }
}

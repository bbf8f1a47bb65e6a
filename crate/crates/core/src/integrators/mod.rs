//! Fixed-step time integration of linear systems `y' = A y`.
//!
//! Steppers are trait objects registered by name so a run configuration can
//! pick one at runtime. `rk4` is the production method; `exact` applies the
//! matrix exponential and serves as an oracle.

mod exact;
mod rk4;

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use exact::{exact_propagator, unitary_propagator, ExactStepper};
pub use rk4::{rk4_step, Rk4, RK4_IMAGINARY_STABILITY};

use crate::error::{Error, Result};
use crate::operator::Fingerprint;

/// A time-stepping method for autonomous linear systems.
pub trait LinearStepper: Send + Sync {
    fn name(&self) -> &'static str;

    /// Formal order of accuracy, if the method is approximate.
    fn order(&self) -> Option<u32>;

    /// Largest stable `dt * |lambda|` for purely imaginary eigenvalues.
    fn stability_limit(&self) -> Option<f64>;

    /// Binds the method to a generator, allowing it to cache work buffers or
    /// propagators between steps.
    fn prepare<'a>(&self, a: &'a DMatrix<f64>) -> Box<dyn PreparedStep + 'a>;
}

pub trait PreparedStep {
    fn step(&mut self, y: &DVector<f64>, dt: f64) -> DVector<f64>;
}

/// Name-keyed collection of steppers.
#[derive(Clone)]
pub struct StepperRegistry {
    entries: BTreeMap<&'static str, Arc<dyn LinearStepper>>,
}

impl StepperRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(Rk4));
        reg.register(Arc::new(ExactStepper));
        reg
    }

    /// Adds a stepper, replacing any previous one with the same name.
    pub fn register(&mut self, stepper: Arc<dyn LinearStepper>) {
        self.entries.insert(stepper.name(), stepper);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn LinearStepper>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

impl Default for StepperRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub fingerprint: Option<Fingerprint>,
    pub dt: f64,
    pub method: String,
}

/// Sampled states of a linear flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DVector<f64>>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(meta: TrajectoryMeta) -> Self {
        Self { times: Vec::new(), states: Vec::new(), meta }
    }

    /// Appends a sample; times must increase strictly and dimensions agree.
    pub fn push(&mut self, t: f64, state: DVector<f64>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!("trajectory time {t} does not exceed {last}")));
            }
        }
        if let Some(first) = self.states.first() {
            if first.len() != state.len() {
                return Err(Error::DimensionMismatch { expected: first.len(), found: state.len() });
            }
        }
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DVector<f64>)> {
        self.times.last().copied().zip(self.states.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DVector<f64>)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Width of the state vector, or 0 for an empty trajectory.
    pub fn state_dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }
}

/// Uniform step grid on `[t0, t1]`; the last step is shortened to land on `t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGrid {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub steps: usize,
}

impl StepGrid {
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if !(t1 > t0 && t0.is_finite() && t1.is_finite()) {
            return Err(Error::InvalidArgument(format!("need t1 > t0, got [{t0}, {t1}]")));
        }
        let ratio = (t1 - t0) / dt;
        let nearest = ratio.round();
        let steps = if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as usize
        } else {
            ratio.ceil() as usize
        };
        Ok(Self { t0, t1, dt, steps })
    }

    /// Time after `k` steps.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt
        }
    }

    /// Default sampling stride: at most 1000 intervals per trajectory.
    pub fn default_stride(&self) -> usize {
        self.steps.div_ceil(1000).max(1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct IntegrateOptions {
    /// Record every `sample_every`-th step (the final step is always recorded).
    /// `None` records every step.
    pub sample_every: Option<usize>,
    /// Spectral radius of the generator, if known. When absent and the method
    /// has a stability limit, it is computed from the eigenvalues.
    pub spectral_radius: Option<f64>,
    pub fingerprint: Option<Fingerprint>,
}

/// RK4 over `[t0, t1]`, recording every step.
pub fn integrate(a: &DMatrix<f64>, y0: &DVector<f64>, t0: f64, t1: f64, dt: f64) -> Result<Trajectory> {
    integrate_with(&Rk4, a, y0, &StepGrid::new(t0, t1, dt)?, &IntegrateOptions::default())
}

pub fn integrate_with(
    stepper: &dyn LinearStepper,
    a: &DMatrix<f64>,
    y0: &DVector<f64>,
    grid: &StepGrid,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !a.is_square() || a.nrows() != y0.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: y0.len() });
    }
    if let Some(limit) = stepper.stability_limit() {
        let radius = opts.spectral_radius.unwrap_or_else(|| spectral_radius(a));
        if grid.dt * radius > limit {
            log::warn!(
                "{}: dt * spectral radius = {:.3} exceeds stability limit {limit}; expect blow-up",
                stepper.name(),
                grid.dt * radius
            );
        }
    }
    let stride = opts.sample_every.unwrap_or(1).max(1);
    let mut traj = Trajectory::new(TrajectoryMeta {
        fingerprint: opts.fingerprint,
        dt: grid.dt,
        method: stepper.name().to_string(),
    });
    traj.push(grid.t0, y0.clone())?;

    let mut prepared = stepper.prepare(a);
    let mut y = y0.clone();
    for k in 1..=grid.steps {
        let h = grid.time(k) - grid.time(k - 1);
        y = prepared.step(&y, h);
        let t = grid.time(k);
        if y.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        if k % stride == 0 || k == grid.steps {
            traj.push(t, y.clone())?;
        }
    }
    Ok(traj)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    crate::linalg::complex_eigenvalues(a).iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

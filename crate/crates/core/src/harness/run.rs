//! Config-driven runs: equivalence, spectra, singularity checks and the
//! Klein–Gordon dispersion measurement.

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;

use super::config::{ConfigDocument, OutputKind, RunConfig};
use super::csv::{emit_trajectory, TrajectoryKind};
use super::report::{write_text, EquivalenceReport, KgDispersionReport, SpectrumReport};
use crate::error::{Error, Result};
use crate::hamiltonian::{hamilton_function, PhaseGenerator, RealPhaseState};
use crate::integrators::{integrate_with, IntegrateOptions, StepGrid, StepperRegistry, Trajectory};
use crate::lagrangian::{LagrangianState, LegendreMap};
use crate::linalg::{norm_c, sort_spectrum, spectrum_mismatch};
use crate::operator::{HermitianOperator, InvertibilityReport};
use crate::representations::potential::take_kind;
use crate::representations::source::KleinGordon;
use crate::representations::{
    kg_dispersion_check_with, restrict_nonzero_subspace, GridSpec, KgDispersionOptions, SourceRegistry,
};

/// The Hamiltonian of a run after the optional zero-mode restriction and
/// eigenbasis rotation, with the initial state carried along.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    pub operator: HermitianOperator,
    pub grid: Option<GridSpec>,
    pub psi0: Option<DVector<Complex64>>,
    pub tol: f64,
    /// Eigenvalues dropped by `restrict_zero_modes`.
    pub removed: Vec<f64>,
}

impl PreparedSystem {
    pub fn hbar(&self) -> f64 {
        self.operator.hbar()
    }
}

/// Result of [`Harness::run_equivalence`]. Trajectories are absent when the
/// real part of the Hamiltonian is singular.
#[derive(Debug, Clone)]
pub struct EquivalenceRun {
    pub report: EquivalenceReport,
    pub spectrum: SpectrumReport,
    pub schrodinger: Option<Trajectory>,
    pub lagrangian: Option<Trajectory>,
    pub dim: usize,
}

/// Registries used to resolve the names in a configuration.
#[derive(Clone)]
pub struct Harness {
    pub sources: SourceRegistry,
    pub steppers: StepperRegistry,
}

impl Default for Harness {
    fn default() -> Self {
        Self::new()
    }
}

impl Harness {
    pub fn new() -> Self {
        Self { sources: SourceRegistry::with_builtins(), steppers: StepperRegistry::with_builtins() }
    }

    pub fn prepare(&self, doc: &ConfigDocument) -> Result<PreparedSystem> {
        let cfg = &doc.config;
        let source = self
            .sources
            .create(&cfg.hamiltonian, &doc.base_dir)
            .map_err(|e| doc.locate("hamiltonian", e))?;
        let hbar = resolve_hbar(cfg, source.hbar_hint()).map_err(|e| doc.locate("hamiltonian", e))?;
        let mut operator = source.build(hbar)?;
        let grid = source.grid();
        let mut psi0 = match &cfg.initial_state {
            Some(state) => Some(
                state
                    .resolve(operator.dim(), grid.as_ref())
                    .map_err(|e| doc.locate("initial_state", e))?,
            ),
            None => None,
        };
        let tol = cfg.tolerance();
        let mut removed = Vec::new();

        if cfg.restrict_zero_modes {
            let r = restrict_nonzero_subspace(&operator, tol)?;
            if let Some(psi) = psi0.as_mut() {
                let dropped = norm_c(psi).powi(2) - norm_c(&r.project(psi)?).powi(2);
                if dropped > 1e-12 {
                    log::info!("initial state has weight {dropped:.3e} in the removed zero eigenspace");
                }
                *psi = r.project(psi)?;
            }
            removed = r.removed.clone();
            operator = r.operator;
        }
        if cfg.regularize {
            let rot = operator.regularizing_rotation_with_tol(tol);
            if let Some(psi) = psi0.as_mut() {
                *psi = rot.unitary.adjoint() * &*psi;
            }
            operator = operator.change_basis(&rot.unitary)?;
        }
        Ok(PreparedSystem { operator, grid, psi0, tol, removed })
    }

    pub fn check_singularity(&self, doc: &ConfigDocument) -> Result<InvertibilityReport> {
        let sys = self.prepare(doc)?;
        Ok(sys.operator.split().check_real_part_invertible(sys.tol))
    }

    pub fn run_spectrum_report(&self, doc: &ConfigDocument) -> Result<SpectrumReport> {
        let sys = self.prepare(doc)?;
        Ok(spectra(&sys)?.0)
    }

    pub fn run_equivalence(&self, doc: &ConfigDocument) -> Result<EquivalenceRun> {
        let cfg = &doc.config;
        let sys = self.prepare(doc)?;
        let hbar = sys.hbar();
        let dim = sys.operator.dim();
        let (spectrum, map) = spectra(&sys)?;
        let Some(map) = map else {
            return Ok(EquivalenceRun {
                report: EquivalenceReport::singular(spectrum.singularity.expect("singular path carries a report")),
                spectrum,
                schrodinger: None,
                lagrangian: None,
                dim,
            });
        };

        let psi0 = sys.psi0.as_ref().ok_or_else(|| doc.locate("initial_state", Error::config("missing [initial_state]")))?;
        let [t0, t1] = cfg.t_span.ok_or_else(|| Error::config("t_span: required for run"))?;
        let dt = cfg.dt.ok_or_else(|| Error::config("dt: required for run"))?;
        let grid = StepGrid::new(t0, t1, dt)?;
        let stepper = self.steppers.get(&cfg.method).ok_or_else(|| {
            Error::config(format!(
                "method: unknown integrator {:?} (known: {})",
                cfg.method,
                self.steppers.names().collect::<Vec<_>>().join(", ")
            ))
        })?;

        let split = map.split().clone();
        let generator = PhaseGenerator::build(&split, hbar);
        let system = map.system();
        generator.fingerprint().ensure_same(map.fingerprint())?;

        let radius = sys.operator.eigenvalues().iter().fold(0.0_f64, |m, e| m.max(e.abs())) / hbar;
        let opts = |fp| IntegrateOptions {
            sample_every: Some(grid.default_stride()),
            spectral_radius: Some(radius),
            fingerprint: Some(fp),
        };

        let phi0 = RealPhaseState::from_psi(psi0, t0);
        let kappa0 = map.initial_state(psi0, t0)?;
        let schrodinger =
            integrate_with(stepper.as_ref(), generator.matrix(), &phi0.stacked(), &grid, &opts(generator.fingerprint()))?;
        let lagrangian = integrate_with(
            stepper.as_ref(),
            &system.embed_first_order(),
            &kappa0.stacked(),
            &grid,
            &opts(map.fingerprint()),
        )?;

        let norm0 = phi0.norm_sqr();
        let energy0 = hamilton_function(&phi0, &split, hbar);
        let mut report = EquivalenceReport {
            max_state_deviation: Some(0.0),
            norm_drift: Some(0.0),
            energy_drift: Some(0.0),
            spectrum_mismatch: spectrum.mismatch,
            singularity: None,
        };
        for ((t, s), (_, l)) in schrodinger.iter().zip(lagrangian.iter()) {
            let phase = RealPhaseState::from_stacked(s, t)?;
            let psi_l = map.reconstruct_psi(&LagrangianState::from_stacked(l, t)?);
            let deviation = norm_c(&(phase.to_psi() - psi_l));
            let norm = (phase.norm_sqr() - norm0).abs();
            let energy = (hamilton_function(&phase, &split, hbar) - energy0).abs();
            bump(&mut report.max_state_deviation, deviation);
            bump(&mut report.norm_drift, norm);
            bump(&mut report.energy_drift, energy);
        }
        Ok(EquivalenceRun { report, spectrum, schrodinger: Some(schrodinger), lagrangian: Some(lagrangian), dim })
    }

    pub fn kg_dispersion(&self, doc: &ConfigDocument) -> Result<KgDispersionReport> {
        let cfg = &doc.config;
        let (kind, params) = take_kind(&cfg.hamiltonian, "hamiltonian").map_err(|e| doc.locate("hamiltonian", e))?;
        if kind != "klein_gordon" {
            return Err(doc.locate(
                "hamiltonian",
                Error::config(format!("kg-dispersion needs a klein_gordon hamiltonian, got {kind:?}")),
            ));
        }
        let kg = KleinGordon::from_params(&params).map_err(|e| doc.locate("hamiltonian", e))?;
        let kc = cfg
            .kg_dispersion
            .as_ref()
            .ok_or_else(|| Error::config("missing [kg_dispersion] table with mode_index"))?;
        let mut opts = KgDispersionOptions { dt: kc.dt, ..KgDispersionOptions::default() };
        if let Some(h) = kc.half_periods {
            opts.half_periods = h;
        }
        let hbar = cfg.hbar.unwrap_or(1.0);
        let m = kg_dispersion_check_with(&kg.grid, kg.mass, kg.c_light, hbar, kc.mode_index, &opts)
            .map_err(|e| match e {
                Error::InvalidArgument(msg) => doc.locate("kg_dispersion", Error::config(msg)),
                other => other,
            })?;
        Ok(KgDispersionReport::new(m, kc.tolerance))
    }
}

fn bump(slot: &mut Option<f64>, value: f64) {
    if let Some(v) = slot {
        *v = v.max(value);
    }
}

fn resolve_hbar(cfg: &RunConfig, hint: Option<f64>) -> Result<f64> {
    match (cfg.hbar, hint) {
        (Some(a), Some(b)) if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) => Err(Error::config(format!(
            "hbar = {a} in the config conflicts with hbar = {b} in the matrix file"
        ))),
        (Some(a), _) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Ok(1.0),
    }
}

/// Spectra of both generators; the Legendre map is returned when `H^R` is
/// invertible.
fn spectra(sys: &PreparedSystem) -> Result<(SpectrumReport, Option<LegendreMap>)> {
    let split = sys.operator.split();
    let hbar = sys.hbar();
    let mut phase = PhaseGenerator::build(&split, hbar).eigenvalues();
    sort_spectrum(&mut phase);
    let inv = split.check_real_part_invertible(sys.tol);
    if !inv.invertible {
        let report = SpectrumReport {
            phase_generator: SpectrumReport::pairs(&phase),
            lagrangian_generator: Vec::new(),
            mismatch: None,
            singularity: Some(inv),
        };
        return Ok((report, None));
    }
    let map = LegendreMap::new(split, hbar, sys.tol)?;
    let mut lagr = map.system().eigenvalues();
    sort_spectrum(&mut lagr);
    let report = SpectrumReport {
        mismatch: Some(spectrum_mismatch(&phase, &lagr)),
        phase_generator: SpectrumReport::pairs(&phase),
        lagrangian_generator: SpectrumReport::pairs(&lagr),
        singularity: None,
    };
    Ok((report, Some(map)))
}

/// Writes the requested outputs of a finished run into `dir`.
pub fn write_outputs(run: &EquivalenceRun, outputs: &[OutputKind], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for &kind in outputs {
        let path = dir.join(kind.file_name());
        match kind {
            OutputKind::EquivalenceReport => write_text(&path, &run.report.to_json())?,
            OutputKind::SpectrumReport => write_text(&path, &run.spectrum.to_json())?,
            OutputKind::SchrodingerTrajectory | OutputKind::LagrangianTrajectory => {
                let (traj, flavor) = if kind == OutputKind::SchrodingerTrajectory {
                    (&run.schrodinger, TrajectoryKind::Schrodinger)
                } else {
                    (&run.lagrangian, TrajectoryKind::Lagrangian)
                };
                match traj {
                    Some(t) => emit_trajectory(t, flavor, run.dim, &path)?,
                    None => log::warn!("{}: not written, no trajectory for a singular Hamiltonian", path.display()),
                }
            }
        }
    }
    Ok(())
}

/// [`Harness::run_equivalence`] with the built-in registries, resolving
/// relative paths against the working directory.
pub fn run_equivalence(cfg: &RunConfig) -> Result<EquivalenceRun> {
    Harness::new().run_equivalence(&ConfigDocument::from_config(cfg.clone(), ".")?)
}

pub fn run_spectrum_report(cfg: &RunConfig) -> Result<SpectrumReport> {
    Harness::new().run_spectrum_report(&ConfigDocument::from_config(cfg.clone(), ".")?)
}

//! Run configuration documents (TOML).
//!
//! ```toml
//! hbar = 1.0
//! t_span = [0.0, 10.0]
//! dt = 1e-3
//! method = "rk4"                 # any registered stepper
//! outputs = ["equivalence_report", "schrodinger_trajectory"]
//! regularize = false             # rotate into the Hamiltonian eigenbasis first
//! restrict_zero_modes = false    # drop the zero eigenspace first
//! invertibility_tol = 1e-10      # relative spectral gap for H^R
//!
//! [hamiltonian]
//! kind = "eigenvalues"           # any registered source
//! energies = [1.0, 2.0]
//!
//! [initial_state]
//! kind = "vector"                # or "basis_k" / "gaussian"
//! re = [1.0, 0.0]
//! im = [0.0, 0.0]
//!
//! [thresholds]                   # optional pass/fail limits
//! max_state_deviation = 1e-6
//!
//! [kg_dispersion]                # only read by the kg-dispersion verb
//! mode_index = 4
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::DEFAULT_INVERTIBILITY_TOL;
use crate::representations::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    SchrodingerTrajectory,
    LagrangianTrajectory,
    EquivalenceReport,
    SpectrumReport,
}

impl OutputKind {
    pub fn file_name(self) -> &'static str {
        match self {
            OutputKind::SchrodingerTrajectory => "schrodinger_trajectory.csv",
            OutputKind::LagrangianTrajectory => "lagrangian_trajectory.csv",
            OutputKind::EquivalenceReport => "equivalence_report.json",
            OutputKind::SpectrumReport => "spectrum_report.json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Explicit amplitudes; `im` defaults to zeros.
    Vector {
        re: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        im: Vec<f64>,
        #[serde(default)]
        normalize: bool,
    },
    /// The `k`-th basis vector.
    BasisK { k: usize },
    /// `exp(-(x-x0)^2 / 2 width^2) exp(i k0 x)` on the source grid, unit 2-norm.
    Gaussian { x0: f64, width: f64, k0: f64 },
}

impl InitialState {
    pub fn resolve(&self, dim: usize, grid: Option<&GridSpec>) -> Result<DVector<Complex64>> {
        match self {
            InitialState::Vector { re, im, normalize } => {
                if re.len() != dim || !(im.is_empty() || im.len() == dim) {
                    return Err(Error::config(format!(
                        "initial_state has {} components but the Hamiltonian has dimension {dim}",
                        re.len()
                    )));
                }
                let psi = DVector::from_fn(dim, |j, _| Complex64::new(re[j], im.get(j).copied().unwrap_or(0.0)));
                if *normalize {
                    normalized(psi)
                } else {
                    Ok(psi)
                }
            }
            InitialState::BasisK { k } => {
                if *k >= dim {
                    return Err(Error::config(format!("basis_k index {k} out of range for dimension {dim}")));
                }
                let mut psi = DVector::zeros(dim);
                psi[*k] = Complex64::new(1.0, 0.0);
                Ok(psi)
            }
            InitialState::Gaussian { x0, width, k0 } => {
                let grid = grid.ok_or_else(|| Error::config("gaussian initial state needs a grid-based hamiltonian"))?;
                if !(*width > 0.0) {
                    return Err(Error::config(format!("gaussian width must be positive, got {width}")));
                }
                let psi = grid.positions().map(|x| {
                    let envelope = (-(x - x0).powi(2) / (2.0 * width * width)).exp();
                    Complex64::from_polar(envelope, k0 * x)
                });
                normalized(psi)
            }
        }
    }
}

fn normalized(psi: DVector<Complex64>) -> Result<DVector<Complex64>> {
    let norm = crate::linalg::norm_c(&psi);
    if !(norm > 0.0) {
        return Err(Error::config("initial state has zero norm"));
    }
    Ok(psi / Complex64::new(norm, 0.0))
}

/// Optional pass/fail limits on an equivalence report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_state_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_mismatch: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KgDispersionConfig {
    pub mode_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_periods: Option<usize>,
    /// Limit on `|omega_m^2 - omega_t^2| / omega_t^2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn default_method() -> String {
    "rk4".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_span: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub regularize: bool,
    #[serde(default)]
    pub restrict_zero_modes: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invertibility_tol: Option<f64>,
    pub hamiltonian: toml::Table,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kg_dispersion: Option<KgDispersionConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|span| line_of(text, span));
            Error::config_at(line, e.message().trim().to_string())
        })?;
        cfg.validate().map_err(|e| match e {
            Error::Config { line: None, message } => {
                let line = message
                    .split_once(':')
                    .and_then(|(key, _)| find_key_line(text, key));
                Error::config_at(line, message)
            }
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("cannot serialize config: {e}")))
    }

    /// Checks field-level invariants that serde cannot express.
    ///
    /// Error messages start with the offending key followed by `:`, which
    /// [`RunConfig::parse`] uses to cite a line.
    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.hbar {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::config(format!("hbar: must be positive, got {h}")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::config(format!("dt: must be positive, got {dt}")));
            }
        }
        if let Some([t0, t1]) = self.t_span {
            if !(t1 > t0 && t0.is_finite() && t1.is_finite()) {
                return Err(Error::config(format!("t_span: need t1 > t0, got [{t0}, {t1}]")));
            }
        }
        if let Some(tol) = self.invertibility_tol {
            if !(tol > 0.0) {
                return Err(Error::config(format!("invertibility_tol: must be positive, got {tol}")));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self) -> f64 {
        self.invertibility_tol.unwrap_or(DEFAULT_INVERTIBILITY_TOL)
    }

    pub fn outputs_or_default(&self) -> Vec<OutputKind> {
        if self.outputs.is_empty() {
            vec![OutputKind::EquivalenceReport]
        } else {
            self.outputs.clone()
        }
    }
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    let start = span.start.min(text.len());
    text[..start].matches('\n').count() + 1
}

fn find_key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

/// Line of the `[name]` table header, if present.
pub fn table_line(text: &str, name: &str) -> Option<usize> {
    let header = format!("[{name}]");
    text.lines().position(|l| l.trim() == header).map(|i| i + 1)
}

/// A parsed configuration together with where it came from.
#[derive(Debug, Clone)]
pub struct ConfigDocument {
    pub config: RunConfig,
    pub text: String,
    pub base_dir: PathBuf,
}

impl ConfigDocument {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config = RunConfig::parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, text, base_dir })
    }

    pub fn from_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        Ok(Self { config: RunConfig::parse(text)?, text: text.to_string(), base_dir: base_dir.into() })
    }

    /// Wraps an in-memory config; its serialized form stands in for the text.
    pub fn from_config(config: RunConfig, base_dir: impl Into<PathBuf>) -> Result<Self> {
        config.validate()?;
        let text = config.to_toml_string()?;
        Ok(Self { config, text, base_dir: base_dir.into() })
    }

    /// Attaches the line of the `[table]` header to a line-less config error.
    pub fn locate(&self, table: &str, err: Error) -> Error {
        match err {
            Error::Config { line: None, message } => Error::config_at(table_line(&self.text, table), message),
            other => other,
        }
    }
}

//! Hamiltonian sources selectable by name from a run configuration.
//!
//! Each source kind parses its own parameter table and produces a
//! [`HamiltonianSource`]; the built-ins cover an inline matrix, an energy
//! eigenbasis, the coordinate-grid Schrödinger operator and the
//! Klein–Gordon square-root operator.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Deserialize;

use super::coordinate::build_coordinate_hamiltonian;
use super::eigenbasis::build_eigenbasis_hamiltonian;
use super::grid::GridSpec;
use super::klein_gordon::build_kg_hamiltonian;
use super::potential::{parse_params, take_kind, Potential, PotentialRegistry};
use crate::error::{Error, Result};
use crate::harness::matrix_file::MatrixFile;
use crate::operator::HermitianOperator;

/// Grid defaults for the coordinate and Klein–Gordon sources.
pub const DEFAULT_GRID_POINTS: usize = 128;
pub const DEFAULT_GRID_LENGTH: f64 = 32.0;

/// Something that can produce the Hamiltonian of a run.
pub trait HamiltonianSource: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    fn dim(&self) -> usize;

    /// Spatial grid, for sources that live on one.
    fn grid(&self) -> Option<GridSpec> {
        None
    }

    /// hbar recorded by the source itself (e.g. in a matrix file).
    fn hbar_hint(&self) -> Option<f64> {
        None
    }

    fn build(&self, hbar: f64) -> Result<HermitianOperator>;
}

/// Inputs available to source factories besides their own parameters.
pub struct SourceContext<'a> {
    pub base_dir: &'a Path,
    pub potentials: &'a PotentialRegistry,
}

pub type SourceFactory = dyn Fn(&toml::Table, &SourceContext<'_>) -> Result<Box<dyn HamiltonianSource>> + Send + Sync;

#[derive(Clone)]
pub struct SourceRegistry {
    factories: BTreeMap<String, Arc<SourceFactory>>,
    potentials: PotentialRegistry,
}

impl SourceRegistry {
    pub fn empty(potentials: PotentialRegistry) -> Self {
        Self { factories: BTreeMap::new(), potentials }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty(PotentialRegistry::with_builtins());
        reg.register("inline_matrix", |t, ctx| Ok(Box::new(InlineMatrix::from_params(t, ctx.base_dir)?)));
        reg.register("eigenvalues", |t, _| {
            let p: EigenvalueParams = parse_params(t, "eigenvalues source")?;
            if p.energies.is_empty() {
                return Err(Error::config("eigenvalues source needs at least one energy"));
            }
            Ok(Box::new(Eigenvalues { energies: p.energies }))
        });
        reg.register("coordinate", |t, ctx| Ok(Box::new(Coordinate::from_params(t, ctx)?)));
        reg.register("klein_gordon", |t, _| Ok(Box::new(KleinGordon::from_params(t)?)));
        reg
    }

    pub fn register<F>(&mut self, kind: &str, factory: F)
    where
        F: Fn(&toml::Table, &SourceContext<'_>) -> Result<Box<dyn HamiltonianSource>> + Send + Sync + 'static,
    {
        self.factories.insert(kind.to_string(), Arc::new(factory));
    }

    pub fn potentials_mut(&mut self) -> &mut PotentialRegistry {
        &mut self.potentials
    }

    /// Builds the source named by `table["kind"]`.
    pub fn create(&self, table: &toml::Table, base_dir: &Path) -> Result<Box<dyn HamiltonianSource>> {
        let (kind, params) = take_kind(table, "hamiltonian")?;
        let factory = self.factories.get(&kind).ok_or_else(|| {
            Error::config(format!("unknown hamiltonian kind {kind:?} (known: {})", self.names().join(", ")))
        })?;
        factory(&params, &SourceContext { base_dir, potentials: &self.potentials })
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }
}

impl Default for SourceRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn grid_from(n_points: Option<usize>, length: Option<f64>) -> Result<GridSpec> {
    GridSpec::new(n_points.unwrap_or(DEFAULT_GRID_POINTS), length.unwrap_or(DEFAULT_GRID_LENGTH))
        .map_err(|e| Error::config(e.to_string()))
}

/// A matrix given in the config (`re`, optional `im`) or in a matrix file.
#[derive(Debug, Clone)]
pub struct InlineMatrix {
    pub entries: DMatrix<Complex64>,
    pub hbar: Option<f64>,
    pub source: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineParams {
    file: Option<PathBuf>,
    re: Option<Vec<Vec<f64>>>,
    im: Option<Vec<Vec<f64>>>,
}

impl InlineMatrix {
    fn from_params(table: &toml::Table, base_dir: &Path) -> Result<Self> {
        let p: InlineParams = parse_params(table, "inline_matrix source")?;
        match (p.file, p.re) {
            (Some(file), None) => {
                if p.im.is_some() {
                    return Err(Error::config("inline_matrix: `im` cannot be combined with `file`"));
                }
                let path = base_dir.join(file);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let m = MatrixFile::parse(&text).map_err(|e| match e {
                    Error::Config { line, message } => {
                        Error::config_at(line, format!("{}: {message}", path.display()))
                    }
                    other => other,
                })?;
                Ok(Self { entries: m.entries, hbar: Some(m.hbar), source: Some(path) })
            }
            (None, Some(re)) => {
                let n = re.len();
                let im = p.im.unwrap_or_else(|| vec![vec![0.0; n]; n]);
                if n == 0 || im.len() != n || re.iter().chain(im.iter()).any(|row| row.len() != n) {
                    return Err(Error::config("inline_matrix: `re` and `im` must be square and of equal size"));
                }
                let entries = DMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im[i][j]));
                Ok(Self { entries, hbar: None, source: None })
            }
            _ => Err(Error::config("inline_matrix needs exactly one of `file` or `re`")),
        }
    }
}

impl HamiltonianSource for InlineMatrix {
    fn kind(&self) -> &'static str {
        "inline_matrix"
    }

    fn dim(&self) -> usize {
        self.entries.nrows()
    }

    fn hbar_hint(&self) -> Option<f64> {
        self.hbar
    }

    fn build(&self, hbar: f64) -> Result<HermitianOperator> {
        HermitianOperator::new(self.entries.clone(), hbar)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EigenvalueParams {
    energies: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Eigenvalues {
    pub energies: Vec<f64>,
}

impl HamiltonianSource for Eigenvalues {
    fn kind(&self) -> &'static str {
        "eigenvalues"
    }

    fn dim(&self) -> usize {
        self.energies.len()
    }

    fn build(&self, hbar: f64) -> Result<HermitianOperator> {
        build_eigenbasis_hamiltonian(&self.energies, hbar)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoordinateParams {
    n_points: Option<usize>,
    length: Option<f64>,
    mass: f64,
    potential: Option<toml::Table>,
}

#[derive(Debug)]
pub struct Coordinate {
    pub grid: GridSpec,
    pub mass: f64,
    pub potential: Box<dyn Potential>,
}

impl Coordinate {
    fn from_params(table: &toml::Table, ctx: &SourceContext<'_>) -> Result<Self> {
        let p: CoordinateParams = parse_params(table, "coordinate source")?;
        let grid = grid_from(p.n_points, p.length)?;
        let potential = match p.potential {
            Some(t) => ctx.potentials.create(&t, ctx.base_dir)?,
            None => Box::new(super::potential::ZeroPotential),
        };
        Ok(Self { grid, mass: p.mass, potential })
    }

    pub fn sampled_potential(&self) -> Result<DVector<f64>> {
        self.potential.sample(&self.grid, self.mass)
    }
}

impl HamiltonianSource for Coordinate {
    fn kind(&self) -> &'static str {
        "coordinate"
    }

    fn dim(&self) -> usize {
        self.grid.n_points()
    }

    fn grid(&self) -> Option<GridSpec> {
        Some(self.grid)
    }

    fn build(&self, hbar: f64) -> Result<HermitianOperator> {
        build_coordinate_hamiltonian(&self.grid, &self.sampled_potential()?, self.mass, hbar)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KleinGordonParams {
    n_points: Option<usize>,
    length: Option<f64>,
    mass: f64,
    #[serde(default = "unit")]
    c: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy)]
pub struct KleinGordon {
    pub grid: GridSpec,
    pub mass: f64,
    pub c_light: f64,
}

impl KleinGordon {
    /// Parses a `klein_gordon` parameter table (without the `kind` key).
    pub fn from_params(table: &toml::Table) -> Result<Self> {
        let p: KleinGordonParams = parse_params(table, "klein_gordon source")?;
        Ok(Self { grid: grid_from(p.n_points, p.length)?, mass: p.mass, c_light: p.c })
    }
}

impl HamiltonianSource for KleinGordon {
    fn kind(&self) -> &'static str {
        "klein_gordon"
    }

    fn dim(&self) -> usize {
        self.grid.n_points()
    }

    fn grid(&self) -> Option<GridSpec> {
        Some(self.grid)
    }

    fn build(&self, hbar: f64) -> Result<HermitianOperator> {
        build_kg_hamiltonian(&self.grid, self.mass, self.c_light, hbar)
    }
}

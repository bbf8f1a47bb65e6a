//! Named potentials for the coordinate representation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// A potential `V(x)` that can be sampled on a grid.
pub trait Potential: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn sample(&self, grid: &GridSpec, mass: f64) -> Result<DVector<f64>>;
}

pub type PotentialFactory = dyn Fn(&toml::Table, &Path) -> Result<Box<dyn Potential>> + Send + Sync;

/// Potentials keyed by the `kind` string used in run configurations.
#[derive(Clone)]
pub struct PotentialRegistry {
    factories: BTreeMap<String, Arc<PotentialFactory>>,
}

impl PotentialRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("zero", |t, _| {
            let ZeroParams {} = parse_params(t, "zero potential")?;
            Ok(Box::new(ZeroPotential))
        });
        reg.register("harmonic", |t, _| Ok(Box::new(parse_params::<Harmonic>(t, "harmonic potential")?)));
        reg.register("square_well", |t, _| Ok(Box::new(parse_params::<SquareWell>(t, "square_well potential")?)));
        reg.register("table", |t, base| Tabulated::from_params(t, base).map(|p| Box::new(p) as Box<dyn Potential>));
        reg
    }

    pub fn register<F>(&mut self, kind: &str, factory: F)
    where
        F: Fn(&toml::Table, &Path) -> Result<Box<dyn Potential>> + Send + Sync + 'static,
    {
        self.factories.insert(kind.to_string(), Arc::new(factory));
    }

    /// Builds the potential named by `table["kind"]`; relative file paths
    /// resolve against `base_dir`.
    pub fn create(&self, table: &toml::Table, base_dir: &Path) -> Result<Box<dyn Potential>> {
        let (kind, params) = take_kind(table, "potential")?;
        let factory = self.factories.get(&kind).ok_or_else(|| {
            Error::config(format!("unknown potential kind {kind:?} (known: {})", self.names().join(", ")))
        })?;
        factory(&params, base_dir)
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }
}

impl Default for PotentialRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Splits `kind` off a parameter table.
pub(crate) fn take_kind(table: &toml::Table, what: &str) -> Result<(String, toml::Table)> {
    let mut params = table.clone();
    match params.remove("kind") {
        Some(toml::Value::String(kind)) => Ok((kind, params)),
        Some(other) => Err(Error::config(format!("{what} kind must be a string, got {other}"))),
        None => Err(Error::config(format!("{what} is missing a `kind` key"))),
    }
}

pub(crate) fn parse_params<T: DeserializeOwned>(table: &toml::Table, what: &str) -> Result<T> {
    toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e| Error::config(format!("{what}: {}", e.message())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroParams {}

#[derive(Debug, Clone, Copy)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn name(&self) -> &'static str {
        "zero"
    }

    fn sample(&self, grid: &GridSpec, _mass: f64) -> Result<DVector<f64>> {
        Ok(DVector::zeros(grid.n_points()))
    }
}

/// `V(x) = m omega^2 x^2 / 2`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub omega: f64,
}

impl Potential for Harmonic {
    fn name(&self) -> &'static str {
        "harmonic"
    }

    fn sample(&self, grid: &GridSpec, mass: f64) -> Result<DVector<f64>> {
        Ok(super::coordinate::harmonic_potential(grid, mass, self.omega))
    }
}

/// `V(x) = -depth` for `|x| < width/2`, zero elsewhere.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareWell {
    pub depth: f64,
    pub width: f64,
}

impl Potential for SquareWell {
    fn name(&self) -> &'static str {
        "square_well"
    }

    fn sample(&self, grid: &GridSpec, _mass: f64) -> Result<DVector<f64>> {
        if !(self.width > 0.0) {
            return Err(Error::config(format!("square_well width must be positive, got {}", self.width)));
        }
        Ok(grid.positions().map(|x| if x.abs() < 0.5 * self.width { -self.depth } else { 0.0 }))
    }
}

/// Tabulated `(x, V)` pairs; the `x` column must coincide with the grid.
#[derive(Debug, Clone)]
pub struct Tabulated {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub source: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableParams {
    file: Option<PathBuf>,
    values: Option<Vec<f64>>,
}

impl Tabulated {
    fn from_params(table: &toml::Table, base_dir: &Path) -> Result<Self> {
        let p: TableParams = parse_params(table, "table potential")?;
        match (p.file, p.values) {
            (Some(file), None) => {
                let path = base_dir.join(file);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let mut t = Self::parse(&text)?;
                t.source = Some(path);
                Ok(t)
            }
            (None, Some(values)) => Ok(Self { x: Vec::new(), v: values, source: None }),
            _ => Err(Error::config("table potential needs exactly one of `file` or `values`")),
        }
    }

    /// Two numeric columns per line (whitespace or comma separated); `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut x = Vec::new();
        let mut v = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if fields.len() != 2 {
                return Err(Error::config_at(Some(idx + 1), format!("expected two columns, found {}", fields.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::config_at(Some(idx + 1), format!("not a number: {s:?}")))
            };
            x.push(parse(fields[0])?);
            v.push(parse(fields[1])?);
        }
        Ok(Self { x, v, source: None })
    }
}

impl Potential for Tabulated {
    fn name(&self) -> &'static str {
        "table"
    }

    fn sample(&self, grid: &GridSpec, _mass: f64) -> Result<DVector<f64>> {
        if self.v.len() != grid.n_points() {
            return Err(Error::config(format!(
                "potential table has {} rows but the grid has {} points",
                self.v.len(),
                grid.n_points()
            )));
        }
        if !self.x.is_empty() {
            let tol = 1e-9 * grid.length();
            for (j, (xt, xg)) in self.x.iter().zip(grid.positions().iter()).enumerate() {
                if (xt - xg).abs() > tol {
                    return Err(Error::config(format!("potential table row {}: x = {xt} but grid point is {xg}", j + 1)));
                }
            }
        }
        Ok(DVector::from_column_slice(&self.v))
    }
}

//! Trajectory CSV output.
//!
//! One header line, then one row per sample: `t` followed by the `2N` state
//! components. Values use `{:.16e}` (17 significant digits), so files are
//! byte-identical across runs of the same build and config.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrators::Trajectory;

/// Which half-state label the second block of columns gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    /// `(q, p)` columns.
    Schrodinger,
    /// `(q, qdot)` columns.
    Lagrangian,
}

impl TrajectoryKind {
    fn second(self) -> &'static str {
        match self {
            TrajectoryKind::Schrodinger => "p",
            TrajectoryKind::Lagrangian => "qdot",
        }
    }
}

pub fn header(kind: TrajectoryKind, dim: usize) -> String {
    let mut h = String::from("t");
    for i in 1..=dim {
        write!(h, ",q_{i}").unwrap();
    }
    for i in 1..=dim {
        write!(h, ",{}_{i}", kind.second()).unwrap();
    }
    h
}

/// Writes `traj` (states of length `2 * dim`) as CSV.
pub fn write_trajectory<W: Write>(traj: &Trajectory, kind: TrajectoryKind, dim: usize, mut out: W) -> Result<()> {
    if let Some((_, s)) = traj.last() {
        if s.len() != 2 * dim {
            return Err(Error::DimensionMismatch { expected: 2 * dim, found: s.len() });
        }
    }
    let mut text = header(kind, dim);
    text.push('\n');
    for (t, state) in traj.iter() {
        write!(text, "{t:.16e}").unwrap();
        for x in state.iter() {
            write!(text, ",{x:.16e}").unwrap();
        }
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<trajectory>", e))
}

pub fn emit_trajectory(traj: &Trajectory, kind: TrajectoryKind, dim: usize, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_trajectory(traj, kind, dim, &mut buf).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    buf.flush().map_err(|e| Error::io(path, e))
}

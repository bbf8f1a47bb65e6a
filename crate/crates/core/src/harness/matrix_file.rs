//! Plain-text Hamiltonian matrices.
//!
//! ```text
//! # sigma_y in the sigma_z eigenbasis
//! dim 2
//! hbar 1.0
//! 0,0  0,-1
//! 0,1  0,0
//! ```
//!
//! * `#` starts a comment; blank lines are ignored.
//! * `dim <int>` and `hbar <real>` must appear (in either order, key and
//!   value separated by whitespace, `=` or `:`) before the first row.
//! * Then exactly `dim` rows follow. Each row holds `dim` entries written as
//!   `re,im`; entries are separated by whitespace, `;` or further commas, so
//!   a row is read as `2*dim` numbers taken pairwise.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub hbar: f64,
    pub entries: DMatrix<Complex64>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim: Option<(usize, usize)> = None;
        let mut hbar: Option<f64> = None;
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            last_line = lineno;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = header(line) {
                if !rows.is_empty() {
                    return Err(Error::config_at(Some(lineno), format!("`{key}` after matrix rows")));
                }
                match key {
                    "dim" => {
                        if dim.is_some() {
                            return Err(Error::config_at(Some(lineno), "duplicate `dim`"));
                        }
                        let n: usize = value
                            .parse()
                            .map_err(|_| Error::config_at(Some(lineno), format!("invalid dim {value:?}")))?;
                        if n == 0 {
                            return Err(Error::config_at(Some(lineno), "dim must be at least 1"));
                        }
                        dim = Some((n, lineno));
                    }
                    _ => {
                        if hbar.is_some() {
                            return Err(Error::config_at(Some(lineno), "duplicate `hbar`"));
                        }
                        let h: f64 = value
                            .parse()
                            .map_err(|_| Error::config_at(Some(lineno), format!("invalid hbar {value:?}")))?;
                        if !(h > 0.0 && h.is_finite()) {
                            return Err(Error::config_at(Some(lineno), "hbar must be positive"));
                        }
                        hbar = Some(h);
                    }
                }
                continue;
            }
            let Some((n, _)) = dim else {
                return Err(Error::config_at(Some(lineno), "matrix row before `dim`"));
            };
            if hbar.is_none() {
                return Err(Error::config_at(Some(lineno), "matrix row before `hbar`"));
            }
            if rows.len() == n {
                return Err(Error::config_at(Some(lineno), format!("more than {n} rows")));
            }
            let numbers = line
                .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| Error::config_at(Some(lineno), format!("not a number: {s:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            if numbers.len() != 2 * n {
                return Err(Error::config_at(
                    Some(lineno),
                    format!("expected {n} re,im pairs ({} numbers), found {} numbers", 2 * n, numbers.len()),
                ));
            }
            rows.push(numbers.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
        }

        let (n, _) = dim.ok_or_else(|| Error::config_at(None, "missing `dim`"))?;
        let hbar = hbar.ok_or_else(|| Error::config_at(None, "missing `hbar`"))?;
        if rows.len() != n {
            return Err(Error::config_at(Some(last_line.max(1)), format!("expected {n} rows, found {}", rows.len())));
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(Self { hbar, entries })
    }

    /// Writes the format read by [`MatrixFile::parse`], with enough digits to
    /// round-trip every `f64`.
    pub fn render(&self) -> String {
        let n = self.entries.nrows();
        let mut out = String::new();
        writeln!(out, "dim {n}").unwrap();
        writeln!(out, "hbar {:?}", self.hbar).unwrap();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    let z = self.entries[(i, j)];
                    format!("{:?},{:?}", z.re, z.im)
                })
                .collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }
}

fn header(line: &str) -> Option<(&'static str, &str)> {
    let end = line.find(|c: char| c.is_whitespace() || c == '=' || c == ':').unwrap_or(line.len());
    let key = match &line[..end] {
        "dim" => "dim",
        "hbar" => "hbar",
        _ => return None,
    };
    let rest = line[end..].trim_start();
    let rest = rest.strip_prefix(['=', ':']).unwrap_or(rest);
    Some((key, rest.trim()))
}

//! Structured run reports and their JSON form.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::Thresholds;
use crate::error::{Error, Result};
use crate::operator::InvertibilityReport;
use crate::representations::KgDispersion;

/// Agreement between the Schrödinger and Lagrangian evolutions of one run.
///
/// Every key is always written; absent values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Largest `||psi_S(t) - psi_L(t)||_2` over the sampled times.
    pub max_state_deviation: Option<f64>,
    /// Largest `|sum(q^2 + p^2)(t) - sum(q^2 + p^2)(t0)|` along the Schrödinger run.
    pub norm_drift: Option<f64>,
    /// Largest `|H(q, p)(t) - H(q, p)(t0)|` along the Schrödinger run.
    pub energy_drift: Option<f64>,
    /// Largest distance between the sorted spectra of the two generators.
    pub spectrum_mismatch: Option<f64>,
    pub singularity: Option<InvertibilityReport>,
}

impl EquivalenceReport {
    pub fn singular(report: InvertibilityReport) -> Self {
        Self { singularity: Some(report), ..Self::default() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One entry per configured threshold. A threshold on a missing value fails.
    pub fn check(&self, thresholds: &Thresholds) -> Vec<ThresholdCheck> {
        let pairs = [
            ("max_state_deviation", thresholds.max_state_deviation, self.max_state_deviation),
            ("norm_drift", thresholds.norm_drift, self.norm_drift),
            ("energy_drift", thresholds.energy_drift, self.energy_drift),
            ("spectrum_mismatch", thresholds.spectrum_mismatch, self.spectrum_mismatch),
        ];
        pairs
            .into_iter()
            .filter_map(|(name, limit, value)| {
                limit.map(|limit| ThresholdCheck {
                    name,
                    limit,
                    value,
                    passed: value.is_some_and(|v| v <= limit),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCheck {
    pub name: &'static str,
    pub limit: f64,
    pub value: Option<f64>,
    pub passed: bool,
}

/// Sorted spectra of the phase-space generator and of the first-order
/// embedding of the Lagrangian system, as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub phase_generator: Vec<[f64; 2]>,
    pub lagrangian_generator: Vec<[f64; 2]>,
    pub mismatch: Option<f64>,
    pub singularity: Option<InvertibilityReport>,
}

impl SpectrumReport {
    pub fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
        values.iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgDispersionReport {
    #[serde(flatten)]
    pub measurement: KgDispersion,
    pub relative_error_sq: f64,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl KgDispersionReport {
    pub fn new(measurement: KgDispersion, tolerance: Option<f64>) -> Self {
        let relative_error_sq = measurement.relative_error_sq();
        let passed = tolerance.is_none_or(|tol| relative_error_sq <= tol);
        Self { measurement, relative_error_sq, tolerance, passed }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

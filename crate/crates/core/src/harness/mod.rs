//! Configuration, run orchestration and file output.

pub mod config;
pub mod csv;
pub mod matrix_file;
pub mod report;
pub mod run;

pub use config::{ConfigDocument, InitialState, KgDispersionConfig, OutputKind, RunConfig, Thresholds};
pub use csv::{emit_trajectory, write_trajectory, TrajectoryKind};
pub use matrix_file::MatrixFile;
pub use report::{EquivalenceReport, KgDispersionReport, SpectrumReport, ThresholdCheck};
pub use run::{run_equivalence, run_spectrum_report, write_outputs, EquivalenceRun, Harness, PreparedSystem};

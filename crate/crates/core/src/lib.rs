//! Second-order (Lagrangian) form of the Schrödinger equation.
//!
//! A Hermitian Hamiltonian `H = H^R + i H^I` acting on `psi = q + i p`
//! generates a real linear flow on `(q, p)`. When `H^R` is invertible the
//! momenta can be eliminated, leaving the second-order system
//! `qddot = L1 qdot + L0 q` that follows from a quadratic Lagrangian.
//!
//! * [`operator`]: Hermitian operators, the real/imaginary split and the
//!   invertibility test on `H^R`.
//! * [`hamiltonian`]: the real phase-space flow and Hamilton's function.
//! * [`lagrangian`]: the Legendre map, Lagrangian coefficients and the
//!   second-order system.
//! * [`integrators`]: fixed-step RK4, exact propagators and a stepper registry.
//! * [`representations`]: eigenbasis, coordinate-grid and Klein–Gordon
//!   Hamiltonians.
//! * [`harness`]: TOML run configurations, reports and CSV output.
//!
//! ```
//! use qlagrange::{build_eigenbasis_hamiltonian, LegendreMap, PhaseGenerator};
//!
//! let h = build_eigenbasis_hamiltonian(&[1.0, 2.0], 1.0).unwrap();
//! let map = LegendreMap::new(h.split(), 1.0, 1e-10).unwrap();
//! let system = map.system();
//! assert!((system.l0[(1, 1)] + 4.0).abs() < 1e-12);
//! let g = PhaseGenerator::build(&h.split(), 1.0);
//! assert_eq!(g.matrix().nrows(), 4);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod integrators;
pub mod lagrangian;
pub mod linalg;
pub mod operator;
pub mod representations;
mod serde_util;

pub use error::{Error, Result};
pub use hamiltonian::{hamilton_function, PhaseGenerator, RealPhaseState};
pub use harness::{run_equivalence, run_spectrum_report, EquivalenceReport, Harness, RunConfig};
pub use integrators::{exact_propagator, integrate, integrate_with, LinearStepper, StepperRegistry, Trajectory};
pub use lagrangian::{LagrangianCoeffs, LagrangianState, LagrangianSystem, LegendreMap};
pub use operator::{
    Fingerprint, HermitianOperator, InvertibilityReport, RealImagSplit, RegularizingRotation,
    DEFAULT_INVERTIBILITY_TOL,
};
pub use representations::{build_coordinate_hamiltonian, build_eigenbasis_hamiltonian, build_kg_hamiltonian, GridSpec};

//! Concrete Hamiltonians: energy eigenbasis, coordinate grid and the
//! Klein–Gordon square-root operator, plus the name-keyed source and
//! potential registries used by run configurations.

pub mod coordinate;
pub mod eigenbasis;
pub mod grid;
pub mod klein_gordon;
pub mod potential;
pub mod source;

pub use coordinate::{build_coordinate_hamiltonian, harmonic_potential, FieldFunctionals};
pub use eigenbasis::{build_eigenbasis_hamiltonian, restrict_nonzero_subspace, SubspaceRestriction};
pub use grid::{GridSpec, SpectralKernel};
pub use klein_gordon::{
    build_kg_hamiltonian, kg_dispersion_check, kg_dispersion_check_with, kg_omega, KgDispersion, KgDispersionOptions,
};
pub use potential::{Potential, PotentialRegistry};
pub use source::{HamiltonianSource, SourceRegistry};

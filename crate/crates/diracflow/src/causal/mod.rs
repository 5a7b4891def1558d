//! The general causal-interpretation pipeline on a discretized
//! configuration space: functional basis, projected Hamiltonian, drift,
//! source, Poisson-sourced equivariance correction, field trajectories
//! and sector effectivities.

pub mod basis;
pub mod effectivity;
pub mod grid;
pub mod pipeline;
pub mod trajectory;

pub use basis::{build_functional_basis, FunctionalBasis, ProjectedHamiltonian};
pub use effectivity::{sector_effectivities, SectorEffectivity};
pub use grid::{oscillator_fn, ConfigGrid};
pub use pipeline::{CausalFieldState, CausalPipeline};
pub use trajectory::{
    field_equivariance_test, integrate_field, integrate_field_ensemble, FieldStatus,
    FieldTrajectory,
};

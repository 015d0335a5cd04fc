//! The coupled system: parameters, nonlinearity, conserved functionals,
//! exponent algebra, scaling and the bootstrap checker.

pub mod bootstrap;
pub mod exponents;
pub mod functionals;
mod params;
mod scaling;

pub use bootstrap::{bootstrap_check, fit_offset, BootstrapVerdict};
pub use exponents::{
    classify_exponent, critical_index, is_admissible, strichartz_pair, Criticality,
    CriticalityTag, Exponent, ScalingKind,
};
pub use functionals::{energy, gradient_energy, mass, masses, nonlinearity, phase_rates, potential_energy, xi};
pub use params::{CouplingMatrix, ModelParams, SystemState};
pub use scaling::rescale_initial_data;

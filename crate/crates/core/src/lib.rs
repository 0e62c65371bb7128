//! Second-order ground-state entanglement between two detectors coupled to a
//! scalar field, in free space, between Dirichlet plates, in a classical
//! potential and in a thermal state.

pub mod dirichlet;
pub mod error;
pub mod numerics;
pub mod freefield;
pub mod perturbative;
pub mod potential;
pub mod thermal;
pub mod verifier;

pub use error::{Error, Result};
pub use perturbative::{
    adiabatic_rate_bound, assemble_rho_a, exact_negativity, k_from_negativity, matrix_elements_discrete,
    negativity, DetectorPair, ModeModel, ReducedElements, RhoA,
};

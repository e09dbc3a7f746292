//! Quantum Fisher information of multipartite qudit states under local
//! random-Hamiltonian noise.
//!
//! The crate computes mean QFI over Hamiltonian ensembles, exact and Monte
//! Carlo fidelity decay under collective and non-collective noise, and the
//! Mandelstam–Tamm style fidelity bound that links the two.

pub mod channels;
pub mod commands;
mod csvfmt;
pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod mc;
pub mod qfi;
pub mod states;
pub mod stats;

pub use error::{Error, Result};

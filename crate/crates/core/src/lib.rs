//! Exact-dynamics simulation of spin-1/2 chains for connector-operator
//! quantum simulation.
//!
//! The crate builds collective-spin and nearest-neighbour chain
//! Hamiltonians on the full `2^N` space, propagates states exactly
//! (dense eigendecomposition or Lanczos), and provides the diagnostics
//! needed to judge when one Hamiltonian reproduces the dynamics of
//! another: the connector operator and its phase `xi(t)`, fidelities,
//! frame transforms, Trotter product formulas and quantum-kick schedules.
//!
//! Basis convention: site 1 is the most significant bit of the basis
//! index, and bit value 0 is spin up (`sigma_z = +1`).

pub mod connector;
pub mod dense;
pub mod digital;
pub mod error;
pub mod evolution;
pub mod hamiltonians;
pub mod io;
pub mod observables;
pub mod spin_algebra;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use spin_algebra::{
    coherent_x_state, collective_spin, ghz_state, op_combine, pauli_site, Axis, HilbertSpace,
    Operator, SparseMatrix, StateVector,
};

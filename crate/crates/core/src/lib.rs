//! Simulation of multi-qubit controlled-phase-flip gates built from the
//! resonant interaction of three-level atoms with one cavity mode, and of the
//! ancilla-free Deutsch-Jozsa algorithm assembled from them.
//!
//! * [`hilbert`]: atoms-plus-mode state space, embeddings, excitation blocks.
//! * [`dynamics`]: Hamiltonian with cavity decay and dipole terms, evolution.
//! * [`gates`]: native and conjugated CPF gates, closed-form coefficients.
//! * [`oracles`]: promised boolean functions and their CPF decompositions.
//! * [`dj`]: ideal and physical circuit runs, fidelities, classification.
//! * [`lab`]: parameter sweeps, feasibility arithmetic, coupling geometry.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dj;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod gates;
pub mod hilbert;
pub mod lab;
pub mod oracles;

pub use error::{Error, Result};

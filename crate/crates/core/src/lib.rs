//! Non-adiabatic holonomic gate of a spin-3/2 quadrupole nucleus in a
//! rotating magnetic field.
//!
//! The field, tilted by θ and rotating about z at ω₁, becomes static in the
//! co-rotating frame. Diagonalizing that static Hamiltonian gives a
//! time-independent gauge potential `A` and a closed-form lab propagator
//! `(T·w)·exp(−iω₁t·A)·exp(−i·h_d·t)·(T·w)†`. The [`oracle`] module checks it
//! against direct RK4 integration of the lab Schrödinger equation.
//!
//! Basis order everywhere: (|3/2⟩, |−3/2⟩, |1/2⟩, |−1/2⟩).

// `!(x <= tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod cli;
pub mod config;
pub mod errata;
pub mod error;
pub mod holonomy;
pub mod linalg;
pub mod oracle;
pub mod spin;
pub mod sweep;
pub mod verify;

pub use chain::{diagonalize, DiagChain};
pub use error::{Error, Result};
pub use holonomy::{characterize_gate, gate, ConnectionForm, GateResult, MixingReport};
pub use linalg::{Complex, ComplexMat4, Tolerances};
pub use oracle::{integrate_lab, IntegratorConfig, PropagationResult};
pub use spin::{ModelParams, SpinOps};

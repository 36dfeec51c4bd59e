//! Optimal ancilla preparation and exact success-probability bounds for the
//! high-fidelity variant of KLM linear-optical teleportation.
//!
//! The crate is split into four layers:
//!
//! - [`eigen`]: the tridiagonal matrices whose top eigenpair gives the optimal
//!   ancilla coefficients and the bound `λ_n = ½ + ½·cos(π/(n+1))`.
//! - [`analytic`]: closed-form outcome probabilities, teleported states and
//!   expected squared fidelities for any input qubit and coefficient profile.
//! - [`fock`]: a brute-force multimode Fock-space simulation of the protocol
//!   (ancilla, Fourier interferometer, photon counting) used as an oracle for
//!   the closed forms. Transition amplitudes come from [`permanent`].
//! - [`cli`]: table rendering and the `klm-hifi` command-line front end.

pub mod analytic;
pub mod cli;
pub mod eigen;
mod error;
pub mod fock;
pub mod permanent;

pub use analytic::{OutcomeReport, QubitState};
pub use eigen::{CoefficientProfile, EigenPair, SymTridiagonal};
pub use error::{Error, Result};
pub use fock::{FockState, MeasurementRecord, ModeUnitary, OccupationVector};

//! Numerically exact simulation of two qubits coupled to a common lossy
//! cavity mode, and the correlation analysis (mutual information,
//! classical correlation, quantum discord) of the reduced two-qubit state.
//!
//! The crate is organized bottom-up:
//!
//! - [`operator_algebra`]: dense complex matrices, Kronecker products,
//!   partial traces, Hermitian eigendecomposition, entropies.
//! - [`model`]: Hamiltonian, Lindblad generator and initial states.
//! - [`integrator`]: fixed-step RK4 trajectories and the analytic
//!   single-excitation solution.
//! - [`correlations`]: measurement-optimized classical correlation and
//!   discord.
//! - [`scenario`]: scenario configuration, CSV output, parameter sweeps.

pub mod correlations;
pub mod error;
pub mod integrator;
pub mod model;
pub mod operator_algebra;
pub mod scenario;

pub use error::{Error, Result};

//! Entanglement dynamics of N-qubit GHZ states under local noisy channels.
//!
//! Density matrices are evolved through amplitude-damping, depolarizing and dephasing
//! maps, and the lower bound of concurrence (LBC) is computed by a brute-force
//! spectral route, a closed form for X-structured states and, where the noise
//! scenario allows it, a factorized law.

pub mod channels;
pub mod cli;
pub mod error;
pub mod factorization;
pub mod lbc;
pub mod state;

pub use error::{Error, Result};

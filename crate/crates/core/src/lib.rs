//! Simulated VQE with an explicitly correlated [2]_R12 basis-set correction.

pub mod basis;
pub mod cabs;
pub mod error;
pub mod fermion;
pub mod integrals;
pub mod oracle;
pub mod pipeline;
pub mod r12;
pub mod rdm;
pub mod scf;
pub mod vqe;

pub use error::{Error, Result};

//! Statevector simulation of unitary pair and coupled-cluster circuits.

mod ansatz;
mod hamiltonian;
mod optimize;
mod statevector;

pub use ansatz::{canonical, Ansatz, AnsatzKind, Factor, Generator};
pub use hamiltonian::{spin_counts, SectorOperator};
pub use optimize::{
    energy, gradient, run_vqe, signed_guess, write_trace, write_trace_csv, GradientMethod, GradientReport, TraceRow,
    VqeOptions, VqeResult, FD_STEP, SHIFT_PREMISE_TOL,
};
pub use statevector::{Excitation, Statevector};

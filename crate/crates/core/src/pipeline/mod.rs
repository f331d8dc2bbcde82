//! End-to-end runs: geometry to corrected energy, scans and curve metrics.

mod config;
mod metrics;
mod run;
mod scan;

pub use config::{core_orbitals, load_basis, load_geometry, RunConfig, Scan, DEFAULT_GAMMA};
pub use metrics::{compute_metrics, read_curve_csv, Metrics, GRID_TOL};
pub use run::{
    build_ansatz, build_obs, build_ri, mp2_magnitudes, obs_integrals, qubit_hamiltonian, run_scf, run_single, ObsSpace,
    PesRecord, RunOutput, StageTimes, DEFAULT_PNOS_PER_PAIR,
};
pub use scan::{point_hash, run_scan, PointFailure, ScanReport, SCHEMA_VERSION};

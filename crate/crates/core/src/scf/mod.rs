//! Restricted Hartree–Fock, canonical MP2 and pair-natural orbitals.

mod mp2;
mod pno;
mod rhf;

pub use mp2::{mp2_energy_direct, run_mp2, Mp2Result};
pub use pno::{make_pnos, pair_density, PairPnos, PnoSet, PnoTruncation};
pub use rhf::{coulomb_exchange, orthogonalizer, run_rhf, sorted_eigen, ScfOptions, ScfResult};

use nalgebra::DMatrix;

use crate::error::Result;
use crate::integrals::{transform_mo, IntegralTensors, Tensor4};

/// Core Hamiltonian and physicist Coulomb tensor in the orbital basis `c`.
pub fn mo_integrals(ints: &IntegralTensors, c: &DMatrix<f64>) -> Result<(DMatrix<f64>, Tensor4)> {
    let h = c.transpose() * ints.h_core() * c;
    let g = transform_mo(ints.coulomb(), [c, c, c, c])?;
    Ok((h, g))
}

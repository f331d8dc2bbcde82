//! Gaussian integrals: Boys function, Hermite recursions, one-electron
//! matrices and two-electron tensors for the Coulomb and f12 kernel family.

pub mod boys;
pub mod dump;
pub mod geminal;
pub mod hermite;
mod kernel;
mod one_electron;
mod pairs;
mod tensor;
mod two_electron;

use std::collections::BTreeMap;

use nalgebra::DMatrix;

pub use boys::{boys, boys_array};
pub use geminal::{default_fit, fit_geminal, solve_coefficients, FitGrid, GeminalFit, DEFAULT_FIT_THRESHOLD};
pub use kernel::{Expansion, Kernel, KernelTag, Primitive};
pub use one_electron::{one_electron, one_electron_mixed};
pub use tensor::{transform_mo, Tensor4};
pub use two_electron::{eri_block, eri_block_opts, two_electron, SCREEN_THRESHOLD};

use crate::basis::{BasisSet, Molecule};
use crate::error::Result;

/// AO integrals over one basis.
#[derive(Debug, Clone)]
pub struct IntegralTensors {
    pub s: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub v_nuc: DMatrix<f64>,
    /// Physicist layout `<rs|X|pq>` stored as `[r][s][p][q]`.
    pub two_electron: BTreeMap<KernelTag, Tensor4>,
}

impl IntegralTensors {
    /// One-electron matrices plus the Coulomb tensor.
    pub fn compute(basis: &BasisSet, molecule: &Molecule) -> Result<Self> {
        let mut two = BTreeMap::new();
        two.insert(KernelTag::Coulomb, two_electron(basis, basis, &Kernel::coulomb(), None)?);
        Ok(IntegralTensors {
            s: one_electron(basis, molecule, KernelTag::Overlap)?,
            t: one_electron(basis, molecule, KernelTag::Kinetic)?,
            v_nuc: one_electron(basis, molecule, KernelTag::Nuclear)?,
            two_electron: two,
        })
    }

    pub fn h_core(&self) -> DMatrix<f64> {
        &self.t + &self.v_nuc
    }

    pub fn coulomb(&self) -> &Tensor4 {
        &self.two_electron[&KernelTag::Coulomb]
    }

    /// Adds an f12-family tensor.
    pub fn add_kernel(&mut self, basis: &BasisSet, kernel: Kernel, fit: &GeminalFit) -> Result<()> {
        let t = two_electron(basis, basis, &kernel, Some(fit))?;
        self.two_electron.insert(kernel.tag, t);
        Ok(())
    }
}

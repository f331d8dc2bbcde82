//! Complementary auxiliary orbitals and the RI orbital space.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{union_basis, BasisSet, Molecule};
use crate::error::{Error, Result};
use crate::integrals::{eri_block, one_electron, transform_mo, Expansion, GeminalFit, Kernel, KernelTag};
use crate::r12::RiBlocks;
use crate::scf::sorted_eigen;

/// Eigenvalue cutoff for linear dependencies in the RI metric.
pub const LINDEP_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CabsMode {
    /// Auxiliary Gaussian basis joined to the OBS.
    Gbs,
    /// Unused pair-natural orbitals of the host basis.
    Pno,
    None,
}

impl FromStr for CabsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gbs" => Ok(Self::Gbs),
            "pno" => Ok(Self::Pno),
            "none" => Ok(Self::None),
            _ => Err(Error::Invalid(format!("unknown cabs mode '{s}'"))),
        }
    }
}

impl fmt::Display for CabsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gbs => "gbs",
            Self::Pno => "pno",
            Self::None => "none",
        })
    }
}

/// Orthonormal (metric `s`) vectors spanning the part of the AO space not
/// reached by the orthonormal columns of `c_obs`.
pub fn complement(s: &DMatrix<f64>, c_obs: &DMatrix<f64>, lindep: f64) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if c_obs.nrows() != n {
        return Err(Error::Shape(format!("{} coefficient rows for {n} AOs", c_obs.nrows())));
    }
    let (e, u) = sorted_eigen(s.clone());
    let keep: Vec<usize> = (0..n).filter(|&k| e[k] > lindep).collect();
    let mut x = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        x.set_column(c, &(u.column(k) / e[k].sqrt()));
    }
    orthogonal_part(s, c_obs, &x, lindep)
}

/// Canonically orthonormalized part of the columns of `x` orthogonal to `c_obs`.
pub fn orthogonal_part(s: &DMatrix<f64>, c_obs: &DMatrix<f64>, x: &DMatrix<f64>, lindep: f64) -> Result<DMatrix<f64>> {
    if x.nrows() != c_obs.nrows() {
        return Err(Error::Shape(format!("{} rows against {} AOs", x.nrows(), c_obs.nrows())));
    }
    if x.ncols() == 0 {
        return Ok(DMatrix::zeros(x.nrows(), 0));
    }
    let y = x - c_obs * (c_obs.transpose() * s * x);
    let (e2, u2) = sorted_eigen(y.transpose() * s * &y);
    let keep2: Vec<usize> = (0..e2.len()).filter(|&k| e2[k] > lindep).collect();
    let mut out = DMatrix::zeros(x.nrows(), keep2.len());
    for (c, &k) in keep2.iter().enumerate() {
        out.set_column(c, &(&y * u2.column(k) / e2[k].sqrt()));
    }
    Ok(out)
}

/// OBS orbitals plus CABS, both expanded in the RI AO basis.
#[derive(Debug, Clone)]
pub struct RiSpace {
    pub mode: CabsMode,
    pub ri_basis: BasisSet,
    /// AO basis in which the OBS orbitals are natively expanded.
    pub obs_ao_basis: BasisSet,
    /// OBS orbitals over `obs_ao_basis`.
    pub c_obs: DMatrix<f64>,
    /// OBS then CABS orbitals over `ri_basis`.
    pub c_ri: DMatrix<f64>,
}

impl RiSpace {
    /// RI = OBS ∪ AUX; the OBS AOs come first so orbitals embed by padding.
    pub fn from_aux(obs: &BasisSet, aux: &BasisSet, c_obs: &DMatrix<f64>, mol: &Molecule) -> Result<Self> {
        let ri = union_basis(obs, aux);
        let n_ri = ri.ao_count();
        let mut emb = DMatrix::zeros(n_ri, c_obs.ncols());
        emb.view_mut((0, 0), (c_obs.nrows(), c_obs.ncols())).copy_from(c_obs);
        let s = one_electron(&ri, mol, KernelTag::Overlap)?;
        let cabs = complement(&s, &emb, LINDEP_THRESHOLD)?;
        Ok(Self { mode: CabsMode::Gbs, ri_basis: ri, obs_ao_basis: obs.clone(), c_obs: c_obs.clone(), c_ri: hcat(&emb, &cabs) })
    }

    /// OBS orbitals drawn from a larger host basis; its remainder is the CABS.
    pub fn from_host(host: &BasisSet, c_obs: &DMatrix<f64>, mol: &Molecule) -> Result<Self> {
        let s = one_electron(host, mol, KernelTag::Overlap)?;
        let cabs = complement(&s, c_obs, LINDEP_THRESHOLD)?;
        Ok(Self { mode: CabsMode::Pno, ri_basis: host.clone(), obs_ao_basis: host.clone(), c_obs: c_obs.clone(), c_ri: hcat(c_obs, &cabs) })
    }

    /// CABS from PNOs left out of the OBS, all expanded in the host basis.
    pub fn from_pnos(host: &BasisSet, c_obs: &DMatrix<f64>, leftover: &DMatrix<f64>, mol: &Molecule) -> Result<Self> {
        let s = one_electron(host, mol, KernelTag::Overlap)?;
        let cabs = orthogonal_part(&s, c_obs, leftover, LINDEP_THRESHOLD)?;
        Ok(Self { mode: CabsMode::Pno, ri_basis: host.clone(), obs_ao_basis: host.clone(), c_obs: c_obs.clone(), c_ri: hcat(c_obs, &cabs) })
    }

    pub fn without_cabs(obs: &BasisSet, c_obs: &DMatrix<f64>) -> Self {
        Self { mode: CabsMode::None, ri_basis: obs.clone(), obs_ao_basis: obs.clone(), c_obs: c_obs.clone(), c_ri: c_obs.clone() }
    }

    pub fn n_obs(&self) -> usize {
        self.c_obs.ncols()
    }

    pub fn n_cabs(&self) -> usize {
        self.c_ri.ncols() - self.n_obs()
    }

    /// Largest deviation of the RI orbitals from orthonormality.
    pub fn orthonormality_error(&self, mol: &Molecule) -> Result<f64> {
        let s = one_electron(&self.ri_basis, mol, KernelTag::Overlap)?;
        let m = self.c_ri.transpose() * s * &self.c_ri;
        Ok((m - DMatrix::identity(self.c_ri.ncols(), self.c_ri.ncols())).amax())
    }

    /// Integrals over RI orbitals for the correction.
    pub fn blocks(&self, mol: &Molecule, fit: &GeminalFit) -> Result<RiBlocks> {
        let ri = &self.ri_basis;
        let ob = &self.obs_ao_basis;
        let c = &self.c_ri;
        let co = &self.c_obs;
        let hao = one_electron(ri, mol, KernelTag::Kinetic)? + one_electron(ri, mol, KernelTag::Nuclear)?;
        let h = c.transpose() * hao * c;
        let coul = Expansion::of(&Kernel::coulomb(), None)?;
        let coulomb = transform_mo(&eri_block(ri, ri, ob, ob, &coul), [c, c, co, co])?;
        let exchange = transform_mo(&eri_block(ri, ob, ob, ri, &coul), [c, co, co, c])?;
        let gem = Expansion::of(&Kernel::new(KernelTag::F12, Some(fit.gamma))?, Some(fit))?;
        let f12 = transform_mo(&eri_block(ri, ob, ri, ob, &gem), [c, co, c, co])?.permuted([0, 2, 1, 3]);
        Ok(RiBlocks { n_obs: self.n_obs(), n_cabs: self.n_cabs(), h, coulomb, exchange, f12 })
    }
}

fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

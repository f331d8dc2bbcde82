use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::{builtin_basis, even_tempered, parse_basis, parse_xyz_charged, union_basis, BasisSet, LengthUnit, Molecule};
use crate::cabs::CabsMode;
use crate::error::{Error, Result};
use crate::vqe::AnsatzKind;

pub const DEFAULT_GAMMA: f64 = 1.4;

/// Bond-length grid `start:stop:count`, inclusive, in Å.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Scan {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Invalid(format!("scan '{s}' is not start:stop:count")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad scan value '{t}'")));
        let count = parts[2].trim().parse::<usize>().map_err(|_| Error::Invalid(format!("bad scan count '{}'", parts[2])))?;
        let scan = Self { start: num(parts[0])?, stop: num(parts[1])?, count };
        scan.points()?;
        Ok(scan)
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::Invalid("scan needs at least one point".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        if !(self.stop > self.start) {
            return Err(Error::Invalid("scan lengths must increase".into()));
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.start + step * k as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// XYZ path, XYZ text, or `El x y z; El x y z` in Å. `{R}` is replaced
    /// by the scan value.
    pub geometry: String,
    pub charge: i32,
    /// Basis spec: `+`-joined builtin names, file paths or `et:l,a0,beta,n;...`.
    pub basis: String,
    pub cabs_mode: CabsMode,
    pub cabs_basis: Option<String>,
    pub gamma: f64,
    pub ansatz: AnsatzKind,
    pub frozen_core: bool,
    /// Diagonal-pair PNOs per occupied orbital in the OBS.
    pub pnos_per_pair: Option<usize>,
    pub shots: Option<u64>,
    pub seed: u64,
    pub max_iter: u64,
    pub grad_tol: f64,
    pub mp2_init: bool,
    /// Dense FCI in the OBS when it fits the oracle budget.
    pub fci_reference: bool,
    pub scan: Option<Scan>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: String::new(),
            charge: 0,
            basis: "sto-3g".into(),
            cabs_mode: CabsMode::None,
            cabs_basis: None,
            gamma: DEFAULT_GAMMA,
            ansatz: AnsatzKind::Uccsd,
            frozen_core: false,
            pnos_per_pair: None,
            shots: None,
            seed: 0,
            max_iter: 500,
            grad_tol: 1e-7,
            mp2_init: false,
            fci_reference: true,
            scan: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Invalid(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.geometry.trim().is_empty() {
            return Err(Error::Invalid("no geometry given".into()));
        }
        if self.cabs_mode == CabsMode::Gbs && self.cabs_basis.is_none() {
            return Err(Error::Invalid("cabs mode gbs needs a cabs basis".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::Invalid("shots must be positive".into()));
        }
        if self.pnos_per_pair == Some(0) {
            return Err(Error::Invalid("pnos per pair must be positive".into()));
        }
        if let Some(s) = &self.scan {
            s.points()?;
            if !self.geometry.contains("{R}") {
                return Err(Error::Invalid("scan needs a geometry template containing {R}".into()));
            }
        }
        Ok(())
    }

    /// OBS drawn from PNOs rather than canonical MOs.
    pub fn uses_pno_obs(&self) -> bool {
        self.ansatz.is_spa() || self.pnos_per_pair.is_some() || self.cabs_mode == CabsMode::Pno
    }

    pub fn at(&self, r: f64) -> RunConfig {
        let mut c = self.clone();
        c.geometry = self.geometry.replace("{R}", &format!("{r}"));
        c.scan = None;
        c
    }
}

/// Geometry from a file path, XYZ text or a `;`-separated atom list (Å).
pub fn load_geometry(spec: &str, charge: i32) -> Result<Molecule> {
    let text = if Path::new(spec).is_file() { std::fs::read_to_string(spec)? } else { spec.to_string() };
    let first = text.lines().next().unwrap_or("").trim();
    if first.parse::<usize>().is_ok() {
        parse_xyz_charged(&text, LengthUnit::Angstrom, charge)
    } else {
        let atoms: Vec<&str> = text.split([';', '\n']).map(str::trim).filter(|l| !l.is_empty()).collect();
        let xyz = format!("{}\n\n{}", atoms.len(), atoms.join("\n"));
        parse_xyz_charged(&xyz, LengthUnit::Angstrom, charge)
    }
}

fn parse_even_tempered(spec: &str) -> Result<Vec<(usize, f64, f64, usize)>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let v: Vec<&str> = s.split(',').map(str::trim).collect();
            let bad = || Error::Basis(format!("bad even-tempered shell '{s}'"));
            if v.len() != 4 {
                return Err(bad());
            }
            Ok((
                v[0].parse().map_err(|_| bad())?,
                v[1].parse().map_err(|_| bad())?,
                v[2].parse().map_err(|_| bad())?,
                v[3].parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

/// Resolves a basis spec on a molecule.
pub fn load_basis(spec: &str, mol: &Molecule) -> Result<BasisSet> {
    let mut out: Option<BasisSet> = None;
    for item in spec.split('+').map(str::trim).filter(|s| !s.is_empty()) {
        let b = if let Some(et) = item.strip_prefix("et:") {
            even_tempered(mol, &parse_even_tempered(et)?, "et")?
        } else if Path::new(item).is_file() {
            let name = Path::new(item).file_stem().and_then(|s| s.to_str()).unwrap_or(item).to_string();
            parse_basis(&std::fs::read_to_string(item)?, mol, &name)?
        } else {
            builtin_basis(item, mol)?
        };
        out = Some(match out {
            None => b,
            Some(a) => union_basis(&a, &b),
        });
    }
    out.ok_or_else(|| Error::Basis(format!("empty basis spec '{spec}'")))
}

/// Core orbitals per atom for the frozen-core option.
pub fn core_orbitals(mol: &Molecule) -> usize {
    mol.atoms
        .iter()
        .map(|a| match a.z {
            0..=2 => 0,
            3..=10 => 1,
            11..=18 => 5,
            _ => 9,
        })
        .sum()
}

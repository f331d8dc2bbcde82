//! Molecules, contracted Gaussian shells and basis sets.

mod elements;
mod gbs;
mod molecule;
mod shell;
mod spherical;
mod xyz;

pub use elements::{atomic_number, symbol};
pub use gbs::{parse_library, BasisLibrary, ShellTemplate};
pub use molecule::{Atom, LengthUnit, Molecule, ANGSTROM_TO_BOHR};
pub use shell::{cart_components, component_norm, n_cart, same_center_overlap, Shell, MAX_L};
pub use spherical::cart_to_sph;
pub use xyz::{parse_xyz, parse_xyz_charged, to_xyz};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of shells. AO order is shell order, then the documented
/// within-shell order (Cartesian or pure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    pub name: String,
    pub shells: Vec<Shell>,
    /// Pure spherical functions when true, Cartesian otherwise.
    pub pure: bool,
}

impl BasisSet {
    pub fn empty(name: &str) -> Self {
        BasisSet {
            name: name.to_string(),
            shells: Vec::new(),
            pure: true,
        }
    }

    pub fn ao_count(&self) -> usize {
        self.shells.iter().map(|s| s.n_functions(self.pure)).sum()
    }

    /// First AO index of every shell.
    pub fn shell_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.shells.len());
        let mut n = 0;
        for s in &self.shells {
            off.push(n);
            n += s.n_functions(self.pure);
        }
        off
    }

    pub fn is_empty(&self) -> bool {
        self.shells.is_empty()
    }

    pub fn max_l(&self) -> usize {
        self.shells.iter().map(|s| s.l).max().unwrap_or(0)
    }

    pub fn with_pure(mut self, pure: bool) -> Self {
        self.pure = pure;
        self
    }

    /// Human-readable AO labels such as `0He 1s` or `1H 2px`.
    pub fn ao_labels(&self, mol: &Molecule) -> Vec<String> {
        const L: [char; 4] = ['s', 'p', 'd', 'f'];
        let mut out = Vec::with_capacity(self.ao_count());
        for (k, sh) in self.shells.iter().enumerate() {
            let atom = sh
                .atom
                .map(|a| format!("{}{}", a, mol.atoms[a].symbol))
                .unwrap_or_else(|| "X".into());
            for f in 0..sh.n_functions(self.pure) {
                out.push(format!("{atom} sh{k} {}{f}", L[sh.l]));
            }
        }
        out
    }
}

/// Places the element blocks of a basis file on the atoms of `molecule`.
pub fn parse_basis(text: &str, molecule: &Molecule, name: &str) -> Result<BasisSet> {
    let lib = parse_library(text)?;
    basis_from_library(&lib, molecule, name)
}

pub fn basis_from_library(lib: &BasisLibrary, molecule: &Molecule, name: &str) -> Result<BasisSet> {
    let mut shells = Vec::new();
    for (ia, atom) in molecule.atoms.iter().enumerate() {
        let templates = lib
            .get(&atom.z)
            .ok_or_else(|| Error::Basis(format!("no basis for element {}", atom.symbol)))?;
        for t in templates {
            shells.push(Shell::new(
                atom.position,
                t.l,
                t.exponents.clone(),
                t.coefficients.clone(),
                Some(ia),
            )?);
        }
    }
    Ok(BasisSet {
        name: name.to_string(),
        shells,
        pure: true,
    })
}

/// Concatenates two bases, `obs` first. No deduplication.
pub fn union_basis(obs: &BasisSet, aux: &BasisSet) -> BasisSet {
    let mut shells = obs.shells.clone();
    shells.extend(aux.shells.iter().cloned());
    let name = if aux.is_empty() {
        obs.name.clone()
    } else {
        format!("{}+{}", obs.name, aux.name)
    };
    BasisSet {
        name,
        shells,
        pure: obs.pure,
    }
}

/// Uncontracted even-tempered shells `alpha_k = alpha0 * beta^k` on every atom.
/// `shells` lists `(l, alpha0, beta, count)`.
pub fn even_tempered(molecule: &Molecule, shells: &[(usize, f64, f64, usize)], name: &str) -> Result<BasisSet> {
    let mut out = Vec::new();
    for (ia, atom) in molecule.atoms.iter().enumerate() {
        for &(l, a0, beta, n) in shells {
            if !(beta > 1.0) {
                return Err(Error::Basis(format!("even-tempered ratio {beta} must exceed 1")));
            }
            for k in 0..n {
                out.push(Shell::new(
                    atom.position,
                    l,
                    vec![a0 * beta.powi(k as i32)],
                    vec![1.0],
                    Some(ia),
                )?);
            }
        }
    }
    Ok(BasisSet {
        name: name.to_string(),
        shells: out,
        pure: true,
    })
}

const BUILTIN: [(&str, &str); 4] = [
    ("sto-3g", include_str!("../../../../data/basis/sto-3g.gbs")),
    ("6-31g", include_str!("../../../../data/basis/6-31g.gbs")),
    ("cc-pvdz", include_str!("../../../../data/basis/cc-pvdz.gbs")),
    ("cc-pvdz-f12-optri", include_str!("../../../../data/basis/cc-pvdz-f12-optri.gbs")),
];

/// Text of a bundled basis file by case-insensitive name.
pub fn builtin_basis_text(name: &str) -> Option<&'static str> {
    BUILTIN
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, t)| *t)
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// Bundled basis placed on `molecule`.
pub fn builtin_basis(name: &str, molecule: &Molecule) -> Result<BasisSet> {
    let text = builtin_basis_text(name)
        .ok_or_else(|| Error::Basis(format!("unknown basis {name:?}; bundled: {:?}", builtin_names())))?;
    parse_basis(text, molecule, &name.to_ascii_lowercase())
}

use serde::{Deserialize, Serialize};

use super::elements;
use crate::error::{Error, Result};

/// Conversion factor from Angstrom to Bohr.
pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Angstrom,
    Bohr,
}

impl LengthUnit {
    pub fn to_bohr(self) -> f64 {
        match self {
            LengthUnit::Angstrom => ANGSTROM_TO_BOHR,
            LengthUnit::Bohr => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub z: u32,
    /// Position in Bohr.
    pub position: [f64; 3],
}

/// Nuclear framework of a closed-shell molecule. Positions are in Bohr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub charge: i32,
    pub multiplicity: u32,
}

impl Molecule {
    /// Builds a neutral singlet molecule and checks the closed-shell invariants.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        Self::with_charge(atoms, 0)
    }

    pub fn with_charge(atoms: Vec<Atom>, charge: i32) -> Result<Self> {
        let mol = Molecule {
            atoms,
            charge,
            multiplicity: 1,
        };
        mol.validate()?;
        Ok(mol)
    }

    /// Convenience constructor from `(symbol, position in Bohr)` pairs.
    pub fn from_symbols(atoms: &[(&str, [f64; 3])]) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|(s, p)| {
                let z = elements::atomic_number(s)
                    .ok_or_else(|| Error::Invalid(format!("unknown element {s}")))?;
                Ok(Atom {
                    symbol: elements::symbol(z).unwrap().to_string(),
                    z,
                    position: *p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Molecule::new(atoms)
    }

    pub fn validate(&self) -> Result<()> {
        let nuclear: i64 = self.atoms.iter().map(|a| a.z as i64).sum();
        let n_el = nuclear - self.charge as i64;
        if n_el < 0 {
            return Err(Error::Invalid(format!("negative electron count {n_el}")));
        }
        if n_el % 2 != 0 {
            return Err(Error::Invalid(format!(
                "odd electron count {n_el}; only closed-shell references are supported"
            )));
        }
        if self.multiplicity != 1 {
            return Err(Error::Invalid("only singlet references are supported".into()));
        }
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[..i] {
                if a.position == b.position {
                    return Err(Error::Invalid(format!(
                        "atoms {} and {} share a position",
                        b.symbol, a.symbol
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_electrons(&self) -> usize {
        let nuclear: i64 = self.atoms.iter().map(|a| a.z as i64).sum();
        (nuclear - self.charge as i64) as usize
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        let mut e = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[..i] {
                let d = dist(&a.position, &b.position);
                e += (a.z * b.z) as f64 / d;
            }
        }
        e
    }

    /// Rigidly translates every nucleus.
    pub fn translated(&self, shift: [f64; 3]) -> Molecule {
        let mut m = self.clone();
        for a in &mut m.atoms {
            for k in 0..3 {
                a.position[k] += shift[k];
            }
        }
        m
    }
}

pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

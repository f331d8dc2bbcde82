use super::elements;
use super::molecule::{Atom, LengthUnit, Molecule, ANGSTROM_TO_BOHR};
use crate::error::{Error, Result};

/// Parses an XYZ geometry. Coordinates are converted to Bohr.
pub fn parse_xyz(text: &str, unit: LengthUnit) -> Result<Molecule> {
    parse_xyz_charged(text, unit, 0)
}

pub fn parse_xyz_charged(text: &str, unit: LengthUnit, charge: i32) -> Result<Molecule> {
    let lines: Vec<&str> = text.lines().collect();
    let count_line = lines.first().ok_or(Error::Parse {
        line: 1,
        msg: "empty geometry".into(),
    })?;
    let count: usize = count_line.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        msg: format!("expected atom count, found {:?}", count_line.trim()),
    })?;
    let scale = unit.to_bohr();
    let mut atoms = Vec::with_capacity(count);
    for (idx, raw) in lines.iter().enumerate().skip(2) {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `El x y z`, found {line:?}"),
            });
        }
        let z = elements::atomic_number(fields[0]).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("unknown element {:?}", fields[0]),
        })?;
        let mut pos = [0.0; 3];
        for k in 0..3 {
            pos[k] = fields[k + 1].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad coordinate {:?}", fields[k + 1]),
            })? * scale;
        }
        atoms.push(Atom {
            symbol: elements::symbol(z).unwrap().to_string(),
            z,
            position: pos,
        });
    }
    if atoms.len() != count {
        return Err(Error::Parse {
            line: 1,
            msg: format!("count line says {count} atoms, found {}", atoms.len()),
        });
    }
    Molecule::with_charge(atoms, charge)
}

/// Writes an XYZ file in the requested unit with round-trip precision.
pub fn to_xyz(mol: &Molecule, unit: LengthUnit) -> String {
    let scale = match unit {
        LengthUnit::Angstrom => 1.0 / ANGSTROM_TO_BOHR,
        LengthUnit::Bohr => 1.0,
    };
    let mut out = format!("{}\n\n", mol.atoms.len());
    for a in &mol.atoms {
        out.push_str(&format!(
            "{} {:e} {:e} {:e}\n",
            a.symbol,
            a.position[0] * scale,
            a.position[1] * scale,
            a.position[2] * scale
        ));
    }
    out
}

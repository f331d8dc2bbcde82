use std::collections::BTreeMap;

use super::elements;
use crate::error::{Error, Result};

/// One shell block of a basis file, before placement on an atom.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellTemplate {
    pub l: usize,
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
}

/// Element-keyed shell templates in file order.
pub type BasisLibrary = BTreeMap<u32, Vec<ShellTemplate>>;

fn l_from_letter(s: &str) -> Option<Vec<usize>> {
    match s.to_ascii_uppercase().as_str() {
        "S" => Some(vec![0]),
        "P" => Some(vec![1]),
        "D" => Some(vec![2]),
        "F" => Some(vec![3]),
        "G" => Some(vec![4]),
        "SP" => Some(vec![0, 1]),
        _ => None,
    }
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.replace(['D', 'd'], "E").parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number {s:?}"),
    })
}

/// Parses element blocks of `L nprim` shells separated by `****`.
pub fn parse_library(text: &str) -> Result<BasisLibrary> {
    let mut lib = BasisLibrary::new();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('!') && !l.starts_with('#'))
        .peekable();
    let mut element: Option<u32> = None;
    while let Some((no, line)) = lines.next() {
        if line.starts_with("****") {
            element = None;
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(z) = element else {
            let z = elements::atomic_number(fields[0]).ok_or_else(|| Error::Parse {
                line: no,
                msg: format!("unknown element {:?}", fields[0]),
            })?;
            element = Some(z);
            lib.entry(z).or_default();
            continue;
        };
        let ls = l_from_letter(fields[0]).ok_or_else(|| Error::Parse {
            line: no,
            msg: format!("unsupported shell type {:?}", fields[0]),
        })?;
        let nprim: usize = fields
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: no,
                msg: "expected primitive count".into(),
            })?;
        let mut exps = Vec::with_capacity(nprim);
        let mut cols = vec![Vec::with_capacity(nprim); ls.len()];
        for _ in 0..nprim {
            let (pno, pline) = lines.next().ok_or(Error::Parse {
                line: no,
                msg: "unexpected end of shell".into(),
            })?;
            let f: Vec<&str> = pline.split_whitespace().collect();
            if f.len() < 1 + ls.len() {
                return Err(Error::Parse {
                    line: pno,
                    msg: format!("expected exponent and {} coefficient(s)", ls.len()),
                });
            }
            let a = parse_float(f[0], pno)?;
            if !(a > 0.0) {
                return Err(Error::Parse {
                    line: pno,
                    msg: format!("non-positive exponent {a}"),
                });
            }
            exps.push(a);
            for (k, col) in cols.iter_mut().enumerate() {
                col.push(parse_float(f[1 + k], pno)?);
            }
        }
        let shells = lib.get_mut(&z).unwrap();
        for (l, coefs) in ls.into_iter().zip(cols) {
            shells.push(ShellTemplate {
                l,
                exponents: exps.clone(),
                coefficients: coefs,
            });
        }
    }
    Ok(lib)
}

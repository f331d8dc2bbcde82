use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grids must agree to this many Å.
pub const GRID_TOL: f64 = 1e-8;

/// Curve errors against a reference, in Hartree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// |E − E_ref| per point.
    pub deviations: Vec<f64>,
    /// Non-parallelity error: max − min of the deviations.
    pub npe: f64,
    pub max: f64,
}

/// Compares `(R, E)` curves point by point.
pub fn compute_metrics(curve: &[(f64, f64)], reference: &[(f64, f64)]) -> Result<Metrics> {
    if curve.is_empty() {
        return Err(Error::Invalid("empty curve".into()));
    }
    if curve.len() != reference.len() {
        return Err(Error::Shape(format!("{} points against {} reference points", curve.len(), reference.len())));
    }
    let mut dev = Vec::with_capacity(curve.len());
    for (&(r, e), &(r0, e0)) in curve.iter().zip(reference) {
        if (r - r0).abs() > GRID_TOL {
            return Err(Error::Shape(format!("grid mismatch at R = {r} against {r0}")));
        }
        dev.push((e - e0).abs());
    }
    let max = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = dev.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Metrics { deviations: dev, npe: max - min, max })
}

/// Reads `R,E` rows; a header line is skipped if present.
pub fn read_curve_csv<R: std::io::Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for (k, row) in rd.records().enumerate() {
        let row = row?;
        if row.len() < 2 {
            return Err(Error::Parse { line: k + 1, msg: "expected R,E".into() });
        }
        match (row[0].parse::<f64>(), row[1].parse::<f64>()) {
            (Ok(r), Ok(e)) => out.push((r, e)),
            _ if k == 0 => continue,
            _ => return Err(Error::Parse { line: k + 1, msg: format!("bad row '{}'", row.iter().collect::<Vec<_>>().join(",")) }),
        }
    }
    Ok(out)
}

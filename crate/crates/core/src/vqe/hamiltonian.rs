use std::collections::HashMap;

use num_complex::Complex64;

use super::statevector::Statevector;
use crate::error::{Error, Result};
use crate::fermion::PauliSum;

/// Real qubit operator restricted to fixed (N_α, N_β) with even qubits
/// carrying α and odd qubits β.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub n_qubits: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    states: Vec<usize>,
    rows: Vec<Vec<(u32, f64)>>,
}

const ALPHA_MASK: usize = 0x5555_5555_5555_5555;

pub fn spin_counts(x: usize) -> (usize, usize) {
    ((x & ALPHA_MASK).count_ones() as usize, (x & !ALPHA_MASK).count_ones() as usize)
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl SectorOperator {
    pub fn from_pauli(op: &PauliSum, n_qubits: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if op.n_qubits > n_qubits || n_qubits > 30 {
            return Err(Error::Shape(format!("operator on {} qubits, sector on {n_qubits}", op.n_qubits)));
        }
        let states: Vec<usize> = (0..1usize << n_qubits).filter(|&x| spin_counts(x) == (n_alpha, n_beta)).collect();
        let index: HashMap<usize, u32> = states.iter().enumerate().map(|(k, &x)| (x, k as u32)).collect();
        let mut acc: Vec<HashMap<u32, Complex64>> = vec![HashMap::new(); states.len()];
        for (s, c) in op.terms() {
            let (xm, zm, ny) = s.masks();
            let base = c * i_pow(ny);
            for (col, &x) in states.iter().enumerate() {
                let y = x ^ xm as usize;
                let Some(&row) = index.get(&y) else { continue };
                let sign = if ((x as u64) & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                *acc[row as usize].entry(col as u32).or_insert(Complex64::new(0.0, 0.0)) += base * sign;
            }
        }
        let mut rows = Vec::with_capacity(states.len());
        for r in acc {
            let mut row: Vec<(u32, f64)> = Vec::with_capacity(r.len());
            for (col, v) in r {
                if v.im.abs() > 1e-10 {
                    return Err(Error::Invalid(format!("operator has imaginary element {:.3e}", v.im)));
                }
                if v.re != 0.0 {
                    row.push((col, v.re));
                }
            }
            row.sort_by_key(|e| e.0);
            rows.push(row);
        }
        Ok(Self { n_qubits, n_alpha, n_beta, states, rows })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn element(&self, row: usize, col: usize) -> f64 {
        self.rows[row].iter().find(|e| e.0 as usize == col).map_or(0.0, |e| e.1)
    }

    /// ⟨ψ|O|ψ⟩; the state must lie inside the sector.
    pub fn expectation(&self, psi: &Statevector) -> Result<f64> {
        if psi.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!("state on {} qubits, operator on {}", psi.n_qubits, self.n_qubits)));
        }
        let a = psi.amplitudes();
        let mut e = Complex64::new(0.0, 0.0);
        for (r, row) in self.rows.iter().enumerate() {
            let ar = a[self.states[r]];
            if ar.re == 0.0 && ar.im == 0.0 {
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for &(c, v) in row {
                s += a[self.states[c as usize]] * v;
            }
            e += ar.conj() * s;
        }
        Ok(e.re)
    }
}

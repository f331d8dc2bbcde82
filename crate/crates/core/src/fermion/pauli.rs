use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vqe::Statevector;

const ZERO_PRUNE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn product(self, other: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        let i = Complex64::i();
        match (self, other) {
            (a, b) if a == b => (Complex64::new(1.0, 0.0), None),
            (X, Y) => (i, Some(Z)),
            (Y, X) => (-i, Some(Z)),
            (Y, Z) => (i, Some(X)),
            (Z, Y) => (-i, Some(X)),
            (Z, X) => (i, Some(Y)),
            (X, Z) => (-i, Some(Y)),
            _ => unreachable!(),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Sparse Pauli string: sorted (qubit, letter) pairs, identities omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<(usize, Pauli)>);

impl PauliString {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Builds a string from arbitrary factors; repeated qubits are multiplied out.
    pub fn from_factors(factors: &[(usize, Pauli)]) -> (Complex64, Self) {
        let mut phase = Complex64::new(1.0, 0.0);
        let mut s = PauliString::identity();
        for &(q, p) in factors {
            let (ph, next) = s.mul(&PauliString(vec![(q, p)]));
            phase *= ph;
            s = next;
        }
        (phase, s)
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(qa, pa)), Some(&(qb, pb))) if qa == qb => {
                    let (ph, p) = pa.product(pb);
                    phase *= ph;
                    if let Some(p) = p {
                        out.push((qa, p));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(qa, pa)), Some(&(qb, _))) if qa < qb => {
                    out.push((qa, pa));
                    i += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (_, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (phase, PauliString(out))
    }

    /// Bit masks (flip, phase) and the Y count used by the statevector kernels.
    pub fn masks(&self) -> (u64, u64, u32) {
        let (mut x, mut z, mut ny) = (0u64, 0u64, 0u32);
        for &(q, p) in &self.0 {
            match p {
                Pauli::X => x |= 1 << q,
                Pauli::Y => {
                    x |= 1 << q;
                    z |= 1 << q;
                    ny += 1;
                }
                Pauli::Z => z |= 1 << q,
            }
        }
        (x, z, ny)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.0.last().map(|f| f.0)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.0.iter().map(|(q, p)| format!("{}{}", p.letter(), q)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Linear combination of Pauli strings on `n_qubits` qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    pub n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, c: f64) -> Self {
        let mut s = Self::new(n_qubits);
        s.add_term(Complex64::new(c, 0.0), PauliString::identity());
        s
    }

    pub fn add_term(&mut self, coeff: Complex64, s: PauliString) {
        if let Some(q) = s.max_qubit() {
            self.n_qubits = self.n_qubits.max(q + 1);
        }
        *self.terms.entry(s).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, Complex64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Prunes coefficients below 1e-14.
    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() > ZERO_PRUNE);
    }

    pub fn scale(&mut self, s: Complex64) {
        for c in self.terms.values_mut() {
            *c *= s;
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let mut m: f64 = 0.0;
        for (k, v) in &self.terms {
            m = m.max((v - other.coefficient(k)).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(v.norm());
            }
        }
        m
    }

    /// Applies the operator to a raw amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (s, c) in &self.terms {
            let (xm, zm, ny) = s.masks();
            let base = c * i_pow(ny);
            for (x, a) in amps.iter().enumerate() {
                let sign = if ((x as u64) & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                out[x ^ xm as usize] += base * sign * a;
            }
        }
        out
    }

    /// ⟨ψ|P|ψ⟩ with the imaginary residue checked and dropped.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.n_qubits < self.n_qubits {
            return Err(Error::Shape(format!(
                "operator on {} qubits, state on {}",
                self.n_qubits, state.n_qubits
            )));
        }
        let amps = state.amplitudes();
        let mut total = Complex64::new(0.0, 0.0);
        for (s, c) in &self.terms {
            let (xm, zm, ny) = s.masks();
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, a) in amps.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let y = x ^ xm as usize;
                let v = amps[y].conj() * a;
                if ((x as u64) & zm).count_ones() % 2 == 1 {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
            total += c * i_pow(ny) * acc;
        }
        if total.im.abs() > 1e-10 {
            return Err(Error::Invalid(format!("expectation has imaginary part {:.3e}", total.im)));
        }
        Ok(total.re)
    }

    /// Dense matrix in the computational basis; only for small operators.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for col in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[col] = Complex64::new(1.0, 0.0);
            let v = self.apply(&e);
            for row in 0..dim {
                m[(row, col)] = v[row];
            }
        }
        m
    }

    /// One term per line: `coeff X0 Z1 Y4`; complex coefficients as `re+imj`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            let coeff = if c.im == 0.0 {
                format!("{:e}", c.re)
            } else {
                format!("{:e}{:+e}j", c.re, c.im)
            };
            if s.weight() == 0 {
                out.push_str(&format!("{coeff}\n"));
            } else {
                out.push_str(&format!("{coeff} {s}\n"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut sum = PauliSum::new(0);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: n + 1, msg };
            let mut parts = line.split_whitespace();
            let coeff = parse_coeff(parts.next().unwrap()).ok_or_else(|| err(format!("bad coefficient in {line:?}")))?;
            let mut factors = Vec::new();
            for tok in parts {
                if tok == "I" {
                    continue;
                }
                let (letter, idx) = tok.split_at(1);
                let p = match letter {
                    "X" => Pauli::X,
                    "Y" => Pauli::Y,
                    "Z" => Pauli::Z,
                    _ => return Err(err(format!("unknown Pauli {tok:?}"))),
                };
                let q: usize = idx.parse().map_err(|_| err(format!("bad qubit index in {tok:?}")))?;
                factors.push((q, p));
            }
            let (ph, s) = PauliString::from_factors(&factors);
            sum.add_term(coeff * ph, s);
        }
        Ok(sum)
    }
}

fn parse_coeff(tok: &str) -> Option<Complex64> {
    if let Some(body) = tok.strip_suffix('j') {
        // split at the sign that starts the imaginary part (not an exponent sign)
        let bytes = body.as_bytes();
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                let re = body[..k].parse().ok()?;
                let im = body[k..].parse().ok()?;
                return Some(Complex64::new(re, im));
            }
        }
        return Some(Complex64::new(0.0, body.parse().ok()?));
    }
    Some(Complex64::new(tok.parse().ok()?, 0.0))
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(*c, s.clone());
        }
        out.simplify();
        out
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits.max(rhs.n_qubits));
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let (ph, s) = a.mul(b);
                out.add_term(ca * cb * ph, s);
            }
        }
        out.simplify();
        out
    }
}

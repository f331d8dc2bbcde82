use num_complex::Complex64;

use crate::error::{Error, Result};

/// Product of ladder operators τ = a†_{c1}…a†_{ck} a_{ak}…a_{a1} on disjoint
/// spin orbitals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Excitation {
    pub create: Vec<usize>,
    pub annihilate: Vec<usize>,
}

#[inline]
fn parity_below(x: usize, m: usize) -> bool {
    (x & ((1usize << m) - 1)).count_ones() % 2 == 1
}

impl Excitation {
    pub fn new(create: &[usize], annihilate: &[usize]) -> Result<Self> {
        if create.len() != annihilate.len() {
            return Err(Error::Invalid("excitation must conserve particle number".into()));
        }
        let mut all: Vec<usize> = create.iter().chain(annihilate).copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != 2 * create.len() {
            return Err(Error::Invalid("excitation indices must be distinct".into()));
        }
        Ok(Self { create: create.to_vec(), annihilate: annihilate.to_vec() })
    }

    /// τ|x⟩ = sign·|y⟩, or None when τ annihilates x.
    #[inline]
    pub fn act(&self, x: usize) -> Option<(usize, f64)> {
        let mut y = x;
        let mut sign = 1.0;
        for &m in &self.annihilate {
            if y >> m & 1 == 0 {
                return None;
            }
            if parity_below(y, m) {
                sign = -sign;
            }
            y &= !(1 << m);
        }
        for &m in self.create.iter().rev() {
            if y >> m & 1 == 1 {
                return None;
            }
            if parity_below(y, m) {
                sign = -sign;
            }
            y |= 1 << m;
        }
        Some((y, sign))
    }

    pub fn ladders(&self) -> Vec<(usize, bool)> {
        let mut ops: Vec<(usize, bool)> = self.create.iter().map(|&m| (m, true)).collect();
        ops.extend(self.annihilate.iter().rev().map(|&m| (m, false)));
        ops
    }
}

/// Dense statevector; bit k of the basis index is the occupation of qubit k.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Shape(format!("{n} amplitudes is not a power of two")));
        }
        Ok(Self { n_qubits: n.trailing_zeros() as usize, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// exp(θ(τ − τ†)) applied in closed form on each invariant 2-D subspace.
    pub fn apply_excitation(&mut self, exc: &Excitation, theta: f64) {
        let (c, s) = (theta.cos(), theta.sin());
        for x in 0..self.amps.len() {
            if let Some((y, sign)) = exc.act(x) {
                let (ax, ay) = (self.amps[x], self.amps[y]);
                self.amps[x] = ax * c - ay * (sign * s);
                self.amps[y] = ax * (sign * s) + ay * c;
            }
        }
    }

    /// Weight of the state inside the subspace where τ − τ† acts.
    pub fn active_weight(&self, exc: &Excitation) -> f64 {
        let mut w = 0.0;
        for x in 0..self.amps.len() {
            if let Some((y, _)) = exc.act(x) {
                w += self.amps[x].norm_sqr() + self.amps[y].norm_sqr();
            }
        }
        w
    }

    /// ⟨N̂⟩ and its variance.
    pub fn number_moments(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (x, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            let n = x.count_ones() as f64;
            m1 += p * n;
            m2 += p * n * n;
        }
        (m1, m2 - m1 * m1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_rotation_closed_form() {
        // |0011⟩ → cos|0011⟩ ± sin|1100⟩
        let exc = Excitation::new(&[2, 3], &[0, 1]).unwrap();
        let mut s = Statevector::basis(4, 0b0011);
        s.apply_excitation(&exc, std::f64::consts::FRAC_PI_2);
        assert!((s.amplitudes()[0b1100].norm() - 1.0).abs() < 1e-14);
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn blocked_excitation_is_identity() {
        let exc = Excitation::new(&[2], &[0]).unwrap();
        let mut s = Statevector::basis(3, 0b111);
        s.apply_excitation(&exc, 0.7);
        assert_eq!(s, Statevector::basis(3, 0b111));
        assert_eq!(s.active_weight(&exc), 0.0);
    }
}

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

/// One ladder operator: spin-orbital index and whether it creates.
pub type Ladder = (usize, bool);

/// Real-coefficient fermionic operator stored in normal order.
///
/// Creations sit left of annihilations, indices ascend inside each group and
/// the sign of every reordering is folded into the coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<Ladder>, f64>,
}

fn out_of_order(a: Ladder, b: Ladder) -> bool {
    match (a.1, b.1) {
        (false, true) => true,
        (true, false) => false,
        _ => a.0 > b.0,
    }
}

/// Expands a product of ladder operators into normal-ordered pieces.
pub fn normal_order(coeff: f64, ops: &[Ladder]) -> Vec<(f64, Vec<Ladder>)> {
    let mut out = Vec::new();
    let mut stack = vec![(coeff, ops.to_vec())];
    while let Some((c, ops)) = stack.pop() {
        let mut done = true;
        for i in 0..ops.len().saturating_sub(1) {
            let (a, b) = (ops[i], ops[i + 1]);
            if a == b {
                done = false;
                break;
            }
            if out_of_order(a, b) {
                done = false;
                let mut swapped = ops.clone();
                swapped.swap(i, i + 1);
                stack.push((-c, swapped));
                if !a.1 && b.1 && a.0 == b.0 {
                    let mut contracted = ops.clone();
                    contracted.drain(i..i + 2);
                    stack.push((c, contracted));
                }
                break;
            }
        }
        if done {
            out.push((c, ops));
        }
    }
    out
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(c: f64) -> Self {
        let mut op = Self::zero();
        op.add_term(c, &[]);
        op
    }

    pub fn term(coeff: f64, ops: &[Ladder]) -> Self {
        let mut op = Self::zero();
        op.add_term(coeff, ops);
        op
    }

    pub fn add_term(&mut self, coeff: f64, ops: &[Ladder]) {
        if coeff == 0.0 {
            return;
        }
        for (c, key) in normal_order(coeff, ops) {
            self.accumulate(key, c);
        }
    }

    fn accumulate(&mut self, key: Vec<Ladder>, c: f64) {
        let v = self.terms.entry(key.clone()).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Ladder>, f64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ops: &[Ladder]) -> f64 {
        self.terms.get(ops).copied().unwrap_or(0.0)
    }

    pub fn constant(&self) -> f64 {
        self.coefficient(&[])
    }

    /// Drops terms with |coeff| <= tol.
    pub fn compress(&mut self, tol: f64) {
        self.terms.retain(|_, v| v.abs() > tol);
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.terms.values_mut() {
            *v *= s;
        }
    }

    pub fn n_modes(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|l| l.0 + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn hermitian_conjugate(&self) -> Self {
        let mut out = Self::zero();
        for (ops, c) in &self.terms {
            let rev: Vec<Ladder> = ops.iter().rev().map(|&(m, d)| (m, !d)).collect();
            out.add_term(*c, &rev);
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.hermitian_conjugate()) <= tol
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        let mut h = self.hermitian_conjugate();
        h.scale(-1.0);
        self.max_abs_diff(&h) <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, v) in &self.terms {
            m = m.max((v - other.coefficient(k)).abs());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(v.abs());
            }
        }
        m
    }
}

impl Add for &FermionOperator {
    type Output = FermionOperator;
    fn add(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.accumulate(k.clone(), *v);
        }
        out
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let mut ops = a.clone();
                ops.extend_from_slice(b);
                out.add_term(ca * cb, &ops);
            }
        }
        out
    }
}

impl Mul<f64> for &FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: f64) -> FermionOperator {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutator_is_delta() {
        let a = FermionOperator::term(1.0, &[(2, false), (2, true)]);
        let b = FermionOperator::term(1.0, &[(2, true), (2, false)]);
        let s = &a + &b;
        assert_eq!(s.len(), 1);
        assert_eq!(s.constant(), 1.0);
    }

    #[test]
    fn repeated_creation_vanishes() {
        let a = FermionOperator::term(1.0, &[(1, true), (0, true), (1, true)]);
        assert!(a.is_empty());
    }

    #[test]
    fn reordering_sign() {
        let a = FermionOperator::term(1.0, &[(3, true), (1, true), (0, false), (2, false)]);
        assert_eq!(a.coefficient(&[(1, true), (3, true), (0, false), (2, false)]), -1.0);
    }

    #[test]
    fn hopping_is_hermitian() {
        let mut h = FermionOperator::term(0.5, &[(0, true), (1, false)]);
        h.add_term(0.5, &[(1, true), (0, false)]);
        assert!(h.is_hermitian(1e-14));
        let g = FermionOperator::term(1.0, &[(0, true), (1, false)]);
        let gd = g.hermitian_conjugate();
        let ah = &g + &(&gd * -1.0);
        assert!(ah.is_anti_hermitian(1e-14));
    }
}

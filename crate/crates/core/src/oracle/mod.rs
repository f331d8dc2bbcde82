//! Brute-force references in an explicit determinant basis.
//!
//! Everything here is deliberately literal: dense matrices, explicit
//! excitation operators and orthogonal projectors. It exists to check the
//! fast paths and is only usable for a handful of orbitals.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::integrals::Tensor4;
use crate::rdm::{apply_ladders, rdms_from_coefficients, three_rdm, Rdms, Tensor6};
use crate::vqe::spin_counts;

/// Spin orbitals the dense oracle accepts.
pub const MAX_SPIN_ORBITALS: usize = 16;

/// Determinants with fixed (N_α, N_β) in ascending bitstring order.
#[derive(Debug, Clone)]
pub struct DeterminantSpace {
    pub n_spatial: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    dets: Vec<usize>,
    index: HashMap<usize, usize>,
}

impl DeterminantSpace {
    pub fn new(n_spatial: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if 2 * n_spatial > MAX_SPIN_ORBITALS {
            return Err(Error::OverBudget { dim: 2 * n_spatial, budget: MAX_SPIN_ORBITALS });
        }
        if n_alpha > n_spatial || n_beta > n_spatial {
            return Err(Error::Invalid("more electrons than orbitals".into()));
        }
        let dets: Vec<usize> = (0..1usize << (2 * n_spatial)).filter(|&x| spin_counts(x) == (n_alpha, n_beta)).collect();
        let index = dets.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        Ok(Self { n_spatial, n_alpha, n_beta, dets, index })
    }

    pub fn dim(&self) -> usize {
        self.dets.len()
    }

    pub fn dets(&self) -> &[usize] {
        &self.dets
    }

    pub fn position(&self, det: usize) -> Option<usize> {
        self.index.get(&det).copied()
    }

    fn apply(&self, v: &DVector<f64>, ops: &[(usize, bool)], c: f64, out: &mut DVector<f64>) {
        for (k, &x) in self.dets.iter().enumerate() {
            if v[k] == 0.0 {
                continue;
            }
            if let Some((y, s)) = apply_ladders(x, ops) {
                if let Some(j) = self.position(y) {
                    out[j] += c * s * v[k];
                }
            }
        }
    }

    /// Dense Σ h a†a + ½ Σ (pq|rs) a†_p a†_r a_s a_q + e_nuc.
    pub fn hamiltonian(&self, h: &DMatrix<f64>, g: &Tensor4, e_nuclear: f64) -> Result<DMatrix<f64>> {
        let n = self.n_spatial;
        if h.nrows() != n || g.dims != [n; 4] {
            return Err(Error::Shape(format!("integrals do not match {n} orbitals")));
        }
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, &x) in self.dets.iter().enumerate() {
            m[(k, k)] += e_nuclear;
            let occ: Vec<usize> = (0..2 * n).filter(|&b| x >> b & 1 == 1).collect();
            for &q in &occ {
                for p in (q % 2..2 * n).step_by(2) {
                    if let Some((y, s)) = apply_ladders(x, &[(p, true), (q, false)]) {
                        if let Some(j) = self.position(y) {
                            m[(j, k)] += s * h[(p / 2, q / 2)];
                        }
                    }
                }
                for &s_ in &occ {
                    if s_ == q {
                        continue;
                    }
                    for p in (q % 2..2 * n).step_by(2) {
                        for r in (s_ % 2..2 * n).step_by(2) {
                            if p == r {
                                continue;
                            }
                            if let Some((y, s)) = apply_ladders(x, &[(p, true), (r, true), (s_, false), (q, false)]) {
                                if let Some(j) = self.position(y) {
                                    m[(j, k)] += 0.5 * s * g.get(p / 2, q / 2, r / 2, s_ / 2);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    /// Spin-free one-body operator Σ_σ Σ_pq f_pq a†_{pσ} a_{qσ}.
    pub fn one_body(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let n = self.n_spatial;
        let mut m = DMatrix::zeros(d, d);
        for (k, &x) in self.dets.iter().enumerate() {
            for q in (0..2 * n).filter(|&b| x >> b & 1 == 1) {
                for p in (q % 2..2 * n).step_by(2) {
                    if let Some((y, s)) = apply_ladders(x, &[(p, true), (q, false)]) {
                        if let Some(j) = self.position(y) {
                            m[(j, k)] += s * f[(p / 2, q / 2)];
                        }
                    }
                }
            }
        }
        m
    }

    /// Spin-summed E^{p}_{q} = Σ_σ a†_{pσ} a_{qσ} applied to a vector.
    pub fn apply_e1(&self, v: &DVector<f64>, p: usize, q: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for s in 0..2 {
            self.apply(v, &[(2 * p + s, true), (2 * q + s, false)], 1.0, &mut out);
        }
        out
    }

    /// E^{pq}_{rs} = Σ_{στ} a†_{pσ} a†_{qτ} a_{sτ} a_{rσ} applied to a vector.
    pub fn apply_e2(&self, v: &DVector<f64>, p: usize, q: usize, r: usize, s: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for a in 0..2 {
            for b in 0..2 {
                self.apply(v, &[(2 * p + a, true), (2 * q + b, true), (2 * s + b, false), (2 * r + a, false)], 1.0, &mut out);
            }
        }
        out
    }

    pub fn rdms(&self, v: &DVector<f64>) -> Rdms {
        let support: Vec<(usize, f64)> = self.dets.iter().zip(v.iter()).filter(|(_, c)| **c != 0.0).map(|(&x, &c)| (x, c)).collect();
        rdms_from_coefficients(self.n_spatial, &support, |y| self.position(y).map_or(0.0, |j| v[j]))
    }

    pub fn three_rdm(&self, v: &DVector<f64>) -> Tensor6 {
        let support: Vec<(usize, f64)> = self.dets.iter().zip(v.iter()).filter(|(_, c)| **c != 0.0).map(|(&x, &c)| (x, c)).collect();
        three_rdm(self.n_spatial, &support, |y| self.position(y).map_or(0.0, |j| v[j]))
    }

    /// Re-expresses a vector of a smaller space whose orbitals are the first
    /// ones of this space.
    pub fn embed(&self, small: &DeterminantSpace, v: &DVector<f64>) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.dim());
        for (k, &x) in small.dets.iter().enumerate() {
            // interleaved numbering keeps the first orbitals' bits in place
            let j = self
                .position(x)
                .ok_or_else(|| Error::Shape("determinant missing from the larger space".into()))?;
            out[j] = v[k];
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct FciResult {
    pub energy: f64,
    pub vector: DVector<f64>,
    pub space: DeterminantSpace,
}

/// Lowest state of the (N/2, N/2) sector; the largest coefficient is made
/// positive.
pub fn fci_ground_state(h: &DMatrix<f64>, g: &Tensor4, e_nuclear: f64, n_electrons: usize) -> Result<FciResult> {
    if n_electrons % 2 != 0 {
        return Err(Error::Invalid("closed-shell electron count required".into()));
    }
    let space = DeterminantSpace::new(h.nrows(), n_electrons / 2, n_electrons / 2)?;
    let m = space.hamiltonian(h, g, e_nuclear)?;
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imin();
    let mut v = eig.eigenvectors.column(k).into_owned();
    if v[v.iamax()] < 0.0 {
        v = -v;
    }
    Ok(FciResult { energy: eig.eigenvalues[k], vector: v, space })
}

/// Orthonormal basis of the column span, via the eigenvectors of VᵀV.
fn span_basis(cols: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    if cols.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    let v = DMatrix::from_columns(cols);
    let eig = SymmetricEigen::new(v.transpose() * &v);
    let top = eig.eigenvalues.max().max(1.0);
    let keep: Vec<usize> = (0..cols.len()).filter(|&k| eig.eigenvalues[k] > 1e-12 * top).collect();
    let mut q = DMatrix::zeros(dim, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let col = &v * eig.eigenvectors.column(k) / eig.eigenvalues[k].sqrt();
        q.set_column(c, &col);
    }
    q
}

/// Inputs for the literal second-order functional, all in one orthonormal
/// RI orbital basis whose first `n_obs` orbitals span the OBS.
pub struct HylleraasInput<'a> {
    pub h: &'a DMatrix<f64>,
    /// RI Coulomb integrals, chemists' order.
    pub g: &'a Tensor4,
    /// ⟨κλ|f|ij⟩ over RI κλ and OBS ij.
    pub f12: &'a Tensor4,
    pub n_obs: usize,
    /// Correlated orbitals the geminal acts on.
    pub active: &'a [usize],
    /// Spin-free reference 1-RDM over the OBS, used for the Fock operator.
    pub one_rdm: &'a DMatrix<f64>,
}

/// J = 2⟨Φ|H|ψ⟩ + ⟨ψ|F − E₀|ψ⟩ with ψ = Q R Φ, Q removing everything inside
/// the OBS space and every E^{α'}_t Φ.
pub fn hylleraas(input: &HylleraasInput, space: &DeterminantSpace, phi: &DVector<f64>) -> Result<f64> {
    let nr = input.h.nrows();
    let no = input.n_obs;
    if space.n_spatial != nr || input.g.dims != [nr; 4] || input.f12.dims != [nr, nr, no, no] {
        return Err(Error::Shape("oracle inputs disagree on the RI dimension".into()));
    }
    // generalized Fock from the reference density
    let mut f = input.h.clone();
    for k in 0..nr {
        for l in 0..nr {
            let mut v = 0.0;
            for r in 0..no {
                for s in 0..no {
                    let d = input.one_rdm[(r, s)];
                    v += d * (input.g.get(k, l, r, s) - 0.5 * input.g.get(k, r, s, l));
                }
            }
            f[(k, l)] += v;
        }
    }
    let mut e0 = 0.0;
    for r in 0..no {
        for s in 0..no {
            e0 += f[(r, s)] * input.one_rdm[(r, s)];
        }
    }
    // R Φ = ½ Σ A^{κλ}_{ij} E^{κλ}_{ij} Φ
    let mut psi = DVector::zeros(space.dim());
    for &i in input.active {
        for &j in input.active {
            for k in 0..nr {
                for l in 0..nr {
                    if k < no && l < no {
                        continue;
                    }
                    let a = 0.375 * input.f12.get(k, l, i, j) + 0.125 * input.f12.get(l, k, i, j);
                    if a != 0.0 {
                        psi += 0.5 * a * space.apply_e2(phi, k, l, i, j);
                    }
                }
            }
        }
    }
    // drop determinants without CABS occupation
    let obs_mask: usize = (0..2 * no).map(|b| 1usize << b).sum();
    for (k, &x) in space.dets().iter().enumerate() {
        if x & !obs_mask == 0 {
            psi[k] = 0.0;
        }
    }
    let mut singles = Vec::new();
    for a in no..nr {
        for t in 0..no {
            singles.push(space.apply_e1(phi, a, t));
        }
    }
    let q = span_basis(&singles, space.dim());
    let psi = &psi - &q * (q.transpose() * &psi);
    let hm = space.hamiltonian(input.h, input.g, 0.0)?;
    let fm = space.one_body(&f);
    let coupling = phi.dot(&(&hm * &psi));
    let fock = psi.dot(&(&fm * &psi)) - e0 * psi.dot(&psi);
    Ok(2.0 * coupling + fock)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_keeps_bits() {
        let small = DeterminantSpace::new(2, 1, 1).unwrap();
        let big = DeterminantSpace::new(3, 1, 1).unwrap();
        let v = DVector::from_fn(small.dim(), |k, _| k as f64 + 1.0);
        let w = big.embed(&small, &v).unwrap();
        assert_eq!(w.sum(), v.sum());
    }

    #[test]
    fn hubbard_dimer() {
        // two sites, t = 1, U = 4: E = (U − √(U² + 16t²))/2
        let h = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        let g = Tensor4::from_fn([2; 4], |p, q, r, s| if p == q && q == r && r == s { 4.0 } else { 0.0 });
        let r = fci_ground_state(&h, &g, 0.0, 2).unwrap();
        assert!((r.energy - (4.0 - 32f64.sqrt()) / 2.0).abs() < 1e-12);
    }
}

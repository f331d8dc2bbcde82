//! Second-order explicitly correlated correction from reference RDMs.
//!
//! Orbital layout: an orthonormal RI set whose first `n_obs` members span the
//! orbital basis and the rest (`α'`, `β'`, …) its complement. The geminal
//! amplitudes follow the spin-adapted fixed-amplitude choice
//! A^{κλ}_{ij} = 3/8⟨κλ|f|ij⟩ + 1/8⟨λκ|f|ij⟩ with i, j in the active set.

mod cumulant;

pub use cumulant::{reconstruct_three_rdm, SpinRdms};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::Tensor4;
use crate::rdm::{Rdms, Tensor6};

/// Relative cutoff of the pseudo-inverse of γ₁.
pub const PINV_RCOND: f64 = 1e-10;
/// Allowed mismatch between tr γ₂ and N(N − 1).
pub const RDM_TRACE_TOL: f64 = 1e-6;

/// Integrals over the RI orbitals that the correction consumes.
#[derive(Debug, Clone)]
pub struct RiBlocks {
    pub n_obs: usize,
    pub n_cabs: usize,
    /// Core Hamiltonian over all RI orbitals.
    pub h: DMatrix<f64>,
    /// (κλ|rs), κλ over RI and rs over OBS.
    pub coulomb: Tensor4,
    /// (κr|sλ).
    pub exchange: Tensor4,
    /// ⟨κλ|f|ij⟩, ij over OBS.
    pub f12: Tensor4,
}

impl RiBlocks {
    pub fn n_ri(&self) -> usize {
        self.n_obs + self.n_cabs
    }

    fn check(&self) -> Result<()> {
        let (r, o) = (self.n_ri(), self.n_obs);
        if self.h.shape() != (r, r)
            || self.coulomb.dims != [r, r, o, o]
            || self.exchange.dims != [r, o, o, r]
            || self.f12.dims != [r, r, o, o]
        {
            return Err(Error::Shape("RI blocks have inconsistent dimensions".into()));
        }
        Ok(())
    }
}

/// f = h + Σ_rs γ_rs [(κλ|rs) − ½(κr|sλ)] over the RI orbitals.
pub fn generalized_fock(blocks: &RiBlocks, one_rdm: &DMatrix<f64>) -> DMatrix<f64> {
    let (nr, no) = (blocks.n_ri(), blocks.n_obs);
    DMatrix::from_fn(nr, nr, |k, l| {
        let mut v = blocks.h[(k, l)];
        for r in 0..no {
            for s in 0..no {
                let d = one_rdm[(r, s)];
                if d != 0.0 {
                    v += d * (blocks.coulomb.get(k, l, r, s) - 0.5 * blocks.exchange.get(k, r, s, l));
                }
            }
        }
        v
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTerms {
    pub coupling_doubles: f64,
    pub coupling_mixed: f64,
    pub coupling_singles: f64,
    pub fock_doubles: f64,
    pub fock_cross: f64,
    pub fock_mixed: f64,
    pub e0: f64,
    pub total: f64,
}

/// Symmetric pseudo-inverse with a cutoff relative to the largest eigenvalue.
pub fn pseudo_inverse(m: &DMatrix<f64>, rcond: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let e = eig.eigenvalues[k];
        if e.abs() > rcond * top {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / e;
        }
    }
    out
}

/// Dense 4-index array with runtime dims, for intermediates.
struct Arr4 {
    d: [usize; 4],
    v: Vec<f64>,
}

impl Arr4 {
    fn zeros(d: [usize; 4]) -> Self {
        Self { d, v: vec![0.0; d.iter().product()] }
    }
    #[inline]
    fn at(&self, a: usize, b: usize, c: usize, e: usize) -> usize {
        ((a * self.d[1] + b) * self.d[2] + c) * self.d[3] + e
    }
    #[inline]
    fn get(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        self.v[self.at(a, b, c, e)]
    }
    /// Rows = first index, columns = the other three flattened.
    fn as_matrix(&self) -> DMatrix<f64> {
        let cols = self.d[1] * self.d[2] * self.d[3];
        DMatrix::from_row_slice(self.d[0], cols, &self.v)
    }
    fn from_matrix(d: [usize; 4], m: &DMatrix<f64>) -> Self {
        let mut v = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            v.extend(m.row(r).iter());
        }
        Self { d, v }
    }
    /// Applies `m` on axis 0: out[x,..] = Σ_y m[x,y] self[y,..].
    fn left(&self, m: &DMatrix<f64>) -> Self {
        let r = m * self.as_matrix();
        Self::from_matrix([m.nrows(), self.d[1], self.d[2], self.d[3]], &r)
    }
    fn swap01(&self) -> Self {
        let mut o = Arr4::zeros([self.d[1], self.d[0], self.d[2], self.d[3]]);
        for a in 0..self.d[0] {
            for b in 0..self.d[1] {
                for c in 0..self.d[2] {
                    for e in 0..self.d[3] {
                        let k = o.at(b, a, c, e);
                        o.v[k] = self.get(a, b, c, e);
                    }
                }
            }
        }
        o
    }
    fn add(&mut self, other: &Arr4, s: f64) {
        for (x, y) in self.v.iter_mut().zip(&other.v) {
            *x += s * y;
        }
    }
    /// out[.., k, l] = Σ_u self[.., u, l] f[u, k] + Σ_u self[.., k, u] f[u, l]
    fn origin_fock(&self, f: &DMatrix<f64>) -> Self {
        let mut o = Arr4::zeros(self.d);
        let n = self.d[2];
        for a in 0..self.d[0] {
            for b in 0..self.d[1] {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = 0.0;
                        for u in 0..n {
                            v += self.get(a, b, u, l) * f[(u, k)] + self.get(a, b, k, u) * f[(u, l)];
                        }
                        let i = o.at(a, b, k, l);
                        o.v[i] = v;
                    }
                }
            }
        }
        o
    }
    fn dot(&self, other: &Arr4) -> f64 {
        self.v.iter().zip(&other.v).map(|(a, b)| a * b).sum()
    }
}

struct Context<'a> {
    no: usize,
    nc: usize,
    g2: &'a Tensor4,
    g3: &'a Tensor6,
}

impl Context<'_> {
    /// ½ Σ X^{ab}_{ij} Y^{ab}_{kl} γ^{ij}_{kl}
    fn ip2(&self, x: &Arr4, y: &Arr4) -> f64 {
        let no2 = self.no * self.no;
        let xm = DMatrix::from_row_slice(self.nc * self.nc, no2, &x.v);
        let ym = DMatrix::from_row_slice(self.nc * self.nc, no2, &y.v);
        let w = xm.transpose() * ym;
        let mut s = 0.0;
        for ij in 0..no2 {
            for kl in 0..no2 {
                s += w[(ij, kl)] * self.g2.data[ij * no2 + kl];
            }
        }
        0.5 * s
    }

    /// Σ X^{aq}_{ij} Y^{ar}_{kl} [δ_qr γ^{ij}_{kl} + γ^{ijr}_{kql}]
    fn ip1(&self, x: &Arr4, y: &Arr4) -> f64 {
        let no = self.no;
        let no3 = no * no * no;
        let xm = DMatrix::from_row_slice(self.nc, no3, &x.v);
        let ym = DMatrix::from_row_slice(self.nc, no3, &y.v);
        let w = xm.transpose() * ym;
        let mut s = 0.0;
        for q in 0..no {
            for i in 0..no {
                for j in 0..no {
                    let row = (q * no + i) * no + j;
                    for r in 0..no {
                        for k in 0..no {
                            for l in 0..no {
                                let wv = w[(row, (r * no + k) * no + l)];
                                if wv == 0.0 {
                                    continue;
                                }
                                let mut m = self.g3.get([i, j, r, k, q, l]);
                                if q == r {
                                    m += self.g2.get(i, j, k, l);
                                }
                                s += wv * m;
                            }
                        }
                    }
                }
            }
        }
        s
    }

    /// s(X)_{a u} = Σ X^{aq}_{ij} γ^{uq}_{ij}
    fn project(&self, x: &Arr4) -> DMatrix<f64> {
        let no3 = self.no.pow(3);
        let xm = DMatrix::from_row_slice(self.nc, no3, &x.v);
        let gm = DMatrix::from_row_slice(self.no, no3, &self.g2.data);
        xm * gm.transpose()
    }
}

/// Correction energy with a caller-provided 3-RDM (only slices with both
/// first upper indices active are read).
pub fn correction_with_three_rdm(blocks: &RiBlocks, rdms: &Rdms, active: &[usize], g3: &Tensor6) -> Result<CorrectionTerms> {
    blocks.check()?;
    let (no, nc) = (blocks.n_obs, blocks.n_cabs);
    if rdms.n_orbitals() != no || g3.n != no {
        return Err(Error::Shape(format!("RDMs over {} orbitals, OBS has {no}", rdms.n_orbitals())));
    }
    if active.iter().any(|&i| i >= no) {
        return Err(Error::Invalid("active orbital outside the OBS".into()));
    }
    let ne = rdms.n_electrons();
    let dev = (rdms.two_trace() - ne * (ne - 1.0)).abs();
    if dev > RDM_TRACE_TOL {
        return Err(Error::InconsistentRdm(format!("two-body trace off by {dev:.3e} for {ne:.6} electrons")));
    }
    let g1 = &rdms.one;
    let g2 = &rdms.two;
    let f = generalized_fock(blocks, g1);
    let e0 = f.view((0, 0), (no, no)).component_mul(g1).sum();
    if nc == 0 {
        return Ok(CorrectionTerms {
            coupling_doubles: 0.0,
            coupling_mixed: 0.0,
            coupling_singles: 0.0,
            fock_doubles: 0.0,
            fock_cross: 0.0,
            fock_mixed: 0.0,
            e0,
            total: 0.0,
        });
    }
    let f_oo = f.view((0, 0), (no, no)).into_owned();
    let f_cc = f.view((no, no), (nc, nc)).into_owned();
    let f_oc = f.view((0, no), (no, nc)).into_owned();
    let mut mask = vec![false; no];
    for &i in active {
        mask[i] = true;
    }
    let amp = |k: usize, l: usize, i: usize, j: usize| {
        if mask[i] && mask[j] {
            0.375 * blocks.f12.get(k, l, i, j) + 0.125 * blocks.f12.get(l, k, i, j)
        } else {
            0.0
        }
    };
    let mut a2 = Arr4::zeros([nc, nc, no, no]);
    let mut a1 = Arr4::zeros([nc, no, no, no]);
    for a in 0..nc {
        for i in 0..no {
            for j in 0..no {
                if !(mask[i] && mask[j]) {
                    continue;
                }
                for b in 0..nc {
                    let k = a2.at(a, b, i, j);
                    a2.v[k] = amp(no + a, no + b, i, j);
                }
                for q in 0..no {
                    let k = a1.at(a, q, i, j);
                    a1.v[k] = amp(no + a, q, i, j);
                }
            }
        }
    }
    let ctx = Context { no, nc, g2, g3 };

    // double-complement sector
    let mut a2t = a2.left(&f_cc);
    a2t.add(&a2.swap01().left(&f_cc).swap01(), 1.0);
    a2t.add(&a2.origin_fock(&f_oo), -1.0);
    let fock_doubles = ctx.ip2(&a2, &a2t);

    // mixed sector
    let mut a1t = a1.left(&f_cc);
    a1t.add(&a1.swap01().left(&f_oo).swap01(), 1.0);
    a1t.add(&a1.origin_fock(&f_oo), -1.0);
    // [F_OC, R2] lands in the mixed sector
    let b1 = a2.swap01().left(&f_oc).swap01();

    let gp = pseudo_inverse(g1, PINV_RCOND);
    let s_a1 = ctx.project(&a1);
    let c = &s_a1 * &gp;
    let s_b1 = ctx.project(&b1);
    let sing_b = c.component_mul(&s_b1).sum();
    let ms = 0.5 * (g1 * &f_oo + &f_oo * g1);
    let sing_f = (c.transpose() * &f_cc * &c * g1).trace() - (c.transpose() * &c * ms).trace();
    let fock_cross = 2.0 * (ctx.ip1(&a1, &b1) - sing_b);
    let fock_mixed = ctx.ip1(&a1, &a1t) - sing_f;

    // coupling ⟨Φ|H|ψ⟩; ⟨pr|a s⟩ = (pa|rs) = exchange[a, p, r, s]
    let ex = &blocks.exchange;
    let mut v2 = 0.0;
    for p in 0..no {
        for r in 0..no {
            for i in 0..no {
                for j in 0..no {
                    let g = g2.get(p, r, i, j);
                    if g == 0.0 || !(mask[i] && mask[j]) {
                        continue;
                    }
                    let mut s = 0.0;
                    for a in 0..nc {
                        for b in 0..nc {
                            s += ex.get(no + a, p, r, no + b) * a2.get(a, b, i, j);
                        }
                    }
                    v2 += s * g;
                }
            }
        }
    }
    v2 *= 0.5;

    let h_oc = blocks.h.view((0, no), (no, nc)).into_owned();
    // Σ_a h_{pa} A1^{aq}_{ij} γ^{pq}_{ij}
    let mut v1 = 0.0;
    let ha = Arr4::from_matrix([no, no, no, no], &(&h_oc * a1.as_matrix()));
    v1 += ha.dot(&Arr4 { d: [no; 4], v: g2.data.clone() });
    // Z[p r s, q i j] = Σ_a ⟨pr|a s⟩ A1^{aq}_{ij}
    let no3 = no * no * no;
    let mut oo_co = DMatrix::zeros(no3, nc);
    for p in 0..no {
        for r in 0..no {
            for s in 0..no {
                for a in 0..nc {
                    oo_co[((p * no + r) * no + s, a)] = ex.get(no + a, p, r, s);
                }
            }
        }
    }
    let z = &oo_co * a1.as_matrix();
    for p in 0..no {
        for r in 0..no {
            for s in 0..no {
                let row = (p * no + r) * no + s;
                for q in 0..no {
                    for i in 0..no {
                        for j in 0..no {
                            if !(mask[i] && mask[j]) {
                                continue;
                            }
                            let zv = z[(row, (q * no + i) * no + j)];
                            if zv == 0.0 {
                                continue;
                            }
                            // γ^{prq}_{isj} = γ^{ijs}_{pqr}
                            let mut m = g3.get([i, j, s, p, q, r]);
                            if s == q {
                                m += g2.get(p, r, i, j);
                            }
                            v1 += zv * m;
                        }
                    }
                }
            }
        }
    }
    // b_{a t} = Σ_p h_{ap} γ_{pt} + Σ ⟨pr|a s⟩ γ^{pr}_{ts}
    let mut bmat = h_oc.transpose() * g1;
    for a in 0..nc {
        for t in 0..no {
            let mut s_ = 0.0;
            for p in 0..no {
                for r in 0..no {
                    for s in 0..no {
                        s_ += oo_co[((p * no + r) * no + s, a)] * g2.get(p, r, t, s);
                    }
                }
            }
            bmat[(a, t)] += s_;
        }
    }
    let v1s = bmat.component_mul(&c).sum();

    let total = 2.0 * (v2 + v1 - v1s) + fock_doubles + fock_cross + fock_mixed;
    Ok(CorrectionTerms {
        coupling_doubles: 2.0 * v2,
        coupling_mixed: 2.0 * v1,
        coupling_singles: -2.0 * v1s,
        fock_doubles,
        fock_cross,
        fock_mixed,
        e0,
        total,
    })
}

/// Correction energy with γ₃ reconstructed from γ₁ and γ₂.
pub fn evaluate_correction(blocks: &RiBlocks, rdms: &Rdms, active: &[usize]) -> Result<CorrectionTerms> {
    let g3 = reconstruct_three_rdm(&rdms.one, &rdms.two, active);
    correction_with_three_rdm(blocks, rdms, active, &g3)
}

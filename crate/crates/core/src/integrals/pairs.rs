use super::hermite::{hermite_indices, Hermite1D};
use crate::basis::{cart_components, cart_to_sph, component_norm, Shell};

pub(crate) struct PrimPair {
    pub p: f64,
    pub center: [f64; 3],
    /// (n_a * n_b) x n_herm row-major, output functions on both shells.
    pub coef: Vec<f64>,
}

/// Hermite data for a pair of shells, with contraction, component
/// normalization and (optionally) the spherical transform folded in.
pub(crate) struct ShellPair {
    pub la: usize,
    pub lb: usize,
    pub na: usize,
    pub nb: usize,
    pub herm: Vec<[usize; 3]>,
    pub prims: Vec<PrimPair>,
}

impl ShellPair {
    pub fn new(a: &Shell, b: &Shell, pure_a: bool, pure_b: bool) -> Self {
        let (la, lb) = (a.l, b.l);
        let ca = cart_components(la);
        let cb = cart_components(lb);
        let ta = pure_a.then(|| cart_to_sph(la));
        let tb = pure_b.then(|| cart_to_sph(lb));
        let na = if pure_a { 2 * la + 1 } else { ca.len() };
        let nb = if pure_b { 2 * lb + 1 } else { cb.len() };
        let herm = hermite_indices(la + lb);
        let nh = herm.len();
        let norm_a: Vec<f64> = ca.iter().map(|&c| component_norm(c)).collect();
        let norm_b: Vec<f64> = cb.iter().map(|&c| component_norm(c)).collect();
        let mut prims = Vec::with_capacity(a.exponents.len() * b.exponents.len());
        for (&alpha, &cfa) in a.exponents.iter().zip(&a.coefficients) {
            for (&beta, &cfb) in b.exponents.iter().zip(&b.coefficients) {
                let p = alpha + beta;
                let center = [0, 1, 2].map(|k| (alpha * a.center[k] + beta * b.center[k]) / p);
                let e = [0, 1, 2].map(|k| Hermite1D::new(la, lb, alpha, beta, a.center[k], b.center[k]));
                let mut cart = vec![0.0; ca.len() * cb.len() * nh];
                for (ia, x) in ca.iter().enumerate() {
                    for (ib, y) in cb.iter().enumerate() {
                        let s = cfa * cfb * norm_a[ia] * norm_b[ib];
                        let row = &mut cart[(ia * cb.len() + ib) * nh..][..nh];
                        for (h, tuv) in herm.iter().enumerate() {
                            row[h] = s
                                * e[0].get(x[0], y[0], tuv[0])
                                * e[1].get(x[1], y[1], tuv[1])
                                * e[2].get(x[2], y[2], tuv[2]);
                        }
                    }
                }
                let coef = transform_pair(&cart, ca.len(), cb.len(), nh, ta.as_ref(), tb.as_ref());
                prims.push(PrimPair { p, center, coef });
            }
        }
        ShellPair {
            la,
            lb,
            na,
            nb,
            herm,
            prims,
        }
    }

    pub fn n_herm(&self) -> usize {
        self.herm.len()
    }
}

/// Applies the spherical transforms to both function indices of a
/// (n_ca * n_cb) x nh coefficient block.
fn transform_pair(
    cart: &[f64],
    nca: usize,
    ncb: usize,
    nh: usize,
    ta: Option<&nalgebra::DMatrix<f64>>,
    tb: Option<&nalgebra::DMatrix<f64>>,
) -> Vec<f64> {
    let mut cur = cart.to_vec();
    let mut na = nca;
    if let Some(t) = ta {
        let mut next = vec![0.0; t.nrows() * ncb * nh];
        for s in 0..t.nrows() {
            for c in 0..nca {
                let w = t[(s, c)];
                if w == 0.0 {
                    continue;
                }
                for k in 0..ncb * nh {
                    next[s * ncb * nh + k] += w * cur[c * ncb * nh + k];
                }
            }
        }
        cur = next;
        na = t.nrows();
    }
    if let Some(t) = tb {
        let nsb = t.nrows();
        let mut next = vec![0.0; na * nsb * nh];
        for i in 0..na {
            for s in 0..nsb {
                for c in 0..ncb {
                    let w = t[(s, c)];
                    if w == 0.0 {
                        continue;
                    }
                    for h in 0..nh {
                        next[(i * nsb + s) * nh + h] += w * cur[(i * ncb + c) * nh + h];
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

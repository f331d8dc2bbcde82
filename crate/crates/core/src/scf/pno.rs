use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::mp2::Mp2Result;
use super::rhf::{sorted_eigen, ScfResult};

/// Truncation of each pair's PNO list after ordering by occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnoTruncation {
    pub occupation_threshold: f64,
    pub max_per_pair: Option<usize>,
}

impl Default for PnoTruncation {
    fn default() -> Self {
        PnoTruncation {
            occupation_threshold: 0.0,
            max_per_pair: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairPnos {
    /// Active occupied indices (frozen core removed).
    pub pair: (usize, usize),
    /// AO x n_pno, descending occupation.
    pub coefficients: DMatrix<f64>,
    /// Same vectors in the canonical virtual MO basis.
    pub virtual_coefficients: DMatrix<f64>,
    pub occupations: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PnoSet {
    pub pairs: Vec<PairPnos>,
    /// Globally orthonormalized PNOs (AO x n), in pivot order.
    pub orthonormal: DMatrix<f64>,
    /// Originating pair and occupation of each orthonormal vector.
    pub origin: Vec<((usize, usize), f64)>,
    pub n_frozen: usize,
}

impl PnoSet {
    /// Orthonormal vectors stemming from the diagonal pair (i, i), in pivot order.
    pub fn diagonal_indices(&self, i: usize) -> Vec<usize> {
        self.origin
            .iter()
            .enumerate()
            .filter(|(_, (p, _))| *p == (i, i))
            .map(|(k, _)| k)
            .collect()
    }
}

/// Pair density D^{ij} = (T̃ᵀT + T̃Tᵀ)/(1+δ_ij), T̃ = 2T - Tᵀ; positive semi-definite.
pub fn pair_density(mp2: &Mp2Result, i: usize, j: usize) -> DMatrix<f64> {
    let nv = mp2.t2.dims[2];
    let t = DMatrix::from_fn(nv, nv, |a, b| mp2.t2.get(i, j, a, b));
    let tt = 2.0 * &t - t.transpose();
    let d = tt.transpose() * &t + &tt * t.transpose();
    let d = 0.5 * (&d + d.transpose());
    if i == j {
        0.5 * d
    } else {
        d
    }
}

/// PNOs for every pair i <= j plus a joint orthonormal set. Pivoting follows
/// descending occupation so the leading PNOs are altered least.
pub fn make_pnos(mp2: &Mp2Result, scf: &ScfResult, trunc: &PnoTruncation, pairs_only_diagonal: bool) -> PnoSet {
    let na = mp2.t2.dims[0];
    let nv = mp2.t2.dims[2];
    let cv = scf.mo_coefficients.columns(scf.n_occ, nv).into_owned();
    let mut pairs = Vec::new();
    for i in 0..na {
        for j in i..na {
            if pairs_only_diagonal && i != j {
                continue;
            }
            if nv == 0 {
                pairs.push(PairPnos {
                    pair: (i, j),
                    coefficients: DMatrix::zeros(cv.nrows(), 0),
                    virtual_coefficients: DMatrix::zeros(0, 0),
                    occupations: Vec::new(),
                });
                continue;
            }
            let (vals, vecs) = sorted_eigen(pair_density(mp2, i, j));
            let mut keep: Vec<usize> = (0..nv).rev().filter(|&k| vals[k] >= trunc.occupation_threshold).collect();
            if let Some(m) = trunc.max_per_pair {
                keep.truncate(m);
            }
            let occ: Vec<f64> = keep.iter().map(|&k| vals[k].max(0.0)).collect();
            let mut c = DMatrix::zeros(nv, keep.len());
            for (col, &k) in keep.iter().enumerate() {
                let mut v = vecs.column(k).into_owned();
                // sign convention: largest component positive
                let imax = v.iamax();
                if v[imax] < 0.0 {
                    v = -v;
                }
                c.set_column(col, &v);
            }
            pairs.push(PairPnos {
                pair: (i, j),
                coefficients: &cv * &c,
                virtual_coefficients: c,
                occupations: occ,
            });
        }
    }
    // joint set, pivot order = descending occupation (stable in pair order)
    let mut all: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in pairs.iter().enumerate() {
        for (k, &o) in p.occupations.iter().enumerate() {
            all.push((o, pi, k));
        }
    }
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    // Work in the virtual MO basis where the metric is the identity.
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut origin = Vec::new();
    for &(o, pi, k) in &all {
        // coefficients in virtual MO basis
        let mut v = pairs[pi].virtual_coefficients.column(k).into_owned();
        for b in &basis {
            let ov = b.dot(&v);
            v -= ov * b;
        }
        let n = v.norm();
        if n * n < 1e-8 {
            continue;
        }
        basis.push(v / n);
        origin.push((pairs[pi].pair, o));
    }
    let mut orth = DMatrix::zeros(cv.nrows(), basis.len());
    for (k, b) in basis.iter().enumerate() {
        orth.set_column(k, &(&cv * b));
    }
    PnoSet {
        pairs,
        orthonormal: orth,
        origin,
        n_frozen: mp2.n_frozen,
    }
}

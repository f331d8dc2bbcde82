use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::Molecule;
use crate::error::{Error, Result};
use crate::integrals::{IntegralTensors, Tensor4};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScfOptions {
    pub max_iter: usize,
    pub e_tol: f64,
    pub diis_tol: f64,
    pub diis_depth: usize,
}

impl Default for ScfOptions {
    fn default() -> Self {
        ScfOptions {
            max_iter: 200,
            e_tol: 1e-10,
            diis_tol: 1e-8,
            diis_depth: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScfResult {
    /// AO x MO, columns ordered by ascending orbital energy.
    pub mo_coefficients: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
    /// Total energy including nuclear repulsion.
    pub e_hf: f64,
    pub e_nuc: f64,
    pub n_occ: usize,
    pub converged: bool,
    pub iterations: usize,
    pub fock_ao: DMatrix<f64>,
}

impl ScfResult {
    pub fn n_mo(&self) -> usize {
        self.mo_coefficients.ncols()
    }

    /// Closed-shell density D = 2 C_occ C_occ^T.
    pub fn density(&self) -> DMatrix<f64> {
        density(&self.mo_coefficients, self.n_occ)
    }
}

fn density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let co = c.columns(0, n_occ);
    2.0 * &co * co.transpose()
}

/// Coulomb and exchange matrices from a physicist-layout AO tensor.
pub fn coulomb_exchange(g: &Tensor4, d: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = d.nrows();
    let mut j = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    // <pr|qs> = (pq|rs)
    for p in 0..n {
        for r in 0..n {
            for q in 0..n {
                let row = &g.data[g.idx(p, r, q, 0)..g.idx(p, r, q, 0) + n];
                let mut jv = 0.0;
                for (s, v) in row.iter().enumerate() {
                    jv += d[(r, s)] * v;
                }
                j[(p, q)] += jv;
            }
        }
    }
    // K_pq = Σ_rs D_rs (pr|qs) = Σ_rs D_rs <pq|rs>
    for p in 0..n {
        for q in 0..n {
            let mut kv = 0.0;
            for r in 0..n {
                let row = &g.data[g.idx(p, q, r, 0)..g.idx(p, q, r, 0) + n];
                for (s, v) in row.iter().enumerate() {
                    kv += d[(r, s)] * v;
                }
            }
            k[(p, q)] = kv;
        }
    }
    (j, k)
}

/// Canonical orthogonalizer X with X^T S X = I.
pub fn orthogonalizer(s: &DMatrix<f64>, threshold: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(s.clone());
    let keep: Vec<usize> = (0..s.nrows()).filter(|&i| eig.eigenvalues[i] > threshold).collect();
    if keep.is_empty() {
        return Err(Error::Invalid("overlap matrix has no eigenvalue above threshold".into()));
    }
    let mut x = DMatrix::zeros(s.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let f = eig.eigenvalues[i].sqrt().recip();
        x.set_column(c, &(eig.eigenvectors.column(i) * f));
    }
    Ok(x)
}

/// Eigenpairs of a symmetric matrix sorted by ascending eigenvalue.
pub fn sorted_eigen(m: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = DVector::from_iterator(idx.len(), idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(eig.eigenvectors.nrows(), idx.len());
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Closed-shell restricted Hartree–Fock with DIIS, starting from the core Hamiltonian.
pub fn run_rhf(ints: &IntegralTensors, molecule: &Molecule, opts: &ScfOptions) -> Result<ScfResult> {
    let n_el = molecule.n_electrons();
    if n_el % 2 != 0 {
        return Err(Error::Invalid("RHF needs an even electron count".into()));
    }
    let n_occ = n_el / 2;
    let h = ints.h_core();
    let g = ints.coulomb();
    let x = orthogonalizer(&ints.s, 1e-8)?;
    if x.ncols() < n_occ {
        return Err(Error::Invalid(format!(
            "{} linearly independent functions cannot hold {n_occ} doubly occupied orbitals",
            x.ncols()
        )));
    }
    let e_nuc = molecule.nuclear_repulsion();
    let diag = |f: &DMatrix<f64>| {
        let (eps, cp) = sorted_eigen(x.transpose() * f * &x);
        (eps, &x * cp)
    };
    let (mut eps, mut c) = diag(&h);
    let mut d = density(&c, n_occ);
    let mut e_old = f64::NAN;
    let mut focks: Vec<DMatrix<f64>> = Vec::new();
    let mut errs: Vec<DMatrix<f64>> = Vec::new();
    let mut err_norm = f64::INFINITY;
    let mut energy = f64::NAN;
    for iter in 1..=opts.max_iter {
        let (j, k) = coulomb_exchange(g, &d);
        let f = &h + j - 0.5 * k;
        energy = 0.5 * (d.component_mul(&(&h + &f))).sum() + e_nuc;
        let err = x.transpose() * (&f * &d * &ints.s - &ints.s * &d * &f) * &x;
        err_norm = err.amax();
        let de = (energy - e_old).abs();
        if de < opts.e_tol && err_norm < opts.diis_tol {
            let (eps_f, c_f) = diag(&f);
            log::debug!("RHF converged in {iter} iterations: E = {energy:.12}");
            return Ok(ScfResult {
                mo_coefficients: c_f,
                orbital_energies: eps_f,
                e_hf: energy,
                e_nuc,
                n_occ,
                converged: true,
                iterations: iter,
                fock_ao: f,
            });
        }
        log::trace!("RHF iter {iter}: E = {energy:.12} dE = {de:.2e} err = {err_norm:.2e}");
        e_old = energy;
        focks.push(f.clone());
        errs.push(err);
        if focks.len() > opts.diis_depth.max(1) {
            focks.remove(0);
            errs.remove(0);
        }
        let f_use = if opts.diis_depth >= 2 && focks.len() >= 2 {
            diis_extrapolate(&focks, &errs).unwrap_or(f)
        } else {
            f
        };
        (eps, c) = diag(&f_use);
        d = density(&c, n_occ);
    }
    let _ = eps;
    Err(Error::ScfNotConverged {
        iterations: opts.max_iter,
        energy,
        error_norm: err_norm,
    })
}

fn diis_extrapolate(focks: &[DMatrix<f64>], errs: &[DMatrix<f64>]) -> Option<DMatrix<f64>> {
    let m = focks.len();
    let mut b = DMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            b[(i, j)] = errs[i].dot(&errs[j]);
        }
        b[(i, m)] = -1.0;
        b[(m, i)] = -1.0;
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = -1.0;
    let coef = b.lu().solve(&rhs)?;
    if coef.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let mut f = DMatrix::zeros(focks[0].nrows(), focks[0].ncols());
    for i in 0..m {
        f += coef[i] * &focks[i];
    }
    Some(f)
}

use crate::error::{Error, Result};
use crate::integrals::Tensor4;

use super::rhf::ScfResult;

/// Canonical closed-shell MP2 amplitudes over active occupied and all virtual orbitals.
#[derive(Debug, Clone)]
pub struct Mp2Result {
    pub e_mp2: f64,
    /// t[i][j][a][b] with i, j active occupied (frozen core removed) and a, b virtual.
    pub t2: Tensor4,
    pub n_frozen: usize,
}

/// `g_mo` is the physicist MO tensor `<pq|rs>` over all MOs.
pub fn run_mp2(scf: &ScfResult, g_mo: &Tensor4, n_frozen: usize) -> Result<Mp2Result> {
    let n_occ = scf.n_occ;
    let n_mo = scf.n_mo();
    if n_frozen > n_occ {
        return Err(Error::Invalid(format!("cannot freeze {n_frozen} of {n_occ} occupied orbitals")));
    }
    let na = n_occ - n_frozen;
    let nv = n_mo - n_occ;
    let eps = &scf.orbital_energies;
    let mut t2 = Tensor4::zeros([na, na, nv, nv]);
    let mut e = 0.0;
    for i in 0..na {
        for j in 0..na {
            for a in 0..nv {
                for b in 0..nv {
                    let (oi, oj, va, vb) = (i + n_frozen, j + n_frozen, a + n_occ, b + n_occ);
                    let den = eps[oi] + eps[oj] - eps[va] - eps[vb];
                    if den.abs() < 1e-8 {
                        return Err(Error::DegenerateReference(den));
                    }
                    let t = g_mo.get(va, vb, oi, oj) / den;
                    t2.set(i, j, a, b, t);
                    e += t * (2.0 * g_mo.get(oi, oj, va, vb) - g_mo.get(oi, oj, vb, va));
                }
            }
        }
    }
    Ok(Mp2Result {
        e_mp2: e,
        t2,
        n_frozen,
    })
}

/// Spin-adapted closed-shell MP2 energy evaluated directly from integrals.
pub fn mp2_energy_direct(scf: &ScfResult, g_mo: &Tensor4, n_frozen: usize) -> f64 {
    let eps = &scf.orbital_energies;
    let mut e = 0.0;
    for i in n_frozen..scf.n_occ {
        for j in n_frozen..scf.n_occ {
            for a in scf.n_occ..scf.n_mo() {
                for b in scf.n_occ..scf.n_mo() {
                    let iajb = g_mo.get(i, j, a, b);
                    let ibja = g_mo.get(i, j, b, a);
                    e += iajb * (2.0 * iajb - ibja) / (eps[i] + eps[j] - eps[a] - eps[b]);
                }
            }
        }
    }
    e
}

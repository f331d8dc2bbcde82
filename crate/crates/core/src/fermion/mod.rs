//! Second-quantized operators and the Jordan–Wigner map.
//!
//! Spin orbitals are interleaved: spatial orbital `p` owns `2p` (up) and
//! `2p + 1` (down). Qubit `k` stores the occupation of spin orbital `k`.

mod operator;
mod pauli;

pub use operator::{normal_order, FermionOperator, Ladder};
pub use pauli::{Pauli, PauliString, PauliSum};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::Tensor4;

pub const SYMMETRY_TOL: f64 = 1e-10;

#[inline]
pub fn spin_orbital(p: usize, spin: usize) -> usize {
    2 * p + spin
}

/// H = Σ h a†a + ½ Σ (pq|rs) a†_p a†_r a_s a_q + e_nuc, over both spins.
///
/// `g` is in chemists' order, `(pq|rs) = ⟨pr|qs⟩`.
pub fn build_hamiltonian(h: &DMatrix<f64>, g: &Tensor4, e_nuclear: f64, n_spatial: usize) -> Result<FermionOperator> {
    let n = n_spatial;
    if h.nrows() != n || h.ncols() != n || g.dims != [n; 4] {
        return Err(Error::Shape(format!("hamiltonian inputs do not match {n} spatial orbitals")));
    }
    let asym = (h - h.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::Invalid(format!("one-electron integrals not symmetric ({asym:.2e})")));
    }
    let gsym = g.symmetry_violation();
    if gsym > SYMMETRY_TOL {
        return Err(Error::Invalid(format!("two-electron integrals break 8-fold symmetry ({gsym:.2e})")));
    }
    let mut op = FermionOperator::identity(e_nuclear);
    for p in 0..n {
        for q in 0..n {
            if h[(p, q)] == 0.0 {
                continue;
            }
            for s in 0..2 {
                op.add_term(h[(p, q)], &[(spin_orbital(p, s), true), (spin_orbital(q, s), false)]);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = g.get(p, q, r, s);
                    if v.abs() < 1e-15 {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            op.add_term(
                                0.5 * v,
                                &[
                                    (spin_orbital(p, a), true),
                                    (spin_orbital(r, b), true),
                                    (spin_orbital(s, b), false),
                                    (spin_orbital(q, a), false),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    op.compress(1e-15);
    Ok(op)
}

fn ladder_image(mode: usize, create: bool) -> PauliSum {
    let mut zs: Vec<(usize, Pauli)> = (0..mode).map(|q| (q, Pauli::Z)).collect();
    let mut sum = PauliSum::new(mode + 1);
    zs.push((mode, Pauli::X));
    sum.add_term(Complex64::new(0.5, 0.0), PauliString::from_factors(&zs).1);
    zs.pop();
    zs.push((mode, Pauli::Y));
    let c = if create { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
    sum.add_term(c, PauliString::from_factors(&zs).1);
    sum
}

/// a_p → ½(X_p + iY_p) Z_{p−1}…Z_0 and its adjoint for a†_p.
pub fn jordan_wigner(op: &FermionOperator) -> PauliSum {
    let n = op.n_modes();
    let mut out = PauliSum::new(n);
    for (ops, c) in op.terms() {
        let mut prod = PauliSum::identity(n, c);
        for &(m, d) in ops {
            prod = &prod * &ladder_image(m, d);
        }
        for (s, v) in prod.terms() {
            out.add_term(v, s.clone());
        }
    }
    out.n_qubits = out.n_qubits.max(n);
    out.simplify();
    out
}

mod common;

use common::systems::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use vqe_r12::fermion::*;
use vqe_r12::oracle::fci_ground_state;
use vqe_r12::vqe::SectorOperator;

fn sector_matrix(op: &SectorOperator) -> DMatrix<f64> {
    DMatrix::from_fn(op.dim(), op.dim(), |r, c| op.element(r, c))
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

#[test]
fn qubit_spectrum_matches_determinant_hamiltonian() {
    for r in [0.5, 0.74, 1.5, 3.0] {
        let p = MoProblem::new(h2(r), "6-31g");
        let op = jordan_wigner(&build_hamiltonian(&p.h, &p.g, p.e_nuc(), p.n_orb()).unwrap());
        assert!(op.max_imag() < 1e-14);
        let sec = SectorOperator::from_pauli(&op, 2 * p.n_orb(), 1, 1).unwrap();
        let fci = fci_ground_state(&p.h, &p.g, p.e_nuc(), 2).unwrap();
        let qubit = sorted_eigenvalues(sector_matrix(&sec));
        let det = sorted_eigenvalues(fci.space.hamiltonian(&p.h, &p.g, p.e_nuc()).unwrap());
        assert_eq!(qubit.len(), det.len());
        for (a, b) in qubit.iter().zip(&det) {
            assert!((a - b).abs() < 1e-10, "R={r}: {a} vs {b}");
        }
    }
}

#[test]
fn hamiltonian_conserves_particle_number() {
    let p = MoProblem::new(h2(0.74), "sto-3g");
    let h = jordan_wigner(&build_hamiltonian(&p.h, &p.g, p.e_nuc(), 2).unwrap());
    let mut n = FermionOperator::zero();
    for k in 0..4 {
        n.add_term(1.0, &[(k, true), (k, false)]);
    }
    let n = jordan_wigner(&n);
    let (hd, nd) = (h.to_dense(), n.to_dense());
    let comm = &hd * &nd - &nd * &hd;
    assert!(comm.iter().all(|z| z.norm() < 1e-12));
    let herm = &hd - hd.adjoint();
    assert!(herm.iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn hamiltonian_rejects_mismatched_integrals() {
    let p = MoProblem::new(h2(0.74), "sto-3g");
    assert!(build_hamiltonian(&p.h, &p.g, 0.0, 3).is_err());
}

fn ladder() -> impl Strategy<Value = Ladder> {
    (0usize..4, any::<bool>())
}

proptest! {
    #[test]
    fn mapping_is_a_homomorphism(a in prop::collection::vec(ladder(), 1..4), b in prop::collection::vec(ladder(), 1..4), c in -2.0f64..2.0) {
        let fa = FermionOperator::term(c, &a);
        let fb = FermionOperator::term(1.0, &b);
        let lhs = jordan_wigner(&(&fa * &fb));
        let rhs = &jordan_wigner(&fa) * &jordan_wigner(&fb);
        let d = lhs.to_dense_n(4) - rhs.to_dense_n(4);
        prop_assert!(d.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn mapping_commutes_with_adjoint(a in prop::collection::vec(ladder(), 1..5), c in -2.0f64..2.0) {
        let f = FermionOperator::term(c, &a);
        let lhs = jordan_wigner(&f.hermitian_conjugate()).to_dense_n(4);
        let rhs = jordan_wigner(&f).to_dense_n(4).adjoint();
        prop_assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
    }
}

trait DenseN {
    fn to_dense_n(&self, n: usize) -> DMatrix<Complex64>;
}

impl DenseN for PauliSum {
    /// Dense matrix on exactly `n` qubits.
    fn to_dense_n(&self, n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        DMatrix::from_fn(dim, dim, |r, c| {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[c] = Complex64::new(1.0, 0.0);
            self.apply(&e)[r]
        })
    }
}

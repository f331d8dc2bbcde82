use nalgebra::DMatrix;
use vqe_r12::basis::*;
use vqe_r12::integrals::IntegralTensors;
use vqe_r12::scf::*;

fn run(atoms: &[(&str, [f64; 3])], basis: &str) -> (Molecule, IntegralTensors, ScfResult) {
    let m = Molecule::from_symbols(atoms).unwrap();
    let b = builtin_basis(basis, &m).unwrap();
    let ints = IntegralTensors::compute(&b, &m).unwrap();
    let scf = run_rhf(&ints, &m, &ScfOptions::default()).unwrap();
    (m, ints, scf)
}

/// <Φ|H|Φ> of the closed-shell determinant from MO integrals.
fn determinant_energy(h: &DMatrix<f64>, g: &vqe_r12::integrals::Tensor4, n_occ: usize, e_nuc: f64) -> f64 {
    let mut e = e_nuc;
    for i in 0..n_occ {
        e += 2.0 * h[(i, i)];
        for j in 0..n_occ {
            e += 2.0 * g.get(i, j, i, j) - g.get(i, j, j, i);
        }
    }
    e
}

#[test]
fn reference_energies() {
    // Values from an independent closed-shell RHF/MP2 implementation.
    let cases: [(&[(&str, [f64; 3])], &str, f64, f64); 5] = [
        (&[("He", [0.0; 3])], "sto-3g", -2.807783957539974, 0.0),
        (&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])], "sto-3g", -1.116714325062551, -0.013157870052636533),
        (&[("Li", [0.0; 3]), ("H", [0.0, 0.0, 3.0])], "6-31g", -7.979177793585318, -0.012585740587343804),
        (&[("He", [0.0; 3])], "cc-pvdz", -2.8551604772427397, -0.025828339551380742),
        (&[("Be", [0.0; 3])], "cc-pvdz", -14.572337630953378, -0.026335938902835015),
    ];
    for (atoms, basis, e_ref, mp2_ref) in cases {
        let (_, ints, scf) = run(atoms, basis);
        assert!((scf.e_hf - e_ref).abs() < 1e-8, "{basis}: {} vs {e_ref}", scf.e_hf);
        let (h, g) = mo_integrals(&ints, &scf.mo_coefficients).unwrap();
        let mp2 = run_mp2(&scf, &g, 0).unwrap();
        assert!((mp2.e_mp2 - mp2_ref).abs() < 1e-8, "{basis}: {} vs {mp2_ref}", mp2.e_mp2);
        assert!(mp2.e_mp2 <= 0.0);
        assert!((mp2.e_mp2 - mp2_energy_direct(&scf, &g, 0)).abs() < 1e-12);
        let e_det = determinant_energy(&h, &g, scf.n_occ, scf.e_nuc);
        assert!((e_det - scf.e_hf).abs() < 1e-9);
    }
}

#[test]
fn invariants_at_convergence() {
    let (_, ints, scf) = run(&[("Li", [0.0; 3]), ("H", [0.0, 0.0, 3.0])], "6-31g");
    let c = &scf.mo_coefficients;
    let ctsc = c.transpose() * &ints.s * c;
    assert!((ctsc - DMatrix::identity(c.ncols(), c.ncols())).amax() < 1e-8);
    let d = scf.density();
    assert!((&d * &ints.s * &d - 2.0 * &d).amax() < 1e-8);
    assert!(scf.orbital_energies.as_slice().windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(scf.n_occ, 2);
}

#[test]
fn zero_iterations_is_error() {
    let m = Molecule::from_symbols(&[("He", [0.0; 3])]).unwrap();
    let b = builtin_basis("sto-3g", &m).unwrap();
    let ints = IntegralTensors::compute(&b, &m).unwrap();
    let opts = ScfOptions {
        max_iter: 0,
        ..Default::default()
    };
    assert!(matches!(run_rhf(&ints, &m, &opts), Err(vqe_r12::Error::ScfNotConverged { .. })));
}

#[test]
fn minimal_systems() {
    let (_, ints, scf) = run(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])], "sto-3g");
    assert_eq!((scf.n_occ, scf.n_mo() - scf.n_occ), (1, 1));
    let (_, g) = mo_integrals(&ints, &scf.mo_coefficients).unwrap();
    let mp2 = run_mp2(&scf, &g, 0).unwrap();
    // two-determinant perturbation sum: |<Φ|H|Φ_11^22>|^2 / (E_0 - E_D)
    let k = g.get(0, 0, 1, 1);
    let eps = &scf.orbital_energies;
    assert!((mp2.e_mp2 - k * k / (2.0 * (eps[0] - eps[1]))).abs() < 1e-12);

    let (_, ints, scf) = run(&[("He", [0.0; 3])], "sto-3g");
    let (_, g) = mo_integrals(&ints, &scf.mo_coefficients).unwrap();
    let mp2 = run_mp2(&scf, &g, 0).unwrap();
    assert_eq!(mp2.e_mp2, 0.0);
    assert_eq!(mp2.t2.data.len(), 0);
}

#[test]
fn pnos() {
    let (_, ints, scf) = run(&[("Li", [0.0; 3]), ("H", [0.0, 0.0, 3.0])], "6-31g");
    let (_, g) = mo_integrals(&ints, &scf.mo_coefficients).unwrap();
    let mp2 = run_mp2(&scf, &g, 0).unwrap();
    let set = make_pnos(&mp2, &scf, &PnoTruncation::default(), false);
    for p in &set.pairs {
        assert!(p.occupations.iter().all(|&o| o >= 0.0));
        assert!(p.occupations.windows(2).all(|w| w[0] >= w[1]));
    }
    let c = &set.orthonormal;
    let gram = c.transpose() * &ints.s * c;
    assert!((gram - DMatrix::identity(c.ncols(), c.ncols())).amax() < 1e-8);
    // PNOs live in the virtual space
    let occ = scf.mo_coefficients.columns(0, scf.n_occ);
    assert!((occ.transpose() * &ints.s * c).amax() < 1e-8);

    let (_, ints, scf) = run(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])], "sto-3g");
    let (_, g) = mo_integrals(&ints, &scf.mo_coefficients).unwrap();
    let mp2 = run_mp2(&scf, &g, 0).unwrap();
    let set = make_pnos(&mp2, &scf, &PnoTruncation::default(), false);
    let v = scf.mo_coefficients.column(1);
    let pno = set.orthonormal.column(0);
    assert!(((v.transpose() * &ints.s * pno)[(0, 0)].abs() - 1.0).abs() < 1e-10);
}

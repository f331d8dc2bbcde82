use nalgebra::{DMatrix, DVector};
use vqe_r12::basis::*;
use vqe_r12::cabs::RiSpace;
use vqe_r12::integrals::*;
use vqe_r12::oracle::*;
use vqe_r12::r12::RiBlocks;
use vqe_r12::rdm::Rdms;
use vqe_r12::scf::*;

pub fn h2(r_angstrom: f64) -> Molecule {
    let r = r_angstrom * ANGSTROM_TO_BOHR;
    Molecule::from_symbols(&[("H", [0.0; 3]), ("H", [0.0, 0.0, r])]).unwrap()
}

/// Canonical RHF problem: core Hamiltonian and chemists' Coulomb tensor over MOs.
pub struct MoProblem {
    pub mol: Molecule,
    pub basis: BasisSet,
    pub scf: ScfResult,
    pub h: DMatrix<f64>,
    pub g: Tensor4,
}

impl MoProblem {
    pub fn new(mol: Molecule, basis: &str) -> Self {
        let b = builtin_basis(basis, &mol).unwrap();
        Self::with_basis(mol, b)
    }

    pub fn with_basis(mol: Molecule, basis: BasisSet) -> Self {
        let ints = IntegralTensors::compute(&basis, &mol).unwrap();
        let scf = run_rhf(&ints, &mol, &ScfOptions::default()).unwrap();
        let (h, g) = mo_integrals(&ints, &scf.mo_coefficients).unwrap();
        Self { mol, basis, scf, h, g: g.permuted([0, 2, 1, 3]) }
    }

    pub fn n_orb(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_el(&self) -> usize {
        self.mol.n_electrons()
    }

    pub fn e_nuc(&self) -> f64 {
        self.scf.e_nuc
    }
}

/// Small correction problem with a HF reference over a Gaussian OBS plus an
/// even-tempered auxiliary set.
pub struct TinyR12 {
    pub mol: Molecule,
    pub ri: RiSpace,
    pub blocks: RiBlocks,
    pub rdms: Rdms,
    pub phi: DVector<f64>,
    pub space: DeterminantSpace,
    pub active: Vec<usize>,
}

impl TinyR12 {
    pub fn new(mol: Molecule, obs: &str, aux: &[(usize, f64, f64, usize)], keep_atoms: Option<&[usize]>, gamma: f64) -> Self {
        let p = MoProblem::new(mol, obs);
        let mut auxb = even_tempered(&p.mol, aux, "et").unwrap();
        if let Some(k) = keep_atoms {
            auxb.shells.retain(|s| s.atom.is_some_and(|a| k.contains(&a)));
        }
        let ri = RiSpace::from_aux(&p.basis, &auxb, &p.scf.mo_coefficients, &p.mol).unwrap();
        let blocks = ri.blocks(&p.mol, &default_fit(gamma).unwrap()).unwrap();
        let n_el = p.n_el();
        let space = DeterminantSpace::new(ri.n_obs(), n_el / 2, n_el / 2).unwrap();
        let mut phi = DVector::zeros(space.dim());
        let hf: usize = (0..n_el).map(|b| 1usize << b).sum();
        phi[space.position(hf).unwrap()] = 1.0;
        let rdms = space.rdms(&phi);
        Self { active: (0..n_el / 2).collect(), mol: p.mol, ri, blocks, rdms, phi, space }
    }

    pub fn n_ri(&self) -> usize {
        self.ri.n_obs() + self.ri.n_cabs()
    }

    /// Literal second-order functional in the determinant space over all RI orbitals.
    pub fn oracle(&self) -> f64 {
        let c = &self.ri.c_ri;
        let coul = Expansion::of(&Kernel::coulomb(), None).unwrap();
        let b = &self.ri.ri_basis;
        let g = transform_mo(&eri_block(b, b, b, b, &coul), [c, c, c, c]).unwrap();
        let n_el = self.mol.n_electrons();
        let big = DeterminantSpace::new(self.n_ri(), n_el / 2, n_el / 2).unwrap();
        let phib = big.embed(&self.space, &self.phi).unwrap();
        let input = HylleraasInput {
            h: &self.blocks.h,
            g: &g,
            f12: &self.blocks.f12,
            n_obs: self.ri.n_obs(),
            active: &self.active,
            one_rdm: &self.rdms.one,
        };
        hylleraas(&input, &big, &phib).unwrap()
    }
}

/// The five tiny HF systems of the correction checks.
pub fn tiny_systems() -> Vec<(&'static str, TinyR12)> {
    let sym = |atoms: &[(&str, [f64; 3])]| Molecule::from_symbols(atoms).unwrap();
    vec![
        ("H2", TinyR12::new(sym(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.4])]), "sto-3g", &[(0, 0.3, 3.0, 2)], None, 1.4)),
        ("He", TinyR12::new(sym(&[("He", [0.0; 3])]), "sto-3g", &[(0, 0.5, 3.0, 2), (1, 1.0, 2.0, 1)], None, 1.4)),
        (
            "He2",
            TinyR12::new(sym(&[("He", [0.0; 3]), ("He", [0.0, 0.0, 2.5])]), "sto-3g", &[(0, 0.5, 3.0, 1)], None, 1.4),
        ),
        (
            "H4",
            TinyR12::new(
                sym(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.6]), ("H", [0.0, 0.0, 3.4]), ("H", [0.0, 0.0, 5.0])]),
                "sto-3g",
                &[(0, 0.3, 3.0, 1)],
                Some(&[0, 3]),
                1.4,
            ),
        ),
        (
            "HeH+",
            TinyR12::new(
                Molecule::with_charge(
                    vec![
                        Atom { symbol: "He".into(), z: 2, position: [0.0; 3] },
                        Atom { symbol: "H".into(), z: 1, position: [0.0, 0.0, 1.46] },
                    ],
                    1,
                )
                .unwrap(),
                "sto-3g",
                &[(0, 0.4, 3.0, 2)],
                Some(&[0]),
                1.0,
            ),
        ),
    ]
}

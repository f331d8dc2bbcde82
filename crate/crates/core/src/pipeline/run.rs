use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::config::{core_orbitals, load_basis, load_geometry, RunConfig};
use crate::basis::{BasisSet, Molecule};
use crate::cabs::{CabsMode, RiSpace};
use crate::error::{Error, Result};
use crate::fermion::{build_hamiltonian, jordan_wigner};
use crate::integrals::{default_fit, transform_mo, IntegralTensors, Tensor4};
use crate::oracle::{fci_ground_state, MAX_SPIN_ORBITALS};
use crate::r12::{evaluate_correction, CorrectionTerms};
use crate::rdm::{measure_rdms, Rdms};
use crate::scf::{make_pnos, mo_integrals, run_mp2, run_rhf, PnoTruncation, ScfOptions, ScfResult};
use crate::vqe::{run_vqe, signed_guess, Ansatz, AnsatzKind, GradientMethod, SectorOperator, TraceRow, VqeOptions};

/// Diagonal-pair PNOs per occupied orbital when none is requested.
pub const DEFAULT_PNOS_PER_PAIR: usize = 1;

/// One converged point. Everything here is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PesRecord {
    /// Scan coordinate in Å, if any.
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub e_hf: f64,
    pub e_vqe: f64,
    pub e_correction: f64,
    pub e_total: f64,
    pub e_fci_obs: Option<f64>,
    pub n_qubits: usize,
    pub n_obs: usize,
    pub n_cabs: usize,
    pub n_frozen: usize,
    pub vqe_iterations: u64,
    pub vqe_converged: bool,
    pub grad_norm: f64,
    pub gamma: f64,
    pub fit_rms: Option<f64>,
}

/// Wall times in seconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub scf: f64,
    pub obs: f64,
    pub vqe: f64,
    pub rdm: f64,
    pub correction: f64,
    pub fci: f64,
}

/// A point with the intermediate objects the CLI can dump.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: PesRecord,
    pub timing: StageTimes,
    pub theta: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub rdms: Rdms,
    pub terms: Option<CorrectionTerms>,
}

/// Orbital basis over the host AOs plus the bookkeeping the later stages need.
#[derive(Debug, Clone)]
pub struct ObsSpace {
    pub host: BasisSet,
    pub scf: ScfResult,
    /// OBS orbitals over `host`: occupied first.
    pub c_obs: DMatrix<f64>,
    /// Unused orthonormal PNOs over `host` (empty without PNOs).
    pub leftover: DMatrix<f64>,
    pub n_frozen: usize,
    /// Occupied OBS index with the OBS indices it pairs with.
    pub pairs: Vec<(usize, Vec<usize>)>,
    /// MP2 amplitude magnitude per pair orbital, same layout as `pairs`.
    pub pair_amplitudes: Vec<Vec<f64>>,
    /// MP2 amplitudes t[i][j][a][b] over active occupied and canonical virtuals.
    pub t2: Option<Tensor4>,
}

impl ObsSpace {
    pub fn n_obs(&self) -> usize {
        self.c_obs.ncols()
    }

    pub fn n_occ(&self) -> usize {
        self.scf.n_occ
    }

    /// Correlated occupied orbitals.
    pub fn active(&self) -> Vec<usize> {
        (self.n_frozen..self.n_occ()).collect()
    }
}

fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn run_scf(cfg: &RunConfig, mol: &Molecule) -> Result<(BasisSet, IntegralTensors, ScfResult)> {
    let host = load_basis(&cfg.basis, mol)?;
    let ints = IntegralTensors::compute(&host, mol)?;
    let scf = run_rhf(&ints, mol, &ScfOptions::default())?;
    Ok((host, ints, scf))
}

/// HF plus canonical virtuals, or HF plus the leading diagonal-pair PNOs.
pub fn build_obs(cfg: &RunConfig, mol: &Molecule, host: BasisSet, ints: &IntegralTensors, scf: ScfResult) -> Result<ObsSpace> {
    let n_frozen = if cfg.frozen_core { core_orbitals(mol) } else { 0 };
    let n_occ = scf.n_occ;
    if n_frozen >= n_occ && n_occ > 0 {
        return Err(Error::Invalid(format!("frozen core of {n_frozen} leaves no active orbitals")));
    }
    let n_mo = scf.n_mo();
    let c_occ = scf.mo_coefficients.columns(0, n_occ).into_owned();
    if !cfg.uses_pno_obs() {
        let mp2 = if cfg.mp2_init && n_mo > n_occ {
            let (_, g) = mo_integrals(ints, &scf.mo_coefficients)?;
            Some(run_mp2(&scf, &g, n_frozen)?)
        } else {
            None
        };
        let virt: Vec<usize> = (n_occ..n_mo).collect();
        return Ok(ObsSpace {
            c_obs: scf.mo_coefficients.clone(),
            leftover: DMatrix::zeros(scf.mo_coefficients.nrows(), 0),
            n_frozen,
            pairs: (n_frozen..n_occ).map(|i| (i, virt.clone())).collect(),
            pair_amplitudes: Vec::new(),
            t2: mp2.map(|m| m.t2),
            host,
            scf,
        });
    }
    let (_, g) = mo_integrals(ints, &scf.mo_coefficients)?;
    let mp2 = run_mp2(&scf, &g, n_frozen)?;
    let pnos = make_pnos(&mp2, &scf, &PnoTruncation::default(), true);
    let k = cfg.pnos_per_pair.unwrap_or(DEFAULT_PNOS_PER_PAIR);
    let nv = n_mo - n_occ;
    let cv = scf.mo_coefficients.columns(n_occ, nv).into_owned();
    // PNOs in the canonical virtual basis, for amplitude projections
    let in_virt = cv.transpose() * &ints.s * &pnos.orthonormal;
    let mut chosen = Vec::new();
    let mut pairs = Vec::new();
    let mut amps = Vec::new();
    for ia in 0..n_occ - n_frozen {
        let t = DMatrix::from_fn(nv, nv, |a, b| mp2.t2.get(ia, ia, a, b));
        let mut set = Vec::new();
        let mut mags = Vec::new();
        for &col in pnos.diagonal_indices(ia).iter().take(k) {
            set.push(n_occ + chosen.len());
            let v = in_virt.column(col);
            mags.push((v.transpose() * &t * v)[(0, 0)].abs());
            chosen.push(col);
        }
        pairs.push((ia + n_frozen, set));
        amps.push(mags);
    }
    let mut c_obs = c_occ;
    let mut rest = Vec::new();
    for col in 0..pnos.orthonormal.ncols() {
        if !chosen.contains(&col) {
            rest.push(col);
        }
    }
    let sel = DMatrix::from_columns(&chosen.iter().map(|&c| pnos.orthonormal.column(c)).collect::<Vec<_>>());
    if !chosen.is_empty() {
        c_obs = hcat(&c_obs, &sel);
    }
    let leftover = if rest.is_empty() {
        DMatrix::zeros(c_obs.nrows(), 0)
    } else {
        DMatrix::from_columns(&rest.iter().map(|&c| pnos.orthonormal.column(c)).collect::<Vec<_>>())
    };
    Ok(ObsSpace { host, scf, c_obs, leftover, n_frozen, pairs, pair_amplitudes: amps, t2: Some(mp2.t2) })
}

/// Core Hamiltonian and chemists' Coulomb tensor over the OBS.
pub fn obs_integrals(ints: &IntegralTensors, c_obs: &DMatrix<f64>) -> Result<(DMatrix<f64>, Tensor4)> {
    let h = c_obs.transpose() * ints.h_core() * c_obs;
    let g = transform_mo(ints.coulomb(), [c_obs, c_obs, c_obs, c_obs])?.permuted([0, 2, 1, 3]);
    Ok((h, g))
}

pub fn build_ansatz(kind: AnsatzKind, obs: &ObsSpace) -> Result<Ansatz> {
    let n = obs.n_obs();
    let frozen: Vec<usize> = (0..obs.n_frozen).collect();
    let active = obs.active();
    let occ: Vec<usize> = (0..obs.n_occ()).collect();
    match kind {
        AnsatzKind::Hf => Ansatz::hartree_fock(n, &occ),
        AnsatzKind::Uccsd => Ansatz::uccsd(n, &frozen, &active, &(obs.n_occ()..n).collect::<Vec<_>>()),
        AnsatzKind::Spa | AnsatzKind::SpaG => {
            if obs.pair_amplitudes.is_empty() {
                return Err(Error::Invalid("pair ansatz needs a PNO orbital basis".into()));
            }
            Ansatz::spa(n, &frozen, &obs.pairs, kind == AnsatzKind::SpaG)
        }
    }
}

/// MP2 magnitudes in generator order; zero where MP2 has no amplitude.
pub fn mp2_magnitudes(kind: AnsatzKind, obs: &ObsSpace, ansatz: &Ansatz) -> Vec<f64> {
    let mut m = vec![0.0; ansatz.n_params()];
    match kind {
        AnsatzKind::Spa | AnsatzKind::SpaG => {
            let flat: Vec<f64> = obs.pair_amplitudes.iter().flatten().copied().collect();
            for (k, v) in flat.into_iter().enumerate().take(m.len()) {
                m[k] = v;
            }
        }
        AnsatzKind::Uccsd => {
            if let Some(t2) = &obs.t2 {
                let (nf, no) = (obs.n_frozen, obs.n_occ());
                let singles: Vec<(usize, usize)> =
                    obs.active().into_iter().flat_map(|i| (no..obs.n_obs()).map(move |a| (i, a))).collect();
                let mut k = 0;
                for (x, &(i, a)) in singles.iter().enumerate() {
                    for &(j, b) in &singles[x..] {
                        if k < m.len() {
                            m[k] = t2.get(i - nf, j - nf, a - no, b - no).abs();
                        }
                        k += 1;
                    }
                }
            }
        }
        AnsatzKind::Hf => {}
    }
    m
}

/// Sector-restricted qubit Hamiltonian over the OBS.
pub fn qubit_hamiltonian(h: &DMatrix<f64>, g: &Tensor4, e_nuc: f64, n_electrons: usize) -> Result<SectorOperator> {
    let n = h.nrows();
    let op = build_hamiltonian(h, g, e_nuc, n)?;
    let pauli = jordan_wigner(&op);
    SectorOperator::from_pauli(&pauli, 2 * n, n_electrons / 2, n_electrons / 2)
}

pub fn build_ri(cfg: &RunConfig, mol: &Molecule, obs: &ObsSpace) -> Result<RiSpace> {
    match cfg.cabs_mode {
        CabsMode::None => Ok(RiSpace::without_cabs(&obs.host, &obs.c_obs)),
        CabsMode::Gbs => {
            let spec = cfg.cabs_basis.as_deref().ok_or_else(|| Error::Invalid("no cabs basis".into()))?;
            let aux = load_basis(spec, mol)?;
            RiSpace::from_aux(&obs.host, &aux, &obs.c_obs, mol)
        }
        CabsMode::Pno => RiSpace::from_pnos(&obs.host, &obs.c_obs, &obs.leftover, mol),
    }
}

/// One geometry through every stage.
pub fn run_single(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    if cfg.geometry.contains("{R}") {
        return Err(Error::Invalid("geometry template needs a scan value".into()));
    }
    let mut times = StageTimes::default();
    let mol = load_geometry(&cfg.geometry, cfg.charge).map_err(|e| e.in_stage("geometry"))?;
    let n_el = mol.n_electrons();

    let t = Instant::now();
    let (host, ints, scf) = run_scf(cfg, &mol).map_err(|e| e.in_stage("scf"))?;
    let e_hf = scf.e_hf;
    let e_nuc = scf.e_nuc;
    times.scf = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let obs = build_obs(cfg, &mol, host, &ints, scf).map_err(|e| e.in_stage("obs"))?;
    let (h, g) = obs_integrals(&ints, &obs.c_obs).map_err(|e| e.in_stage("obs"))?;
    times.obs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (vqe, ansatz) = (|| {
        let ham = qubit_hamiltonian(&h, &g, e_nuc, n_el)?;
        let ansatz = build_ansatz(cfg.ansatz, &obs)?;
        let initial = if cfg.mp2_init && ansatz.n_params() > 0 {
            Some(signed_guess(&ham, &ansatz, &mp2_magnitudes(cfg.ansatz, &obs, &ansatz))?)
        } else {
            None
        };
        let opts = VqeOptions { max_iter: cfg.max_iter, grad_tol: cfg.grad_tol, gradient: GradientMethod::Auto, initial };
        Ok::<_, Error>((run_vqe(&ham, &ansatz, &opts)?, ansatz))
    })()
    .map_err(|e| e.in_stage("vqe"))?;
    if !vqe.converged {
        log::warn!("VQE not converged: gradient norm {:.3e} after {} iterations", vqe.grad_norm, vqe.iterations);
    }
    times.vqe = t.elapsed().as_secs_f64();
    debug_assert_eq!(ansatz.n_electrons(), n_el);

    let t = Instant::now();
    let exact = measure_rdms(&vqe.state, obs.n_obs()).map_err(|e| e.in_stage("rdm"))?;
    let rdms = match cfg.shots {
        Some(s) => exact.add_sampling_noise(s, cfg.seed).map_err(|e| e.in_stage("rdm"))?,
        None => exact,
    };
    times.rdm = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (terms, n_cabs, fit_rms) = (|| {
        let ri = build_ri(cfg, &mol, &obs)?;
        if ri.n_cabs() == 0 {
            return Ok::<_, Error>((None, 0, None));
        }
        let fit = default_fit(cfg.gamma)?;
        let blocks = ri.blocks(&mol, &fit)?;
        let terms = evaluate_correction(&blocks, &rdms, &obs.active())?;
        Ok((Some(terms), ri.n_cabs(), Some(fit.fit_rms)))
    })()
    .map_err(|e| e.in_stage("correction"))?;
    times.correction = t.elapsed().as_secs_f64();
    let e_correction = terms.as_ref().map_or(0.0, |t| t.total);

    let t = Instant::now();
    let e_fci_obs = if cfg.fci_reference && 2 * obs.n_obs() <= MAX_SPIN_ORBITALS {
        Some(fci_ground_state(&h, &g, e_nuc, n_el).map_err(|e| e.in_stage("fci"))?.energy)
    } else {
        None
    };
    times.fci = t.elapsed().as_secs_f64();

    let record = PesRecord {
        r: None,
        e_hf,
        e_vqe: vqe.energy,
        e_correction,
        e_total: vqe.energy + e_correction,
        e_fci_obs,
        n_qubits: 2 * obs.n_obs(),
        n_obs: obs.n_obs(),
        n_cabs,
        n_frozen: obs.n_frozen,
        vqe_iterations: vqe.iterations,
        vqe_converged: vqe.converged,
        grad_norm: vqe.grad_norm,
        gamma: cfg.gamma,
        fit_rms,
    };
    Ok(RunOutput { record, timing: times, theta: vqe.theta, trace: vqe.trace, rdms, terms })
}

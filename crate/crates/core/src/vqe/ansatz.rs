use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::statevector::{Excitation, Statevector};
use crate::error::{Error, Result};
use crate::fermion::spin_orbital;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    Hf,
    Spa,
    SpaG,
    Uccsd,
}

impl FromStr for AnsatzKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hf" => Ok(Self::Hf),
            "spa" => Ok(Self::Spa),
            "spa-g" | "spag" => Ok(Self::SpaG),
            "uccsd" => Ok(Self::Uccsd),
            _ => Err(Error::Invalid(format!("unknown ansatz '{s}'"))),
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hf => "hf",
            Self::Spa => "spa",
            Self::SpaG => "spa-g",
            Self::Uccsd => "uccsd",
        })
    }
}

impl AnsatzKind {
    pub fn is_spa(self) -> bool {
        matches!(self, Self::Spa | Self::SpaG)
    }
}

/// exp(weight·θ·(τ − τ†)) for the owning parameter θ.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub excitation: Excitation,
    pub weight: f64,
}

/// One variational parameter and the factors it drives, applied in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub label: String,
    pub factors: Vec<Factor>,
}

fn permutation_sign(v: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Sorted index lists and the sign picked up on the way.
pub fn canonical(exc: &Excitation) -> (Excitation, f64) {
    let mut c = exc.create.clone();
    let mut a = exc.annihilate.clone();
    let sign = permutation_sign(&mut c) * permutation_sign(&mut a);
    (Excitation { create: c, annihilate: a }, sign)
}

impl Generator {
    /// Merges factors with equal canonical excitations; order of first
    /// appearance is kept.
    pub fn from_raw(label: String, raw: Vec<(Excitation, f64)>) -> Self {
        let mut order: Vec<Excitation> = Vec::new();
        let mut w: BTreeMap<Excitation, f64> = BTreeMap::new();
        for (e, x) in raw {
            let (c, s) = canonical(&e);
            if !w.contains_key(&c) {
                order.push(c.clone());
            }
            *w.entry(c).or_insert(0.0) += s * x;
        }
        let factors = order
            .into_iter()
            .filter_map(|e| {
                let weight = w[&e];
                (weight.abs() > 1e-14).then_some(Factor { excitation: e, weight })
            })
            .collect();
        Self { label, factors }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub kind: AnsatzKind,
    pub n_qubits: usize,
    /// Bitstring of the closed-shell reference determinant.
    pub reference: usize,
    pub generators: Vec<Generator>,
}

fn reference_bits(doubly_occupied: &[usize]) -> usize {
    doubly_occupied
        .iter()
        .map(|&i| (1usize << spin_orbital(i, 0)) | (1usize << spin_orbital(i, 1)))
        .fold(0, |a, b| a | b)
}

fn check_orbitals(n_spatial: usize, lists: &[&[usize]]) -> Result<()> {
    if 2 * n_spatial > 24 {
        return Err(Error::OverBudget { dim: 2 * n_spatial, budget: 24 });
    }
    let mut seen = vec![false; n_spatial];
    for l in lists {
        for &p in *l {
            if p >= n_spatial || seen[p] {
                return Err(Error::Invalid(format!("orbital {p} out of range or repeated")));
            }
            seen[p] = true;
        }
    }
    Ok(())
}

impl Ansatz {
    pub fn hartree_fock(n_spatial: usize, doubly_occupied: &[usize]) -> Result<Self> {
        check_orbitals(n_spatial, &[doubly_occupied])?;
        Ok(Self {
            kind: AnsatzKind::Hf,
            n_qubits: 2 * n_spatial,
            reference: reference_bits(doubly_occupied),
            generators: Vec::new(),
        })
    }

    /// Spin-adapted singles and one parameter per unique spatial double
    /// (i→a, j→b), over active occupied and virtual orbitals.
    pub fn uccsd(n_spatial: usize, frozen: &[usize], active_occ: &[usize], virt: &[usize]) -> Result<Self> {
        check_orbitals(n_spatial, &[frozen, active_occ, virt])?;
        let mut occ: Vec<usize> = frozen.to_vec();
        occ.extend_from_slice(active_occ);
        let mut generators = Vec::new();
        let mut singles: Vec<(usize, usize)> = Vec::new();
        for &i in active_occ {
            for &a in virt {
                singles.push((i, a));
            }
        }
        for (x, &(i, a)) in singles.iter().enumerate() {
            for &(j, b) in &singles[x..] {
                let mut raw = Vec::new();
                for s in 0..2 {
                    for t in 0..2 {
                        let (ia, ib) = (spin_orbital(a, s), spin_orbital(b, t));
                        let (ii, ij) = (spin_orbital(i, s), spin_orbital(j, t));
                        if ia == ib || ii == ij {
                            continue;
                        }
                        raw.push((Excitation::new(&[ia, ib], &[ii, ij])?, 1.0));
                    }
                }
                let g = Generator::from_raw(format!("d{i}{a}_{j}{b}"), raw);
                if !g.factors.is_empty() {
                    generators.push(g);
                }
            }
        }
        for &(i, a) in &singles {
            let raw = (0..2)
                .map(|s| Excitation::new(&[spin_orbital(a, s)], &[spin_orbital(i, s)]).map(|e| (e, 1.0)))
                .collect::<Result<Vec<_>>>()?;
            generators.push(Generator::from_raw(format!("s{i}{a}"), raw));
        }
        Ok(Self {
            kind: AnsatzKind::Uccsd,
            n_qubits: 2 * n_spatial,
            reference: reference_bits(&occ),
            generators,
        })
    }

    /// Separable pair ansatz: each occupied orbital i pairs with its own set of
    /// virtuals. `generalized` adds pair rotations among each set.
    pub fn spa(n_spatial: usize, frozen: &[usize], pairs: &[(usize, Vec<usize>)], generalized: bool) -> Result<Self> {
        let occ_act: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let virt: Vec<usize> = pairs.iter().flat_map(|p| p.1.iter().copied()).collect();
        check_orbitals(n_spatial, &[frozen, &occ_act, &virt])?;
        let pair_exc = |from: usize, to: usize| {
            Excitation::new(&[spin_orbital(to, 0), spin_orbital(to, 1)], &[spin_orbital(from, 0), spin_orbital(from, 1)])
        };
        let mut generators = Vec::new();
        for (i, set) in pairs {
            for &a in set {
                generators.push(Generator::from_raw(format!("p{i}{a}"), vec![(pair_exc(*i, a)?, 1.0)]));
            }
        }
        if generalized {
            for (_, set) in pairs {
                for x in 0..set.len() {
                    for y in x + 1..set.len() {
                        let (a, b) = (set[x], set[y]);
                        generators.push(Generator::from_raw(format!("r{a}{b}"), vec![(pair_exc(a, b)?, 1.0)]));
                    }
                }
            }
        }
        let mut occ = frozen.to_vec();
        occ.extend_from_slice(&occ_act);
        Ok(Self {
            kind: if generalized { AnsatzKind::SpaG } else { AnsatzKind::Spa },
            n_qubits: 2 * n_spatial,
            reference: reference_bits(&occ),
            generators,
        })
    }

    pub fn n_params(&self) -> usize {
        self.generators.len()
    }

    pub fn n_electrons(&self) -> usize {
        self.reference.count_ones() as usize
    }

    /// Prepared state; `shift` adds an extra angle to factor (generator, factor).
    pub fn prepare_shifted(&self, theta: &[f64], shift: Option<(usize, usize, f64)>) -> Result<Statevector> {
        if theta.len() != self.n_params() {
            return Err(Error::Shape(format!("{} parameters for {} generators", theta.len(), self.n_params())));
        }
        let mut psi = Statevector::basis(self.n_qubits, self.reference);
        for (k, g) in self.generators.iter().enumerate() {
            for (f, fac) in g.factors.iter().enumerate() {
                let mut angle = fac.weight * theta[k];
                if let Some((sk, sf, d)) = shift {
                    if sk == k && sf == f {
                        angle += d;
                    }
                }
                psi.apply_excitation(&fac.excitation, angle);
            }
        }
        Ok(psi)
    }

    pub fn prepare(&self, theta: &[f64]) -> Result<Statevector> {
        self.prepare_shifted(theta, None)
    }

    /// Active-subspace weight of every factor, measured on the state just
    /// before that factor acts.
    pub fn factor_weights(&self, theta: &[f64]) -> Result<Vec<Vec<f64>>> {
        if theta.len() != self.n_params() {
            return Err(Error::Shape(format!("{} parameters for {} generators", theta.len(), self.n_params())));
        }
        let mut psi = Statevector::basis(self.n_qubits, self.reference);
        let mut out = Vec::with_capacity(self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            let mut w = Vec::with_capacity(g.factors.len());
            for fac in &g.factors {
                w.push(psi.active_weight(&fac.excitation));
                psi.apply_excitation(&fac.excitation, fac.weight * theta[k]);
            }
            out.push(w);
        }
        Ok(out)
    }
}

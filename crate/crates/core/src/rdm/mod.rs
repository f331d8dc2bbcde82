//! Spin-summed reduced density matrices.
//!
//! γ_pq = Σ_σ ⟨a†_{pσ} a_{qσ}⟩ and γ^{pq}_{rs} = Σ_{στ} ⟨a†_{pσ} a†_{qτ} a_{sτ} a_{rσ}⟩,
//! so that Σ_pq γ^{pq}_{pq} = N(N−1).

use std::io::Write;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::integrals::dump::write_tensor;
use crate::integrals::Tensor4;
use crate::vqe::Statevector;

/// Applies a†/a operators right to left; returns the image and its sign.
#[inline]
pub fn apply_ladders(x: usize, ops: &[(usize, bool)]) -> Option<(usize, f64)> {
    let mut y = x;
    let mut sign = 1.0;
    for &(m, create) in ops.iter().rev() {
        let occ = y >> m & 1 == 1;
        if occ == create {
            return None;
        }
        if (y & ((1usize << m) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        y ^= 1 << m;
    }
    Some((y, sign))
}

fn occupied(x: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&m| x >> m & 1 == 1).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rdms {
    pub one: DMatrix<f64>,
    pub two: Tensor4,
}

/// Spin-free 3-RDM γ^{pqr}_{stu} = Σ ⟨a†_p a†_q a†_r a_u a_t a_s⟩, dense n^6.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor6 {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Tensor6 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n.pow(6)] }
    }
    #[inline]
    pub fn idx(&self, i: [usize; 6]) -> usize {
        i.iter().fold(0, |a, &k| a * self.n + k)
    }
    #[inline]
    pub fn get(&self, i: [usize; 6]) -> f64 {
        self.data[self.idx(i)]
    }
    pub fn max_abs_diff(&self, o: &Tensor6) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// RDMs of a real wavefunction given as (bitstring, coefficient) pairs.
/// `lookup` returns the coefficient of an arbitrary bitstring.
pub fn rdms_from_coefficients(n_spatial: usize, support: &[(usize, f64)], lookup: impl Fn(usize) -> f64) -> Rdms {
    let n = n_spatial;
    let mut one = DMatrix::zeros(n, n);
    let mut two = Tensor4::zeros([n; 4]);
    for &(x, cx) in support {
        let occ = occupied(x);
        for &r in &occ {
            for q in (r % 2..2 * n).step_by(2) {
                if let Some((y, s)) = apply_ladders(x, &[(q, true), (r, false)]) {
                    one[(q / 2, r / 2)] += s * cx * lookup(y);
                }
            }
            for &s_ in &occ {
                if s_ == r {
                    continue;
                }
                // a†_p a†_q a_s a_r with p ∥ r and q ∥ s in spin
                for p in (r % 2..2 * n).step_by(2) {
                    for q in (s_ % 2..2 * n).step_by(2) {
                        if p == q {
                            continue;
                        }
                        if let Some((y, sg)) = apply_ladders(x, &[(p, true), (q, true), (s_, false), (r, false)]) {
                            let v = sg * cx * lookup(y);
                            if v != 0.0 {
                                let k = two.idx(p / 2, q / 2, r / 2, s_ / 2);
                                two.data[k] += v;
                            }
                        }
                    }
                }
            }
        }
    }
    Rdms { one, two }
}

/// Exact spin-free 3-RDM of a real wavefunction.
pub fn three_rdm(n_spatial: usize, support: &[(usize, f64)], lookup: impl Fn(usize) -> f64) -> Tensor6 {
    let n = n_spatial;
    let mut out = Tensor6::zeros(n);
    for &(x, cx) in support {
        let occ = occupied(x);
        for &s in &occ {
            for &t in &occ {
                for &u in &occ {
                    if s == t || t == u || s == u {
                        continue;
                    }
                    for p in (s % 2..2 * n).step_by(2) {
                        for q in (t % 2..2 * n).step_by(2) {
                            for r in (u % 2..2 * n).step_by(2) {
                                let ops = [(p, true), (q, true), (r, true), (u, false), (t, false), (s, false)];
                                if let Some((y, sg)) = apply_ladders(x, &ops) {
                                    let k = out.idx([p / 2, q / 2, r / 2, s / 2, t / 2, u / 2]);
                                    out.data[k] += sg * cx * lookup(y);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn real_support(state: &Statevector) -> Result<Vec<(usize, f64)>> {
    let mut v = Vec::new();
    for (x, a) in state.amplitudes().iter().enumerate() {
        if a.im.abs() > 1e-12 {
            return Err(Error::Invalid(format!("complex amplitude {:.3e} on {x:b}", a.im)));
        }
        if a.re != 0.0 {
            v.push((x, a.re));
        }
    }
    Ok(v)
}

/// Exact (infinite-shot) RDMs of a simulated state over `n_spatial` orbitals.
pub fn measure_rdms(state: &Statevector, n_spatial: usize) -> Result<Rdms> {
    if state.n_qubits != 2 * n_spatial {
        return Err(Error::Shape(format!("{} qubits for {n_spatial} spatial orbitals", state.n_qubits)));
    }
    let support = real_support(state)?;
    let a = state.amplitudes();
    Ok(rdms_from_coefficients(n_spatial, &support, |y| a[y].re))
}

pub fn measure_three_rdm(state: &Statevector, n_spatial: usize) -> Result<Tensor6> {
    let support = real_support(state)?;
    let a = state.amplitudes();
    Ok(three_rdm(n_spatial, &support, |y| a[y].re))
}

/// Single-shot standard deviation proxy of one spin-summed element: the l1
/// norm of each spin block's real Pauli expansion (1/2 one-body, 1 two-body),
/// with the independent blocks added in quadrature.
pub const PAULI_L1_ONE_BODY: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const PAULI_L1_TWO_BODY: f64 = 2.0;

impl Rdms {
    pub fn n_orbitals(&self) -> usize {
        self.one.nrows()
    }

    pub fn n_electrons(&self) -> f64 {
        self.one.trace()
    }

    pub fn two_trace(&self) -> f64 {
        let n = self.n_orbitals();
        (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).map(|(p, q)| self.two.get(p, q, p, q)).sum()
    }

    /// Σ_q γ^{pq}_{rq}, which equals (N − 1) γ_pr.
    pub fn partial_trace(&self) -> DMatrix<f64> {
        let n = self.n_orbitals();
        DMatrix::from_fn(n, n, |p, r| (0..n).map(|q| self.two.get(p, q, r, q)).sum())
    }

    /// E = Σ h_pq γ_pq + ½ Σ (pr|qs) γ^{pq}_{rs} + e_nuc, `g` in chemists' order.
    pub fn energy(&self, h: &DMatrix<f64>, g: &Tensor4, e_nuclear: f64) -> Result<f64> {
        let n = self.n_orbitals();
        if h.nrows() != n || g.dims != [n; 4] {
            return Err(Error::Shape(format!("integrals do not match {n} orbitals")));
        }
        let mut e = e_nuclear + h.component_mul(&self.one).sum();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        e += 0.5 * g.get(p, r, q, s) * self.two.get(p, q, r, s);
                    }
                }
            }
        }
        Ok(e)
    }

    /// Gaussian estimator noise with standard deviation l1/√shots per
    /// element, followed by symmetrization and trace renormalization.
    pub fn add_sampling_noise(&self, shots: u64, seed: u64) -> Result<Rdms> {
        if shots == 0 {
            return Err(Error::Invalid("shots must be positive".into()));
        }
        let n = self.n_orbitals();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sd1 = PAULI_L1_ONE_BODY / (shots as f64).sqrt();
        let sd2 = PAULI_L1_TWO_BODY / (shots as f64).sqrt();
        let d1 = Normal::new(0.0, sd1).map_err(|e| Error::Invalid(e.to_string()))?;
        let d2 = Normal::new(0.0, sd2).map_err(|e| Error::Invalid(e.to_string()))?;
        let mut one = self.one.map(|v| v + d1.sample(&mut rng));
        one = 0.5 * (&one + one.transpose());
        let mut two = self.two.clone();
        for v in two.data.iter_mut() {
            if *v != 0.0 {
                *v += d2.sample(&mut rng);
            }
        }
        // γ^{pq}_{rs} = γ^{qp}_{sr} = γ^{rs}_{pq}
        let sym = Tensor4::from_fn([n; 4], |p, q, r, s| {
            0.25 * (two.get(p, q, r, s) + two.get(q, p, s, r) + two.get(r, s, p, q) + two.get(s, r, q, p))
        });
        let mut out = Rdms { one, two: sym };
        let (ne, ne2) = (self.n_electrons(), self.two_trace());
        let t1 = out.n_electrons();
        let t2 = out.two_trace();
        if t1.abs() > 1e-12 {
            out.one *= ne / t1;
        }
        if t2.abs() > 1e-12 {
            out.two.scale(ne2 / t2);
        }
        Ok(out)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.n_orbitals();
        let one: Vec<f64> = (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).map(|(p, q)| self.one[(p, q)]).collect();
        write_tensor(&mut w, &[n, n], "G1", 0.0, &one)?;
        write_tensor(&mut w, &[n; 4], "G2", 0.0, &self.two.data)?;
        Ok(())
    }
}

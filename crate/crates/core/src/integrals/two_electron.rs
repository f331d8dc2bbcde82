use std::f64::consts::PI;

use rayon::prelude::*;

use super::boys::boys_array;
use super::geminal::GeminalFit;
use super::hermite::hermite_r;
use super::kernel::{Expansion, Kernel, Primitive};
use super::pairs::ShellPair;
use super::tensor::Tensor4;
use crate::basis::BasisSet;
use crate::error::Result;

/// Cauchy–Schwarz screening threshold on shell quartets.
pub const SCREEN_THRESHOLD: f64 = 1e-14;

/// Fills `g[0..=l]` with the scaled kernel derivatives for one primitive quartet,
/// prefactors included.
fn kernel_g(exp: &Expansion, p: f64, q: f64, r2: f64, l: usize, g: &mut [f64], f: &mut [f64]) {
    g[..=l].iter_mut().for_each(|x| *x = 0.0);
    let alpha = p * q / (p + q);
    for &(w, prim) in &exp.0 {
        match prim {
            Primitive::Coulomb => {
                let pref = w * 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt());
                boys_array(l, alpha * r2, f);
                let mut s = pref;
                for n in 0..=l {
                    g[n] += s * f[n];
                    s *= -2.0 * alpha;
                }
            }
            Primitive::Gaussian(om) => {
                let rho = alpha * om / (alpha + om);
                let pref = w * PI.powi(3) / ((p + q) * (alpha + om)).powf(1.5);
                let mut s = pref * (-rho * r2).exp();
                for gn in g[..=l].iter_mut() {
                    *gn += s;
                    s *= -2.0 * rho;
                }
            }
            Primitive::GaussianCoulomb(om) => {
                let kappa = alpha * om / (alpha + om);
                let beta = alpha * alpha / (alpha + om);
                let pref = w * 2.0 * PI.powf(2.5) / ((p + q).powf(1.5) * (alpha + om)) * (-kappa * r2).exp();
                boys_array(l, beta * r2, f);
                let mut sign = 1.0;
                for n in 0..=l {
                    // Leibniz: Σ_k C(n,k) κ^{n-k} β^k F_k
                    let mut sum = 0.0;
                    let mut binom = 1.0;
                    for k in 0..=n {
                        sum += binom * kappa.powi((n - k) as i32) * beta.powi(k as i32) * f[k];
                        binom = binom * (n - k) as f64 / (k + 1) as f64;
                    }
                    g[n] += pref * sign * sum;
                    sign *= -2.0;
                }
            }
        }
    }
}

struct Workspace {
    g: Vec<f64>,
    f: Vec<f64>,
    r: Vec<f64>,
    scratch: Vec<f64>,
    tmp: Vec<f64>,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            g: vec![0.0; 16],
            f: vec![0.0; 16],
            r: Vec::new(),
            scratch: Vec::new(),
            tmp: Vec::new(),
        }
    }
}

/// Contracted (ab|cd) block, row-major [na][nb][nc][nd].
fn quartet(bra: &ShellPair, ket: &ShellPair, exp: &Expansion, ws: &mut Workspace) -> Vec<f64> {
    let l = bra.la + bra.lb + ket.la + ket.lb;
    let n1 = l + 1;
    let nab = bra.na * bra.nb;
    let ncd = ket.na * ket.nb;
    let nh1 = bra.n_herm();
    let nh2 = ket.n_herm();
    let mut out = vec![0.0; nab * ncd];
    let ket_sign: Vec<f64> = ket
        .herm
        .iter()
        .map(|h| if (h[0] + h[1] + h[2]) % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    for pp in &bra.prims {
        for qq in &ket.prims {
            let pq = [0, 1, 2].map(|k| pp.center[k] - qq.center[k]);
            let r2 = pq[0] * pq[0] + pq[1] * pq[1] + pq[2] * pq[2];
            kernel_g(exp, pp.p, qq.p, r2, l, &mut ws.g, &mut ws.f);
            hermite_r(l, &ws.g, pq, &mut ws.r, &mut ws.scratch);
            // tmp[h1][cd] = Σ_h2 R[h1+h2] sign(h2) Ecd[cd][h2]
            ws.tmp.clear();
            ws.tmp.resize(nh1 * ncd, 0.0);
            for (i1, h1) in bra.herm.iter().enumerate() {
                let trow = &mut ws.tmp[i1 * ncd..(i1 + 1) * ncd];
                for (i2, h2) in ket.herm.iter().enumerate() {
                    let rv = ket_sign[i2] * ws.r[((h1[0] + h2[0]) * n1 + h1[1] + h2[1]) * n1 + h1[2] + h2[2]];
                    if rv == 0.0 {
                        continue;
                    }
                    for (cd, t) in trow.iter_mut().enumerate() {
                        *t += rv * qq.coef[cd * nh2 + i2];
                    }
                }
            }
            for ab in 0..nab {
                let erow = &pp.coef[ab * nh1..(ab + 1) * nh1];
                let orow = &mut out[ab * ncd..(ab + 1) * ncd];
                for (i1, &e) in erow.iter().enumerate() {
                    if e == 0.0 {
                        continue;
                    }
                    let trow = &ws.tmp[i1 * ncd..(i1 + 1) * ncd];
                    for (o, t) in orow.iter_mut().zip(trow) {
                        *o += e * t;
                    }
                }
            }
        }
    }
    out
}

fn shell_pairs(b1: &BasisSet, b2: &BasisSet) -> Vec<Vec<ShellPair>> {
    b1.shells
        .par_iter()
        .map(|a| {
            b2.shells
                .iter()
                .map(|b| ShellPair::new(a, b, b1.pure, b2.pure))
                .collect()
        })
        .collect()
}

fn schwarz(pairs: &[Vec<ShellPair>], exp: &Expansion) -> Vec<Vec<f64>> {
    pairs
        .par_iter()
        .map(|row| {
            let mut ws = Workspace::new();
            row.iter()
                .map(|sp| {
                    let blk = quartet(sp, sp, exp, &mut ws);
                    let nab = sp.na * sp.nb;
                    (0..nab)
                        .map(|k| blk[k * nab + k].abs())
                        .fold(0.0, f64::max)
                        .sqrt()
                })
                .collect()
        })
        .collect()
}

/// Chemist-notation block (12|34) over four bases for an operator expansion.
///
/// When `b1 == b2` (or `b3 == b4`, or the bra and ket pairs coincide) only
/// the unique shell combinations are evaluated and the rest is copied.
pub fn eri_block(b1: &BasisSet, b2: &BasisSet, b3: &BasisSet, b4: &BasisSet, exp: &Expansion) -> Tensor4 {
    eri_block_opts(b1, b2, b3, b4, exp, true)
}

/// Same as [`eri_block`]; with `use_symmetry = false` every quartet is evaluated.
pub fn eri_block_opts(
    b1: &BasisSet,
    b2: &BasisSet,
    b3: &BasisSet,
    b4: &BasisSet,
    exp: &Expansion,
    use_symmetry: bool,
) -> Tensor4 {
    let dims = [b1.ao_count(), b2.ao_count(), b3.ao_count(), b4.ao_count()];
    let mut out = Tensor4::zeros(dims);
    if dims.contains(&0) {
        return out;
    }
    let sym12 = use_symmetry && b1 == b2;
    let sym34 = use_symmetry && b3 == b4;
    let symbk = use_symmetry && b1 == b3 && b2 == b4;
    let bra = shell_pairs(b1, b2);
    let ket_owned;
    let ket = if b1 == b3 && b2 == b4 {
        &bra
    } else {
        ket_owned = shell_pairs(b3, b4);
        &ket_owned
    };
    let major = exp.majorant();
    let q_bra = schwarz(&bra, &major);
    let q_ket = if b1 == b3 && b2 == b4 { q_bra.clone() } else { schwarz(ket, &major) };
    let (o1, o2, o3, o4) = (b1.shell_offsets(), b2.shell_offsets(), b3.shell_offsets(), b4.shell_offsets());
    let bra_list: Vec<(usize, usize)> = (0..b1.shells.len())
        .flat_map(|a| (0..b2.shells.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| !sym12 || a >= b)
        .collect();
    let results: Vec<(usize, usize, Vec<(usize, usize, Vec<f64>)>)> = bra_list
        .par_iter()
        .map(|&(a, b)| {
            let mut ws = Workspace::new();
            let mut blocks = Vec::new();
            for c in 0..b3.shells.len() {
                for d in 0..b4.shells.len() {
                    if sym34 && d > c {
                        continue;
                    }
                    if symbk && c * b4.shells.len() + d > a * b2.shells.len() + b {
                        continue;
                    }
                    if q_bra[a][b] * q_ket[c][d] < SCREEN_THRESHOLD {
                        continue;
                    }
                    blocks.push((c, d, quartet(&bra[a][b], &ket[c][d], exp, &mut ws)));
                }
            }
            (a, b, blocks)
        })
        .collect();
    let n = dims;
    for (a, b, blocks) in results {
        let (na, nb) = (bra[a][b].na, bra[a][b].nb);
        for (c, d, blk) in blocks {
            let (nc, nd) = (ket[c][d].na, ket[c][d].nb);
            for i in 0..na {
                for j in 0..nb {
                    for k in 0..nc {
                        for l in 0..nd {
                            let v = blk[((i * nb + j) * nc + k) * nd + l];
                            let (p, q, r, s) = (o1[a] + i, o2[b] + j, o3[c] + k, o4[d] + l);
                            let mut put = |p: usize, q: usize, r: usize, s: usize| {
                                out.data[((p * n[1] + q) * n[2] + r) * n[3] + s] = v;
                            };
                            put(p, q, r, s);
                            if sym12 {
                                put(q, p, r, s);
                            }
                            if sym34 {
                                put(p, q, s, r);
                            }
                            if sym12 && sym34 {
                                put(q, p, s, r);
                            }
                            if symbk {
                                put(r, s, p, q);
                                if sym12 {
                                    put(r, s, q, p);
                                }
                                if sym34 {
                                    put(s, r, p, q);
                                }
                                if sym12 && sym34 {
                                    put(s, r, q, p);
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

/// Physicist-layout tensor `T[r][s][p][q] = <rs|X|pq>` with `r, s` on
/// `basis_bra` and `p, q` on `basis_ket`. Includes the -1/gamma prefactors
/// of the f12 kernels.
pub fn two_electron(
    basis_bra: &BasisSet,
    basis_ket: &BasisSet,
    kernel: &Kernel,
    fit: Option<&GeminalFit>,
) -> Result<Tensor4> {
    let exp = Expansion::of(kernel, fit)?;
    // (r p | s q) in chemist order, then reorder to <r s | p q>.
    let chem = eri_block(basis_bra, basis_ket, basis_bra, basis_ket, &exp);
    Ok(chem.permuted([0, 2, 1, 3]))
}

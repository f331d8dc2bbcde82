use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::boys::boys_array;
use super::hermite::{hermite_r, Hermite1D};
use super::kernel::KernelTag;
use crate::basis::{cart_components, cart_to_sph, component_norm, BasisSet, Molecule, Shell};
use crate::error::{Error, Result};

/// One-electron matrix over `basis`.
pub fn one_electron(basis: &BasisSet, molecule: &Molecule, tag: KernelTag) -> Result<DMatrix<f64>> {
    one_electron_mixed(basis, basis, molecule, tag)
}

/// One-electron matrix between two bases (rows `bra`, columns `ket`).
pub fn one_electron_mixed(
    bra: &BasisSet,
    ket: &BasisSet,
    molecule: &Molecule,
    tag: KernelTag,
) -> Result<DMatrix<f64>> {
    if !matches!(tag, KernelTag::Overlap | KernelTag::Kinetic | KernelTag::Nuclear) {
        return Err(Error::Invalid(format!("{} is not a one-electron kernel", tag.name())));
    }
    let off_a = bra.shell_offsets();
    let off_b = ket.shell_offsets();
    let mut out = DMatrix::zeros(bra.ao_count(), ket.ao_count());
    let blocks: Vec<(usize, usize, DMatrix<f64>)> = (0..bra.shells.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..ket.shells.len()).map(move |j| {
                let a = &bra.shells[i];
                let b = &ket.shells[j];
                let cart = cart_block(a, b, molecule, tag);
                let mut m = cart;
                if bra.pure {
                    m = cart_to_sph(a.l) * m;
                }
                if ket.pure {
                    m *= cart_to_sph(b.l).transpose();
                }
                (i, j, m)
            })
        })
        .collect();
    for (i, j, m) in blocks {
        out.view_mut((off_a[i], off_b[j]), (m.nrows(), m.ncols()))
            .copy_from(&m);
    }
    Ok(out)
}

fn cart_block(a: &Shell, b: &Shell, molecule: &Molecule, tag: KernelTag) -> DMatrix<f64> {
    let ca = cart_components(a.l);
    let cb = cart_components(b.l);
    let mut m = DMatrix::zeros(ca.len(), cb.len());
    let extra = if tag == KernelTag::Kinetic { 2 } else { 0 };
    let lsum = a.l + b.l;
    let mut g = vec![0.0; lsum + 1];
    let mut r = Vec::new();
    let mut scratch = Vec::new();
    let mut rtabs: Vec<(f64, Vec<f64>)> = Vec::new();
    for (&alpha, &cfa) in a.exponents.iter().zip(&a.coefficients) {
        for (&beta, &cfb) in b.exponents.iter().zip(&b.coefficients) {
            let p = alpha + beta;
            let e: [Hermite1D; 3] =
                [0, 1, 2].map(|k| Hermite1D::new(a.l, b.l + extra, alpha, beta, a.center[k], b.center[k]));
            let pc = cfa * cfb;
            if tag == KernelTag::Nuclear {
                let centre = [0, 1, 2].map(|k| (alpha * a.center[k] + beta * b.center[k]) / p);
                rtabs.clear();
                for atom in &molecule.atoms {
                    let d = [0, 1, 2].map(|k| centre[k] - atom.position[k]);
                    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                    boys_array(lsum, p * r2, &mut g);
                    let mut f = 1.0;
                    for gn in g.iter_mut() {
                        *gn *= f;
                        f *= -2.0 * p;
                    }
                    hermite_r(lsum, &g, d, &mut r, &mut scratch);
                    rtabs.push((atom.z as f64, r.clone()));
                }
            }
            let n1 = lsum + 1;
            for (ia, x) in ca.iter().enumerate() {
                for (ib, y) in cb.iter().enumerate() {
                    let norm = pc * component_norm(*x) * component_norm(*y);
                    let s1 = |k: usize, j: usize| e[k].get(x[k], j, 0);
                    let v = match tag {
                        KernelTag::Overlap => {
                            (PI / p).powf(1.5) * s1(0, y[0]) * s1(1, y[1]) * s1(2, y[2])
                        }
                        KernelTag::Kinetic => {
                            let t1 = |k: usize| {
                                let j = y[k];
                                let mut t = -2.0 * beta * beta * s1(k, j + 2)
                                    + beta * (2 * j + 1) as f64 * s1(k, j);
                                if j >= 2 {
                                    t -= 0.5 * (j * (j - 1)) as f64 * s1(k, j - 2);
                                }
                                t
                            };
                            let (sx, sy, sz) = (s1(0, y[0]), s1(1, y[1]), s1(2, y[2]));
                            (PI / p).powf(1.5) * (t1(0) * sy * sz + sx * t1(1) * sz + sx * sy * t1(2))
                        }
                        KernelTag::Nuclear => {
                            let mut acc = 0.0;
                            for t in 0..=(x[0] + y[0]) {
                                let et = e[0].get(x[0], y[0], t);
                                for u in 0..=(x[1] + y[1]) {
                                    let eu = e[1].get(x[1], y[1], u);
                                    for w in 0..=(x[2] + y[2]) {
                                        let ev = e[2].get(x[2], y[2], w);
                                        let rsum: f64 = rtabs
                                            .iter()
                                            .map(|(z, r)| z * r[(t * n1 + u) * n1 + w])
                                            .sum();
                                        acc += et * eu * ev * rsum;
                                    }
                                }
                            }
                            -2.0 * PI / p * acc
                        }
                        _ => unreachable!(),
                    };
                    m[(ia, ib)] += norm * v;
                }
            }
        }
    }
    m
}

//! Numerical-quadrature oracles for Gaussian integrals. Shares nothing with
//! the analytic engine beyond the basis definition.

use nalgebra::{DMatrix, SymmetricEigen};
use vqe_r12::basis::{cart_components, component_norm, BasisSet};

/// Cartesian primitive term: coef * (r-A)^n exp(-alpha |r-A|^2).
#[derive(Clone, Copy, Debug)]
pub struct Prim {
    pub coef: f64,
    pub center: [f64; 3],
    pub alpha: f64,
    pub pow: [usize; 3],
}

/// Every AO of a Cartesian basis as a list of primitives.
pub fn cartesian_functions(basis: &BasisSet) -> Vec<Vec<Prim>> {
    assert!(!basis.pure, "quadrature oracle works on Cartesian bases");
    let mut out = Vec::new();
    for sh in &basis.shells {
        for c in cart_components(sh.l) {
            let n = component_norm(c);
            out.push(
                sh.exponents
                    .iter()
                    .zip(&sh.coefficients)
                    .map(|(&a, &k)| Prim {
                        coef: k * n,
                        center: sh.center,
                        alpha: a,
                        pow: c,
                    })
                    .collect(),
            );
        }
    }
    out
}

pub fn eval(f: &[Prim], r: [f64; 3]) -> f64 {
    f.iter()
        .map(|p| {
            let d = [r[0] - p.center[0], r[1] - p.center[1], r[2] - p.center[2]];
            p.coef
                * d[0].powi(p.pow[0] as i32)
                * d[1].powi(p.pow[1] as i32)
                * d[2].powi(p.pow[2] as i32)
                * (-p.alpha * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2])).exp()
        })
        .sum()
}

/// Gauss–Legendre nodes and weights on [a, b] via Golub–Welsch.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let j = DMatrix::from_fn(n, n, |i, k| {
        if i + 1 == k || k + 1 == i {
            let m = i.max(k) as f64;
            m / (4.0 * m * m - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let e = SymmetricEigen::new(j);
    let mut v: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = e.eigenvalues[i];
            let w = 2.0 * e.eigenvectors[(0, i)].powi(2);
            (0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w)
        })
        .collect();
    v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    v
}

/// Gauss–Hermite nodes and weights for weight exp(-t^2).
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let j = DMatrix::from_fn(n, n, |i, k| {
        if i + 1 == k || k + 1 == i {
            (i.max(k) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let e = SymmetricEigen::new(j);
    (0..n)
        .map(|i| (e.eigenvalues[i], std::f64::consts::PI.sqrt() * e.eigenvectors[(0, i)].powi(2)))
        .collect()
}

/// 3-D tensor-product Gauss–Legendre integral of f·g over a box.
pub fn overlap_quadrature(f: &[Prim], g: &[Prim], half_width: f64, n: usize) -> f64 {
    let nodes = gauss_legendre(n, -half_width, half_width);
    let mut s = 0.0;
    for &(x, wx) in &nodes {
        for &(y, wy) in &nodes {
            for &(z, wz) in &nodes {
                let r = [x, y, z];
                s += wx * wy * wz * eval(f, r) * eval(g, r);
            }
        }
    }
    s
}

/// One-dimensional cross-correlation factor for a primitive quartet:
/// ∫ dx (x-A)^a (x-B)^b (x+s-C)^c (x+s-D)^d exp(...).
fn corr_1d(p: [&Prim; 4], k: usize, s: f64, gh: &[(f64, f64)]) -> f64 {
    let shift = [0.0, 0.0, s, s];
    let zeta: f64 = p.iter().map(|q| q.alpha).sum();
    let c: [f64; 4] = std::array::from_fn(|i| p[i].center[k] - shift[i]);
    let x0: f64 = (0..4).map(|i| p[i].alpha * c[i]).sum::<f64>() / zeta;
    // Σ α_i (x - c_i)^2 = ζ (x - x0)^2 + rest
    let rest: f64 = (0..4).map(|i| p[i].alpha * c[i] * c[i]).sum::<f64>() - zeta * x0 * x0;
    let gauss = (-rest).exp();
    if gauss == 0.0 {
        return 0.0;
    }
    let sq = zeta.sqrt();
    let mut acc = 0.0;
    for &(t, w) in gh {
        let x = x0 + t / sq;
        let mut v = w;
        for i in 0..4 {
            v *= (x - c[i]).powi(p[i].pow[k] as i32);
        }
        acc += v;
    }
    gauss * acc / sq
}

/// (ab|K|cd) = ∫ d^3 s K(|s|) C(s), C the pair-density cross-correlation,
/// integrated in spherical coordinates.
pub fn two_electron_quadrature(a: &[Prim], b: &[Prim], c: &[Prim], d: &[Prim], kernel: &dyn Fn(f64) -> f64) -> f64 {
    let gh = gauss_hermite(8);
    let mut radial = Vec::new();
    for (lo, hi) in [(0.0, 0.5), (0.5, 1.5), (1.5, 3.0), (3.0, 6.0), (6.0, 12.0), (12.0, 20.0)] {
        radial.extend(gauss_legendre(12, lo, hi));
    }
    let cos_nodes = gauss_legendre(14, -1.0, 1.0);
    let nphi = 24;
    let mut quartets = Vec::new();
    for pa in a {
        for pb in b {
            for pc in c {
                for pd in d {
                    quartets.push([pa, pb, pc, pd]);
                }
            }
        }
    }
    let mut total = 0.0;
    for &(r, wr) in &radial {
        let kr = kernel(r) * r * r * wr;
        if kr == 0.0 {
            continue;
        }
        for &(ct, wt) in &cos_nodes {
            let st = (1.0 - ct * ct).sqrt();
            for ip in 0..nphi {
                let phi = 2.0 * std::f64::consts::PI * ip as f64 / nphi as f64;
                let s = [r * st * phi.cos(), r * st * phi.sin(), r * ct];
                let mut cval = 0.0;
                for q in &quartets {
                    let pref = q[0].coef * q[1].coef * q[2].coef * q[3].coef;
                    cval += pref * corr_1d(*q, 0, s[0], &gh) * corr_1d(*q, 1, s[1], &gh) * corr_1d(*q, 2, s[2], &gh);
                }
                total += kr * wt * (2.0 * std::f64::consts::PI / nphi as f64) * cval;
            }
        }
    }
    total
}

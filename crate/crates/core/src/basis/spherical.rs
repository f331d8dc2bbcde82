//! Cartesian to real solid-harmonic transformation.
//!
//! Pure p functions are ordered x, y, z. For d and f the order is m = -l..l:
//! d: xy, yz, 2z²-x²-y², xz, x²-y²;
//! f: 3x²y-y³, xyz, y(4z²-x²-y²), 2z³-3x²z-3y²z, x(4z²-x²-y²), x²z-y²z, x³-3xy².
//! Higher l use the general real solid harmonics, same m order.

use nalgebra::DMatrix;

use super::shell::{cart_components, component_norm, n_cart, same_center_overlap};

type Poly = &'static [(f64, [usize; 3])];

const D_POLYS: [Poly; 5] = [
    &[(1.0, [1, 1, 0])],
    &[(1.0, [0, 1, 1])],
    &[(2.0, [0, 0, 2]), (-1.0, [2, 0, 0]), (-1.0, [0, 2, 0])],
    &[(1.0, [1, 0, 1])],
    &[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])],
];

const F_POLYS: [Poly; 7] = [
    &[(3.0, [2, 1, 0]), (-1.0, [0, 3, 0])],
    &[(1.0, [1, 1, 1])],
    &[(4.0, [0, 1, 2]), (-1.0, [2, 1, 0]), (-1.0, [0, 3, 0])],
    &[(2.0, [0, 0, 3]), (-3.0, [2, 0, 1]), (-3.0, [0, 2, 1])],
    &[(4.0, [1, 0, 2]), (-1.0, [3, 0, 0]), (-1.0, [1, 2, 0])],
    &[(1.0, [2, 0, 1]), (-1.0, [0, 2, 1])],
    &[(1.0, [3, 0, 0]), (-3.0, [1, 2, 0])],
];

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

/// Unnormalized real solid harmonic S_lm as Cartesian monomials.
fn solid_harmonic(l: usize, m: i64) -> Vec<(f64, [usize; 3])> {
    let am = m.unsigned_abs() as usize;
    let km = usize::from(m < 0);
    let mut out: Vec<(f64, [usize; 3])> = Vec::new();
    for t in 0..=(l - am) / 2 {
        for u in 0..=t {
            for k in (km..=am).step_by(2) {
                let sign = if (t + (k - km) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * 0.25f64.powi(t as i32) * binom(l, t) * binom(l - t, am + t) * binom(t, u) * binom(am, k);
                if 2 * t + am < 2 * u + k {
                    continue;
                }
                let e = [2 * t + am - 2 * u - k, 2 * u + k, l - 2 * t - am];
                match out.iter_mut().find(|(_, x)| *x == e) {
                    Some(entry) => entry.0 += c,
                    None => out.push((c, e)),
                }
            }
        }
    }
    out.retain(|(c, _)| *c != 0.0);
    out
}

/// Matrix `T` of shape (2l+1) x n_cart with `sph_i = sum_c T[i,c] cart_c`,
/// both sides normalized.
pub fn cart_to_sph(l: usize) -> DMatrix<f64> {
    let comps = cart_components(l);
    let nc = n_cart(l);
    if l <= 1 {
        return DMatrix::identity(2 * l + 1, nc);
    }
    let general: Vec<Vec<(f64, [usize; 3])>>;
    let polys: Vec<&[(f64, [usize; 3])]> = match l {
        2 => D_POLYS.to_vec(),
        3 => F_POLYS.to_vec(),
        _ => {
            general = (-(l as i64)..=l as i64).map(|m| solid_harmonic(l, m)).collect();
            general.iter().map(|p| p.as_slice()).collect()
        }
    };
    let mut t = DMatrix::zeros(polys.len(), nc);
    for (i, poly) in polys.iter().enumerate() {
        for &(u, c) in poly.iter() {
            let j = comps.iter().position(|&x| x == c).unwrap();
            t[(i, j)] = u / component_norm(c);
        }
        let mut n2 = 0.0;
        for a in 0..nc {
            for b in 0..nc {
                n2 += t[(i, a)] * t[(i, b)] * same_center_overlap(comps[a], comps[b]);
            }
        }
        let s = n2.sqrt().recip();
        for a in 0..nc {
            t[(i, a)] *= s;
        }
    }
    t
}

//! Spin-orbital RDMs of a singlet and the cumulant approximation to γ₃.

use nalgebra::DMatrix;

use crate::integrals::Tensor4;
use crate::rdm::Tensor6;

/// Spin-orbital γ₁ and γ₂ of a singlet built from spin-free ones.
/// Spin orbital `2p + σ`.
pub struct SpinRdms {
    pub n: usize,
    pub g1: DMatrix<f64>,
    pub g2: Vec<f64>,
}

impl SpinRdms {
    pub fn from_spin_free(g1: &DMatrix<f64>, g2: &Tensor4) -> Self {
        let n = g1.nrows();
        let m = 2 * n;
        let mut s1 = DMatrix::zeros(m, m);
        for s in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    s1[(2 * p + s, 2 * q + s)] = 0.5 * g1[(p, q)];
                }
            }
        }
        let x = |p: usize, q: usize, r: usize, s: usize| (2.0 * g2.get(p, q, r, s) + g2.get(p, q, s, r)) / 6.0;
        let mut s2 = vec![0.0; m.pow(4)];
        let id = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let (xd, xx) = (x(p, q, r, s), x(p, q, s, r));
                        for a in 0..2 {
                            for b in 0..2 {
                                if a == b {
                                    s2[id(2 * p + a, 2 * q + a, 2 * r + a, 2 * s + a)] = xd - xx;
                                } else {
                                    s2[id(2 * p + a, 2 * q + b, 2 * r + a, 2 * s + b)] = xd;
                                    s2[id(2 * p + a, 2 * q + b, 2 * r + b, 2 * s + a)] = -xx;
                                }
                            }
                        }
                    }
                }
            }
        }
        Self { n, g1: s1, g2: s2 }
    }

    #[inline]
    fn g2(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let m = 2 * self.n;
        self.g2[((a * m + b) * m + c) * m + d]
    }
}

const PERMS: [([usize; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([0, 2, 1], -1.0),
    ([1, 0, 2], -1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([2, 1, 0], -1.0),
];

/// γ^{pqr}_{stu} with the three-body cumulant dropped, filled only where the
/// first two upper indices lie in `active`; other entries stay zero.
pub fn reconstruct_three_rdm(g1: &DMatrix<f64>, g2: &Tensor4, active: &[usize]) -> Tensor6 {
    let so = SpinRdms::from_spin_free(g1, g2);
    let n = so.n;
    let m = 2 * n;
    let mut lam = vec![0.0; m.pow(4)];
    for a in 0..m {
        for b in 0..m {
            for d in 0..m {
                for e in 0..m {
                    lam[((a * m + b) * m + d) * m + e] =
                        so.g2(a, b, d, e) - so.g1[(a, d)] * so.g1[(b, e)] + so.g1[(a, e)] * so.g1[(b, d)];
                }
            }
        }
    }
    let l = |a: usize, b: usize, d: usize, e: usize| lam[((a * m + b) * m + d) * m + e];
    let gamma = |x: [usize; 3], y: [usize; 3]| -> f64 {
        let mut v = 0.0;
        for (pl, sl) in PERMS {
            let yl = [y[pl[0]], y[pl[1]], y[pl[2]]];
            v += sl * so.g1[(x[0], yl[0])] * so.g1[(x[1], yl[1])] * so.g1[(x[2], yl[2])];
            for (pu, su) in PERMS {
                let xu = [x[pu[0]], x[pu[1]], x[pu[2]]];
                let g = so.g1[(xu[2], yl[2])];
                if g != 0.0 {
                    v += 0.25 * su * sl * l(xu[0], xu[1], yl[0], yl[1]) * g;
                }
            }
        }
        v
    };
    let mut out = Tensor6::zeros(n);
    for &p in active {
        for &q in active {
            for r in 0..n {
                for s in 0..n {
                    for t in 0..n {
                        for u in 0..n {
                            let mut v = 0.0;
                            for a in 0..2 {
                                for b in 0..2 {
                                    for c in 0..2 {
                                        v += gamma(
                                            [2 * p + a, 2 * q + b, 2 * r + c],
                                            [2 * s + a, 2 * t + b, 2 * u + c],
                                        );
                                    }
                                }
                            }
                            let k = out.idx([p, q, r, s, t, u]);
                            out.data[k] = v;
                        }
                    }
                }
            }
        }
    }
    out
}

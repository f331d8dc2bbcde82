//! McMurchie–Davidson Hermite expansion coefficients and auxiliary integrals.

/// Hermite expansion coefficients E^{ij}_t for one Cartesian direction.
///
/// Stored as `e[(i * (lb + 1) + j) * (la + lb + 1) + t]`.
#[derive(Debug, Clone)]
pub struct Hermite1D {
    pub la: usize,
    pub lb: usize,
    pub e: Vec<f64>,
}

impl Hermite1D {
    pub fn new(la: usize, lb: usize, a: f64, b: f64, xa: f64, xb: f64) -> Self {
        let p = a + b;
        let mu = a * b / p;
        let xab = xa - xb;
        let xp = (a * xa + b * xb) / p;
        let (xpa, xpb) = (xp - xa, xp - xb);
        let nt = la + lb + 1;
        let mut e = vec![0.0; (la + 1) * (lb + 1) * nt];
        let idx = |i: usize, j: usize, t: usize| (i * (lb + 1) + j) * nt + t;
        let oo2p = 0.5 / p;
        e[idx(0, 0, 0)] = (-mu * xab * xab).exp();
        for i in 0..=la {
            for j in 0..=lb {
                if i == 0 && j == 0 {
                    continue;
                }
                let (pi, pj, x) = if i > 0 { (i - 1, j, xpa) } else { (i, j - 1, xpb) };
                for t in 0..=(i + j) {
                    let mut v = x * e[idx(pi, pj, t)];
                    if t > 0 {
                        v += oo2p * e[idx(pi, pj, t - 1)];
                    }
                    if t < pi + pj {
                        v += (t + 1) as f64 * e[idx(pi, pj, t + 1)];
                    }
                    e[idx(i, j, t)] = v;
                }
            }
        }
        Hermite1D { la, lb, e }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        if t > i + j {
            return 0.0;
        }
        self.e[(i * (self.lb + 1) + j) * (self.la + self.lb + 1) + t]
    }
}

/// Hermite auxiliary integrals R_{tuv} for `t+u+v <= l`.
///
/// `g[n]` holds the n-th scaled derivative of the base kernel function,
/// `2^n d^n f / d(R²)^n`, so the same recursion serves every kernel.
/// Output is indexed `(t * (l + 1) + u) * (l + 1) + v`.
pub fn hermite_r(l: usize, g: &[f64], pq: [f64; 3], out: &mut Vec<f64>, scratch: &mut Vec<f64>) {
    let n1 = l + 1;
    let size = n1 * n1 * n1;
    out.clear();
    out.resize(size, 0.0);
    scratch.clear();
    scratch.resize(size, 0.0);
    let idx = |t: usize, u: usize, v: usize| (t * n1 + u) * n1 + v;
    // `out` holds level n+1 while `scratch` receives level n.
    for n in (0..=l).rev() {
        let lim = l - n;
        scratch[0] = g[n];
        for t in 0..=lim {
            for u in 0..=(lim - t) {
                for v in 0..=(lim - t - u) {
                    if t + u + v == 0 {
                        continue;
                    }
                    let val = if t > 0 {
                        let mut r = pq[0] * out[idx(t - 1, u, v)];
                        if t > 1 {
                            r += (t - 1) as f64 * out[idx(t - 2, u, v)];
                        }
                        r
                    } else if u > 0 {
                        let mut r = pq[1] * out[idx(t, u - 1, v)];
                        if u > 1 {
                            r += (u - 1) as f64 * out[idx(t, u - 2, v)];
                        }
                        r
                    } else {
                        let mut r = pq[2] * out[idx(t, u, v - 1)];
                        if v > 1 {
                            r += (v - 1) as f64 * out[idx(t, u, v - 2)];
                        }
                        r
                    };
                    scratch[idx(t, u, v)] = val;
                }
            }
        }
        std::mem::swap(out, scratch);
    }
}

/// All (t, u, v) with t+u+v <= l, ordered by total degree then lexicographically.
pub fn hermite_indices(l: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for n in 0..=l {
        for t in (0..=n).rev() {
            for u in (0..=(n - t)).rev() {
                out.push([t, u, n - t - u]);
            }
        }
    }
    out
}

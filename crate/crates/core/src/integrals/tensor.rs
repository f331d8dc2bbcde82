use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major 4-index tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor4 {
    pub dims: [usize; 4],
    pub data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dims: [usize; 4]) -> Self {
        Tensor4 {
            dims,
            data: vec![0.0; dims.iter().product()],
        }
    }

    pub fn from_fn(dims: [usize; 4], mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor4::zeros(dims);
        let mut n = 0;
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    for l in 0..dims[3] {
                        t.data[n] = f(i, j, k, l);
                        n += 1;
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dims[1] + j) * self.dims[2] + k) * self.dims[3] + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let n = self.idx(i, j, k, l);
        self.data[n] = v;
    }

    /// New tensor with `out[i0,i1,i2,i3] = self[i_perm[0], ...]`, i.e. axis
    /// `k` of the result is axis `perm[k]` of `self`.
    pub fn permuted(&self, perm: [usize; 4]) -> Tensor4 {
        let dims = perm.map(|p| self.dims[p]);
        let mut out = Tensor4::zeros(dims);
        let mut ix = [0usize; 4];
        let mut n = 0;
        for a in 0..dims[0] {
            ix[perm[0]] = a;
            for b in 0..dims[1] {
                ix[perm[1]] = b;
                for c in 0..dims[2] {
                    ix[perm[2]] = c;
                    for d in 0..dims[3] {
                        ix[perm[3]] = d;
                        out.data[n] = self.get(ix[0], ix[1], ix[2], ix[3]);
                        n += 1;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest violation of the 8-fold real-orbital symmetry of a
    /// chemist-ordered tensor over a single basis.
    pub fn symmetry_violation(&self) -> f64 {
        let n = self.dims[0];
        assert!(self.dims.iter().all(|&d| d == n), "symmetry check needs a square tensor");
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        for w in [
                            self.get(j, i, k, l),
                            self.get(i, j, l, k),
                            self.get(j, i, l, k),
                            self.get(k, l, i, j),
                            self.get(l, k, i, j),
                            self.get(k, l, j, i),
                            self.get(l, k, j, i),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Contracts axis `axis` with the rows of `c`: out[.., q, ..] = Σ_p c[p, q] t[.., p, ..].
    pub fn transform_axis(&self, axis: usize, c: &DMatrix<f64>) -> Result<Tensor4> {
        if c.nrows() != self.dims[axis] {
            return Err(Error::Shape(format!(
                "axis {axis} has length {} but coefficients have {} rows",
                self.dims[axis],
                c.nrows()
            )));
        }
        let mut dims = self.dims;
        dims[axis] = c.ncols();
        let outer: usize = self.dims[..axis].iter().product();
        let inner: usize = self.dims[axis + 1..].iter().product();
        let (np, nq) = (c.nrows(), c.ncols());
        let mut out = Tensor4::zeros(dims);
        for o in 0..outer {
            let src = &self.data[o * np * inner..(o + 1) * np * inner];
            let dst = &mut out.data[o * nq * inner..(o + 1) * nq * inner];
            for p in 0..np {
                let row = &src[p * inner..(p + 1) * inner];
                if row.iter().all(|&x| x == 0.0) {
                    continue;
                }
                for q in 0..nq {
                    let w = c[(p, q)];
                    if w == 0.0 {
                        continue;
                    }
                    let d = &mut dst[q * inner..(q + 1) * inner];
                    for (x, y) in d.iter_mut().zip(row) {
                        *x += w * y;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Quarter transformation with an independent coefficient matrix per index,
/// O(N^5) overall.
pub fn transform_mo(t: &Tensor4, c: [&DMatrix<f64>; 4]) -> Result<Tensor4> {
    let mut cur = t.transform_axis(0, c[0])?;
    for (axis, m) in c.iter().enumerate().skip(1) {
        cur = cur.transform_axis(axis, m)?;
    }
    Ok(cur)
}

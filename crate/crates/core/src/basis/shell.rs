use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest supported angular momentum.
pub const MAX_L: usize = 4;

/// Contracted Gaussian shell.
///
/// `coefficients` multiply raw primitives `x^a y^b z^c exp(-alpha r^2)` and
/// already include primitive and contraction normalization for the `x^l`
/// component. Other Cartesian components pick up [`component_norm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub center: [f64; 3],
    pub l: usize,
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Index of the owning atom in the molecule, if any.
    pub atom: Option<usize>,
}

impl Shell {
    /// Builds a shell from file-style contraction coefficients and normalizes it.
    pub fn new(
        center: [f64; 3],
        l: usize,
        exponents: Vec<f64>,
        contraction: Vec<f64>,
        atom: Option<usize>,
    ) -> Result<Self> {
        if l > MAX_L {
            return Err(Error::Basis(format!("angular momentum {l} above maximum {MAX_L}")));
        }
        if exponents.is_empty() || exponents.len() != contraction.len() {
            return Err(Error::Basis(format!(
                "shell has {} exponents and {} coefficients",
                exponents.len(),
                contraction.len()
            )));
        }
        if let Some(bad) = exponents.iter().find(|&&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::Basis(format!("non-positive exponent {bad}")));
        }
        let mut coefficients: Vec<f64> = exponents
            .iter()
            .zip(&contraction)
            .map(|(&a, &c)| c * primitive_norm(a, l))
            .collect();
        let norm2 = contracted_self_overlap(l, &exponents, &coefficients);
        if !(norm2 > 0.0) {
            return Err(Error::Basis("contracted function has zero norm".into()));
        }
        let s = norm2.sqrt().recip();
        coefficients.iter_mut().for_each(|c| *c *= s);
        Ok(Shell {
            center,
            l,
            exponents,
            coefficients,
            atom,
        })
    }

    pub fn n_cart(&self) -> usize {
        n_cart(self.l)
    }

    pub fn n_sph(&self) -> usize {
        2 * self.l + 1
    }

    pub fn n_functions(&self, pure: bool) -> usize {
        if pure {
            self.n_sph()
        } else {
            self.n_cart()
        }
    }

    /// Self-overlap of the `x^l` component; 1 after construction.
    pub fn self_overlap(&self) -> f64 {
        contracted_self_overlap(self.l, &self.exponents, &self.coefficients)
    }

    pub fn min_exponent(&self) -> f64 {
        self.exponents.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn n_cart(l: usize) -> usize {
    (l + 1) * (l + 2) / 2
}

/// Cartesian exponents of a shell, lexicographic and descending in `a`.
pub fn cart_components(l: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(n_cart(l));
    for a in (0..=l).rev() {
        for b in (0..=l - a).rev() {
            out.push([a, b, l - a - b]);
        }
    }
    out
}

/// (2n-1)!!
fn odd_df(n: usize) -> f64 {
    (1..=n).map(|k| (2 * k - 1) as f64).product()
}

/// Factor turning the `x^l`-normalized shell into a normalized `x^a y^b z^c` function.
pub fn component_norm(c: [usize; 3]) -> f64 {
    let l = c[0] + c[1] + c[2];
    (odd_df(l) / (odd_df(c[0]) * odd_df(c[1]) * odd_df(c[2]))).sqrt()
}

fn primitive_norm(alpha: f64, l: usize) -> f64 {
    (2.0 * alpha / PI).powf(0.75) * (4.0 * alpha).powf(l as f64 / 2.0) / odd_df(l).sqrt()
}

fn contracted_self_overlap(l: usize, exps: &[f64], coefs: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &ca) in exps.iter().zip(coefs) {
        for (&b, &cb) in exps.iter().zip(coefs) {
            let p = a + b;
            s += ca * cb * (PI / p).powf(1.5) * odd_df(l) / (2.0 * p).powi(l as i32);
        }
    }
    s
}

/// Same-center overlap of two normalized Cartesian components of one shell.
pub fn same_center_overlap(c1: [usize; 3], c2: [usize; 3]) -> f64 {
    let l = c1[0] + c1[1] + c1[2];
    let mut v = component_norm(c1) * component_norm(c2) / odd_df(l);
    for k in 0..3 {
        let e = c1[k] + c2[k];
        if e % 2 == 1 {
            return 0.0;
        }
        v *= odd_df(e / 2);
    }
    v
}

//! Gaussian-geminal fit of the Slater correlation factor exp(-gamma r).

use std::collections::HashMap;
use std::sync::Mutex;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default acceptance threshold on the weighted RMS residual.
pub const DEFAULT_FIT_THRESHOLD: f64 = 5e-4;

/// Uniform fit grid on [0, r_max] with weight exp(-t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitGrid {
    pub r_max: f64,
    pub n_points: usize,
}

impl Default for FitGrid {
    fn default() -> Self {
        FitGrid {
            r_max: 10.0,
            n_points: 200,
        }
    }
}

impl FitGrid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.n_points.max(2);
        (0..n)
            .map(|i| {
                let t = self.r_max * i as f64 / (n - 1) as f64;
                (t, (-t).exp())
            })
            .collect()
    }
}

/// exp(-gamma t) ≈ Σ c_i exp(-a_i t²). The -1/gamma prefactor is not included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeminalFit {
    pub gamma: f64,
    /// (coefficient, exponent), exponents strictly increasing.
    pub terms: Vec<(f64, f64)>,
    pub fit_rms: f64,
}

impl GeminalFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(c, a)| c * (-a * t * t).exp()).sum()
    }
}

/// Weighted linear least squares for the coefficients at fixed exponents.
/// Returns (coefficients, weighted rms).
pub fn solve_coefficients(gamma: f64, exponents: &[f64], grid: &FitGrid) -> (Vec<f64>, f64) {
    let pts = grid.points();
    let n = exponents.len();
    let a = DMatrix::from_fn(pts.len(), n, |i, j| {
        let (t, w) = pts[i];
        w.sqrt() * (-exponents[j] * t * t).exp()
    });
    let b = DVector::from_fn(pts.len(), |i, _| {
        let (t, w) = pts[i];
        w.sqrt() * (-gamma * t).exp()
    });
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&b, 1e-14 * svd.singular_values.max())
        .unwrap_or_else(|_| DVector::zeros(n));
    let r = &a * &c - &b;
    let wsum: f64 = pts.iter().map(|p| p.1).sum();
    (c.iter().copied().collect(), (r.norm_squared() / wsum).sqrt())
}

struct Residual<'a> {
    gamma: f64,
    grid: &'a FitGrid,
}

impl CostFunction for Residual<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let exps: Vec<f64> = p.iter().map(|x| x.clamp(-60.0, 60.0).exp()).collect();
        Ok(solve_coefficients(self.gamma, &exps, self.grid).1)
    }
}

fn nelder_mead(problem: Residual<'_>, start: &[f64], step: f64) -> (Vec<f64>, f64) {
    let mut simplex = vec![start.to_vec()];
    for k in 0..start.len() {
        let mut v = start.to_vec();
        v[k] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .expect("valid tolerance");
    let res = Executor::new(problem, solver)
        .configure(|s| s.max_iters(4000))
        .run()
        .expect("Nelder-Mead on a finite cost cannot fail");
    let st = res.state();
    (st.best_param.clone().unwrap_or_else(|| start.to_vec()), st.best_cost)
}

fn fit_uncached(gamma: f64, n_terms: usize, grid: &FitGrid) -> (Vec<f64>, f64) {
    let g2 = gamma * gamma;
    let base: Vec<f64> = if n_terms == 1 {
        vec![(0.5 * g2).ln()]
    } else {
        (0..n_terms)
            .map(|i| {
                let f = i as f64 / (n_terms - 1) as f64;
                (g2 * 0.12 * (290.0f64 / 0.12).powf(f)).ln()
            })
            .collect()
    };
    let mut best = (base.clone(), f64::INFINITY);
    // a few deterministic perturbations of the geometric start
    for k in 0..6 {
        let start: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, x)| x + 0.3 * ((k * 7 + i * 3) as f64).sin() * (k > 0) as u8 as f64)
            .collect();
        let mut cur = nelder_mead(Residual { gamma, grid }, &start, 0.4);
        for _ in 0..3 {
            cur = nelder_mead(Residual { gamma, grid }, &cur.0, 0.05);
        }
        if cur.1 < best.1 {
            best = cur;
        }
    }
    best
}

type CacheKey = (u64, usize, u64, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, (Vec<f64>, f64)>> {
    static C: std::sync::OnceLock<Mutex<HashMap<CacheKey, (Vec<f64>, f64)>>> = std::sync::OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fits `n_terms` Gaussians to exp(-gamma t) and checks the residual threshold.
pub fn fit_geminal(gamma: f64, n_terms: usize, grid: &FitGrid, threshold: f64) -> Result<GeminalFit> {
    if !(gamma > 0.0) || n_terms == 0 {
        return Err(Error::Invalid(format!(
            "geminal fit needs gamma > 0 and at least one term (gamma {gamma}, terms {n_terms})"
        )));
    }
    let key = (gamma.to_bits(), n_terms, grid.r_max.to_bits(), grid.n_points);
    let cached = cache().lock().unwrap().get(&key).cloned();
    let (logs, _) = match cached {
        Some(v) => v,
        None => {
            let v = fit_uncached(gamma, n_terms, grid);
            cache().lock().unwrap().insert(key, v.clone());
            v
        }
    };
    let mut exps: Vec<f64> = logs.iter().map(|x| x.exp()).collect();
    exps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    exps.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let (coefs, rms) = solve_coefficients(gamma, &exps, grid);
    if rms > threshold {
        return Err(Error::GeminalFit { rms, threshold });
    }
    Ok(GeminalFit {
        gamma,
        terms: coefs.into_iter().zip(exps).collect(),
        fit_rms: rms,
    })
}

/// Six-term fit on the default grid and threshold.
pub fn default_fit(gamma: f64) -> Result<GeminalFit> {
    fit_geminal(gamma, 6, &FitGrid::default(), DEFAULT_FIT_THRESHOLD)
}

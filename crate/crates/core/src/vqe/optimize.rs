use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use argmin::core::observers::{Observe, ObserverMode};
use argmin::core::{CostFunction, Executor, Gradient, IterState, State, KV};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::BFGS;
use serde::{Deserialize, Serialize};

use super::ansatz::Ansatz;
use super::hamiltonian::SectorOperator;
use super::statevector::Statevector;
use crate::error::{Error, Result};

/// Premise of the two-term shift rule: the state entering a factor sits
/// entirely inside or entirely outside the factor's active subspace.
pub const SHIFT_PREMISE_TOL: f64 = 1e-12;
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// Shift rule where its premise holds, central differences otherwise.
    Auto,
    ParameterShift,
    CentralDifference,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradientReport {
    pub shift_rule: usize,
    pub finite_difference: usize,
}

pub fn energy(h: &SectorOperator, ansatz: &Ansatz, theta: &[f64]) -> Result<f64> {
    h.expectation(&ansatz.prepare(theta)?)
}

fn shift_component(h: &SectorOperator, ansatz: &Ansatz, theta: &[f64], k: usize) -> Result<f64> {
    let mut g = 0.0;
    for (f, fac) in ansatz.generators[k].factors.iter().enumerate() {
        let ep = h.expectation(&ansatz.prepare_shifted(theta, Some((k, f, FRAC_PI_4)))?)?;
        let em = h.expectation(&ansatz.prepare_shifted(theta, Some((k, f, -FRAC_PI_4)))?)?;
        g += fac.weight * (ep - em);
    }
    Ok(g)
}

fn fd_component(h: &SectorOperator, ansatz: &Ansatz, theta: &[f64], k: usize, step: f64) -> Result<f64> {
    let mut t = theta.to_vec();
    t[k] = theta[k] + step;
    let ep = energy(h, ansatz, &t)?;
    t[k] = theta[k] - step;
    let em = energy(h, ansatz, &t)?;
    Ok((ep - em) / (2.0 * step))
}

pub fn gradient(h: &SectorOperator, ansatz: &Ansatz, theta: &[f64], method: GradientMethod) -> Result<(Vec<f64>, GradientReport)> {
    let weights = match method {
        GradientMethod::Auto => Some(ansatz.factor_weights(theta)?),
        _ => None,
    };
    let mut rep = GradientReport::default();
    let mut g = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        let shift = match method {
            GradientMethod::ParameterShift => true,
            GradientMethod::CentralDifference => false,
            GradientMethod::Auto => weights.as_ref().unwrap()[k].iter().all(|&p| p.min(1.0 - p) < SHIFT_PREMISE_TOL),
        };
        if shift {
            rep.shift_rule += 1;
            g.push(shift_component(h, ansatz, theta, k)?);
        } else {
            rep.finite_difference += 1;
            g.push(fd_component(h, ansatz, theta, k, FD_STEP)?);
        }
    }
    Ok((g, rep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub energy: f64,
    pub grad_norm: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct VqeOptions {
    pub max_iter: u64,
    /// Stop once the gradient norm drops below this.
    pub grad_tol: f64,
    pub gradient: GradientMethod,
    pub initial: Option<Vec<f64>>,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self { max_iter: 500, grad_tol: 1e-7, gradient: GradientMethod::Auto, initial: None }
    }
}

#[derive(Debug, Clone)]
pub struct VqeResult {
    pub energy: f64,
    pub theta: Vec<f64>,
    pub state: Statevector,
    pub iterations: u64,
    pub converged: bool,
    pub grad_norm: f64,
    pub gradients: GradientReport,
    pub trace: Vec<TraceRow>,
}

#[derive(Default)]
struct Best {
    energy: f64,
    theta: Option<Vec<f64>>,
    report: GradientReport,
}

struct Problem<'a> {
    h: &'a SectorOperator,
    ansatz: &'a Ansatz,
    method: GradientMethod,
    best: Arc<Mutex<Best>>,
}

fn wrap<T>(r: Result<T>) -> std::result::Result<T, argmin::core::Error> {
    r.map_err(|e| argmin::core::Error::msg(e.to_string()))
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let e = wrap(energy(self.h, self.ansatz, p))?;
        let mut b = self.best.lock().unwrap();
        if b.theta.is_none() || e < b.energy {
            b.energy = e;
            b.theta = Some(p.clone());
        }
        Ok(e)
    }
}

impl Gradient for Problem<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;
    fn gradient(&self, p: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let (g, rep) = wrap(gradient(self.h, self.ansatz, p, self.method))?;
        let mut b = self.best.lock().unwrap();
        b.report.shift_rule += rep.shift_rule;
        b.report.finite_difference += rep.finite_difference;
        Ok(g)
    }
}

type BfgsState = IterState<Vec<f64>, Vec<f64>, (), Vec<Vec<f64>>, (), f64>;

struct Tracer {
    start: Instant,
    rows: Arc<Mutex<Vec<TraceRow>>>,
}

impl Observe<BfgsState> for Tracer {
    fn observe_iter(&mut self, state: &BfgsState, _kv: &KV) -> std::result::Result<(), argmin::core::Error> {
        let gn = state.get_gradient().map_or(f64::NAN, |g| l2(g));
        self.rows.lock().unwrap().push(TraceRow {
            iteration: state.get_iter(),
            energy: state.get_cost(),
            grad_norm: gn,
            wall_time: self.start.elapsed().as_secs_f64(),
        });
        Ok(())
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// BFGS with a More–Thuente line search. The l2 stopping rule on the
/// gradient also bounds its largest component.
pub fn run_vqe(h: &SectorOperator, ansatz: &Ansatz, opts: &VqeOptions) -> Result<VqeResult> {
    let start = Instant::now();
    let n = ansatz.n_params();
    let theta0 = match &opts.initial {
        Some(t) if t.len() != n => {
            return Err(Error::Shape(format!("{} initial parameters for {n} generators", t.len())));
        }
        Some(t) => t.clone(),
        None => vec![0.0; n],
    };
    let e0 = energy(h, ansatz, &theta0)?;
    let (g0, rep0) = gradient(h, ansatz, &theta0, opts.gradient)?;
    let gn0 = l2(&g0);
    let mut trace = vec![TraceRow { iteration: 0, energy: e0, grad_norm: gn0, wall_time: start.elapsed().as_secs_f64() }];
    if n == 0 || gn0 < opts.grad_tol {
        return Ok(VqeResult {
            energy: e0,
            state: ansatz.prepare(&theta0)?,
            theta: theta0,
            iterations: 0,
            converged: true,
            grad_norm: gn0,
            gradients: rep0,
            trace,
        });
    }
    let best = Arc::new(Mutex::new(Best { energy: e0, theta: Some(theta0.clone()), report: rep0 }));
    let rows = Arc::new(Mutex::new(Vec::new()));
    let problem = Problem { h, ansatz, method: opts.gradient, best: best.clone() };
    let solver = BFGS::new(MoreThuenteLineSearch::new())
        .with_tolerance_grad(opts.grad_tol)
        .and_then(|s| s.with_tolerance_cost(0.0))
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let init_hessian: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let outcome = Executor::new(problem, solver)
        .configure(|s| s.param(theta0.clone()).inv_hessian(init_hessian).max_iters(opts.max_iter))
        .add_observer(Tracer { start, rows: rows.clone() }, ObserverMode::Always)
        .run();
    let iterations = match &outcome {
        Ok(r) => r.state().get_iter(),
        Err(e) => {
            log::warn!("optimizer stopped early: {e}");
            rows.lock().unwrap().last().map_or(0, |r| r.iteration)
        }
    };
    trace.extend(rows.lock().unwrap().drain(..));
    let (e_best, theta, report) = {
        let b = best.lock().unwrap();
        (b.energy, b.theta.clone().unwrap(), b.report.clone())
    };
    let (g, _) = gradient(h, ansatz, &theta, opts.gradient)?;
    let grad_norm = l2(&g);
    Ok(VqeResult {
        energy: e_best,
        state: ansatz.prepare(&theta)?,
        theta,
        iterations,
        converged: grad_norm < opts.grad_tol.max(1e-6),
        grad_norm,
        gradients: report,
        trace,
    })
}

pub fn write_trace_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Starting point from amplitude magnitudes; each sign is the one that
/// lowers the energy when that parameter alone is switched on.
pub fn signed_guess(h: &SectorOperator, ansatz: &Ansatz, magnitudes: &[f64]) -> Result<Vec<f64>> {
    let n = ansatz.n_params();
    if magnitudes.len() != n {
        return Err(Error::Shape(format!("{} magnitudes for {n} generators", magnitudes.len())));
    }
    let mut theta = vec![0.0; n];
    let mut t = vec![0.0; n];
    for k in 0..n {
        let m = magnitudes[k].abs();
        if m == 0.0 {
            continue;
        }
        t[k] = m;
        let ep = energy(h, ansatz, &t)?;
        t[k] = -m;
        let em = energy(h, ansatz, &t)?;
        t[k] = 0.0;
        theta[k] = if ep <= em { m } else { -m };
    }
    Ok(theta)
}

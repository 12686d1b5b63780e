//! Bounded, inequality-constrained least squares.
//!
//! Each start first drives the constraint violation to zero with a
//! Levenberg-Marquardt pass on `max(0, g + eps)`, then minimises the log
//! barrier merit `F + mu * sum(-ln(-g))` with Gauss-Newton steps, shrinking
//! `mu` tenfold after each inner solve. Only strictly feasible points that
//! lower the merit are accepted. Bounds are handled by projecting steps onto
//! the box and freezing variables held at a bound by the gradient.
//! Derivatives are finite differences with relative step 1e-6.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A least-squares objective with inequality constraints `g(q) <= 0` on a box.
pub trait Problem: Sync {
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    /// Residual vector and constraint values at `q`; both have fixed length.
    fn evaluate(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Upper bound on trial points per start, excluding derivative probes.
    pub max_iterations: usize,
    pub relative_step: f64,
    /// Stop shrinking the barrier weight below this fraction of its start.
    pub barrier_reduction: f64,
    /// Constraint level accepted as feasible in reports.
    pub feasibility_tolerance: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            max_iterations: 400,
            relative_step: 1e-6,
            barrier_reduction: 1e-10,
            feasibility_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartResult {
    pub index: usize,
    pub start: Vec<f64>,
    pub q: Vec<f64>,
    /// Best feasible cost found; `None` when the start never became feasible.
    pub cost: Option<f64>,
    pub max_constraint: f64,
    pub iterations: usize,
    pub budget_exhausted: bool,
    /// Incumbent cost after every accepted step.
    pub history: Vec<f64>,
}

fn mean_square(r: &[f64]) -> f64 {
    if r.is_empty() {
        0.0
    } else {
        r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64
    }
}

fn max_of(g: &[f64]) -> f64 {
    g.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn clamp_into(q: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..q.len() {
        q[i] = q[i].clamp(lo[i], hi[i]);
    }
}

struct Point {
    q: Vec<f64>,
    r: Vec<f64>,
    g: Vec<f64>,
}

impl Point {
    fn new<P: Problem + ?Sized>(p: &P, q: Vec<f64>) -> Self {
        let (r, g) = p.evaluate(&q);
        Point { q, r, g }
    }

    fn cost(&self) -> f64 {
        mean_square(&self.r)
    }

    fn strictly_feasible(&self) -> bool {
        self.g.iter().all(|&v| v < 0.0)
    }

    fn merit(&self, mu: f64) -> f64 {
        self.cost() - mu * self.g.iter().map(|&v| (-v).ln()).sum::<f64>()
    }
}

/// Finite-difference Jacobians of residuals and constraints.
fn jacobians<P: Problem + ?Sized>(p: &P, at: &Point, rel: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = at.q.len();
    let (lo, hi) = (p.lower(), p.upper());
    let cols: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let h = rel * at.q[i].abs().max(1.0);
            let probe = |delta: f64| {
                let mut q = at.q.clone();
                q[i] += delta;
                p.evaluate(&q)
            };
            let diff = |a: &[f64], b: &[f64], w: f64| a.iter().zip(b).map(|(x, y)| (x - y) / w).collect::<Vec<_>>();
            let up = at.q[i] + h <= hi[i];
            let down = at.q[i] - h >= lo[i];
            match (up, down) {
                (true, true) => {
                    let (rp, gp) = probe(h);
                    let (rm, gm) = probe(-h);
                    (diff(&rp, &rm, 2.0 * h), diff(&gp, &gm, 2.0 * h))
                }
                (true, false) => {
                    let (rp, gp) = probe(h);
                    (diff(&rp, &at.r, h), diff(&gp, &at.g, h))
                }
                (false, true) => {
                    let (rm, gm) = probe(-h);
                    (diff(&at.r, &rm, h), diff(&at.g, &gm, h))
                }
                (false, false) => (vec![0.0; at.r.len()], vec![0.0; at.g.len()]),
            }
        })
        .collect();
    let mut jr = DMatrix::zeros(at.r.len(), n);
    let mut jg = DMatrix::zeros(at.g.len(), n);
    for (i, (cr, cg)) in cols.into_iter().enumerate() {
        jr.set_column(i, &DVector::from_vec(cr));
        jg.set_column(i, &DVector::from_vec(cg));
    }
    (jr, jg)
}

/// Solves the damped system restricted to `free` variables; zero elsewhere.
fn damped_step(h: &DMatrix<f64>, grad: &DVector<f64>, free: &[usize], lambda: f64) -> Option<DVector<f64>> {
    let m = free.len();
    if m == 0 {
        return None;
    }
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for (ii, &i) in free.iter().enumerate() {
        b[ii] = -grad[i];
        for (jj, &j) in free.iter().enumerate() {
            a[(ii, jj)] = h[(i, j)];
        }
        a[(ii, ii)] += lambda * (h[(i, i)].abs() + 1e-12);
    }
    let x = a.clone().cholesky().map(|c| c.solve(&b)).or_else(|| a.lu().solve(&b))?;
    let mut step = DVector::zeros(grad.len());
    for (ii, &i) in free.iter().enumerate() {
        step[i] = x[ii];
    }
    step.iter().all(|v| v.is_finite()).then_some(step)
}

/// Variables not pinned at a bound by the descent direction `-grad`.
fn free_set(q: &[f64], grad: &DVector<f64>, lo: &[f64], hi: &[f64]) -> Vec<usize> {
    (0..q.len())
        .filter(|&i| !((q[i] <= lo[i] && grad[i] > 0.0) || (q[i] >= hi[i] && grad[i] < 0.0)) && lo[i] < hi[i])
        .collect()
}

fn trial_point(q: &[f64], step: &DVector<f64>, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
    clamp_into(&mut t, lo, hi);
    t
}

/// Recovery margin: constraints are pushed below `-RECOVERY_MARGIN`.
const RECOVERY_MARGIN: f64 = 1e-9;
const MAX_LAMBDA: f64 = 1e10;

/// Drives all constraints strictly negative. Returns `None` on failure.
fn recover<P: Problem + ?Sized>(
    p: &P,
    mut at: Point,
    settings: &OptimizerSettings,
    used: &mut usize,
) -> Option<Point> {
    let (lo, hi) = (p.lower(), p.upper());
    let viol = |g: &[f64]| g.iter().map(|&v| (v + RECOVERY_MARGIN).max(0.0)).collect::<Vec<_>>();
    let mut lambda = 1e-3;
    let mut need_jac = true;
    let mut jg = DMatrix::zeros(0, 0);
    while !at.strictly_feasible() {
        if *used >= settings.max_iterations {
            return None;
        }
        if need_jac {
            jg = jacobians(p, &at, settings.relative_step).1;
            need_jac = false;
        }
        let v = DVector::from_vec(viol(&at.g));
        let mut jv = jg.clone();
        for (k, &vk) in v.iter().enumerate() {
            if vk == 0.0 {
                jv.row_mut(k).fill(0.0);
            }
        }
        let h = jv.transpose() * &jv;
        let grad = jv.transpose() * &v;
        let free = free_set(&at.q, &grad, lo, hi);
        let Some(step) = damped_step(&h, &grad, &free, lambda) else { return None };
        let trial = Point::new(p, trial_point(&at.q, &step, lo, hi));
        *used += 1;
        let now = v.norm_squared();
        let next: f64 = viol(&trial.g).iter().map(|x| x * x).sum();
        if next < now {
            at = trial;
            lambda = (lambda / 3.0).max(1e-12);
            need_jac = true;
        } else {
            lambda *= 4.0;
            if lambda > MAX_LAMBDA {
                return None;
            }
        }
    }
    Some(at)
}

/// Runs recovery and the barrier descent from one starting point.
pub fn minimize<P: Problem + ?Sized>(p: &P, index: usize, start: Vec<f64>, settings: &OptimizerSettings) -> StartResult {
    let (lo, hi) = (p.lower(), p.upper());
    let mut q0 = start.clone();
    clamp_into(&mut q0, lo, hi);
    let mut used = 0;
    let initial = Point::new(p, q0);
    let fail = |at: &Point, used: usize| StartResult {
        index,
        start: start.clone(),
        q: at.q.clone(),
        cost: None,
        max_constraint: max_of(&at.g),
        iterations: used,
        budget_exhausted: used >= settings.max_iterations,
        history: Vec::new(),
    };
    let max_before = max_of(&initial.g);
    let Some(mut at) = recover(p, initial, settings, &mut used) else {
        let probe = Point::new(p, start.clone().into_iter().enumerate().map(|(i, v)| v.clamp(lo[i], hi[i])).collect());
        let mut r = fail(&probe, used);
        r.max_constraint = max_before;
        return r;
    };

    let mut best_q = at.q.clone();
    let mut best_cost = at.cost();
    let mut history = vec![best_cost];
    let n_con = at.g.len().max(1) as f64;
    let mu0 = 0.1 * best_cost.max(1e-12) / n_con;
    let mut mu = mu0;
    let mut exhausted = false;
    'outer: while mu >= mu0 * settings.barrier_reduction {
        let mut lambda = 1e-3;
        let mut jac: Option<(DMatrix<f64>, DMatrix<f64>)> = None;
        loop {
            if used >= settings.max_iterations {
                exhausted = true;
                break 'outer;
            }
            let (jr, jg) = jac.get_or_insert_with(|| jacobians(p, &at, settings.relative_step));
            let m = at.r.len().max(1) as f64;
            let r = DVector::from_column_slice(&at.r);
            let mut grad = jr.transpose() * &r * (2.0 / m);
            let mut h = jr.transpose() * &*jr * (2.0 / m);
            for (k, &gk) in at.g.iter().enumerate() {
                let row = jg.row(k).transpose();
                grad += &row * (mu / -gk);
                h += &row * row.transpose() * (mu / (gk * gk));
            }
            let free = free_set(&at.q, &grad, lo, hi);
            let Some(step) = damped_step(&h, &grad, &free, lambda) else { break };
            let trial = Point::new(p, trial_point(&at.q, &step, lo, hi));
            used += 1;
            let (old, new) = (at.merit(mu), trial.merit(mu));
            if trial.strictly_feasible() && new < old {
                let converged = old - new <= 1e-15 * (1.0 + old.abs());
                at = trial;
                jac = None;
                lambda = (lambda / 3.0).max(1e-12);
                let c = at.cost();
                if c < best_cost {
                    best_cost = c;
                    best_q = at.q.clone();
                }
                history.push(best_cost);
                if converged {
                    break;
                }
            } else {
                lambda *= 4.0;
                if lambda > MAX_LAMBDA {
                    break;
                }
            }
        }
        mu *= 0.1;
    }
    let best = Point::new(p, best_q);
    StartResult {
        index,
        start,
        cost: Some(best.cost()),
        max_constraint: max_of(&best.g),
        q: best.q,
        iterations: used,
        budget_exhausted: exhausted,
        history,
    }
}

/// The nominal point followed by `count - 1` uniform draws from the box.
pub fn starting_points(nominal: &[f64], lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(count.max(1));
    starts.push(nominal.to_vec());
    for _ in 1..count {
        starts.push((0..nominal.len()).map(|i| if lo[i] < hi[i] { rng.gen_range(lo[i]..=hi[i]) } else { lo[i] }).collect());
    }
    starts
}

/// Runs every start (in parallel) and returns all results in start order.
pub fn multistart<P: Problem + ?Sized>(p: &P, starts: Vec<Vec<f64>>, settings: &OptimizerSettings) -> Vec<StartResult> {
    starts.into_par_iter().enumerate().map(|(i, s)| minimize(p, i, s, settings)).collect()
}

/// Best feasible result by (cost, start index).
pub fn best_result<'a>(results: &'a [StartResult], settings: &OptimizerSettings) -> Option<&'a StartResult> {
    results
        .iter()
        .filter(|r| r.cost.is_some() && r.max_constraint <= settings.feasibility_tolerance)
        .min_by(|a, b| a.cost.partial_cmp(&b.cost).expect("finite costs").then(a.index.cmp(&b.index)))
}

//! Projected limited-memory BFGS for box-constrained minimization.
//!
//! Each iteration fixes the variables sitting on a bound with the gradient
//! pushing outwards, builds a two-loop L-BFGS direction on the remaining free
//! variables and backtracks along the projected path until an Armijo
//! condition holds.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// A smooth objective; returns `f = +∞` where it cannot be evaluated.
pub trait Objective {
    fn evaluate(&mut self, z: &[f64]) -> Result<(f64, Vec<f64>)>;
}

impl<F> Objective for F
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    fn evaluate(&mut self, z: &[f64]) -> Result<(f64, Vec<f64>)> {
        self(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LbfgsOptions {
    /// Number of correction pairs kept.
    pub memory: usize,
    pub max_iterations: usize,
    /// Projected-gradient ∞-norm tolerance.
    pub tolerance: f64,
    /// Stop after this many iterations with relative decrease below `stall_tolerance`.
    pub stall_iterations: usize,
    pub stall_tolerance: f64,
    pub max_backtracks: usize,
    /// Largest change of any variable in the first trial of an iteration.
    pub max_step: f64,
    /// Step doublings tried after an immediately accepted step.
    pub max_extrapolations: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 30,
            max_iterations: 500,
            tolerance: 1e-5,
            stall_iterations: 4,
            stall_tolerance: 1e-16,
            max_backtracks: 30,
            max_step: 0.5,
            max_extrapolations: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerStatus {
    Converged,
    MaxIterations,
    Stalled,
    LineSearchFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub z: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub projected_gradient: f64,
    pub status: InnerStatus,
}

/// ∞-norm of the projected gradient step `P(z - g) - z`.
pub fn projected_gradient_norm(z: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    z.iter()
        .zip(g)
        .enumerate()
        .map(|(i, (zi, gi))| ((zi - gi).clamp(lo[i], hi[i]) - zi).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `objective` over `lo ≤ z ≤ hi` from `z0`.
///
/// Returns the best iterate; a failed line search is reported through the
/// status rather than as an error.
pub fn inner_solve<O: Objective>(
    objective: &mut O,
    lo: &[f64],
    hi: &[f64],
    z0: &[f64],
    opts: &LbfgsOptions,
) -> Result<InnerResult> {
    let n = z0.len();
    if lo.len() != n || hi.len() != n {
        return Err(Error::ShapeMismatch("bounds and start differ in length".into()));
    }
    let mut z: Vec<f64> = z0.iter().enumerate().map(|(i, v)| v.clamp(lo[i], hi[i])).collect();
    let (mut f, mut g) = objective.evaluate(&z)?;
    let mut evaluations = 1;
    if !f.is_finite() {
        return Err(Error::NonFinite("objective at the starting point".into()));
    }
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stalled = 0;
    let mut status = InnerStatus::MaxIterations;
    let mut iterations = 0;
    let bound_eps = 1e-12;

    while iterations < opts.max_iterations {
        let pg = projected_gradient_norm(&z, &g, lo, hi);
        if pg <= opts.tolerance {
            status = InnerStatus::Converged;
            break;
        }
        // Variables held on their bounds this iteration.
        let free: Vec<bool> = (0..n)
            .map(|i| {
                let at_lo = z[i] <= lo[i] + bound_eps && g[i] > 0.0;
                let at_hi = z[i] >= hi[i] - bound_eps && g[i] < 0.0;
                lo[i] < hi[i] && !at_lo && !at_hi
            })
            .collect();
        let masked = |v: &[f64]| -> Vec<f64> { v.iter().zip(&free).map(|(x, &f)| if f { *x } else { 0.0 }).collect() };

        let mut accepted = None;
        for attempt in 0..2 {
            let steepest = attempt == 1 || pairs.is_empty();
            let mut dir: Vec<f64> = masked(&g).iter().map(|v| -v).collect();
            if !steepest {
                // Two-loop recursion restricted to the free variables.
                let mut qv = masked(&g);
                let mut alphas = Vec::with_capacity(pairs.len());
                for (s, y, rho) in pairs.iter().rev() {
                    let a = rho * dot(&masked(s), &qv);
                    for i in 0..n {
                        if free[i] {
                            qv[i] -= a * y[i];
                        }
                    }
                    alphas.push(a);
                }
                let (s, y, _) = pairs.back().unwrap();
                let (sm, ym) = (masked(s), masked(y));
                let yy = dot(&ym, &ym);
                let gamma = if yy > 0.0 { (dot(&sm, &ym) / yy).max(1e-12) } else { 1.0 };
                let mut r: Vec<f64> = qv.iter().map(|v| gamma * v).collect();
                for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
                    let b = rho * dot(&masked(y), &r);
                    for i in 0..n {
                        if free[i] {
                            r[i] += s[i] * (a - b);
                        }
                    }
                }
                dir = r.iter().map(|v| -v).collect();
                if dot(&dir, &g) >= 0.0 {
                    continue;
                }
            }
            let dmax = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if dmax == 0.0 {
                break;
            }
            let mut step = if steepest && pairs.is_empty() && iterations == 0 {
                (opts.max_step / dmax).min(1.0 / projected_gradient_norm(&z, &g, lo, hi).max(1e-300)).min(1.0)
            } else {
                1.0
            };
            step = step.min(opts.max_step / dmax);
            for backtrack in 0..opts.max_backtracks {
                let trial: Vec<f64> = (0..n).map(|i| (z[i] + step * dir[i]).clamp(lo[i], hi[i])).collect();
                let decrease: f64 = (0..n).map(|i| g[i] * (trial[i] - z[i])).sum();
                let (ft, gt) = objective.evaluate(&trial)?;
                evaluations += 1;
                if ft.is_finite() && ft <= f + 1e-4 * decrease && decrease < 0.0 {
                    let (mut trial, mut ft, mut gt) = (trial, ft, gt);
                    if backtrack == 0 {
                        // Extrapolate while the slope along the path stays steep
                        // (weak Wolfe curvature condition not yet met).
                        let slope0 = dot(&g, &dir);
                        for _ in 0..opts.max_extrapolations {
                            if dot(&gt, &dir) >= 0.9 * slope0 || trial.iter().zip(&z).zip(&dir).any(|((a, b), d)| ((a - b) - step * d).abs() > 0.0) {
                                break;
                            }
                            let longer = 2.0 * step;
                            let cand: Vec<f64> = (0..n).map(|i| (z[i] + longer * dir[i]).clamp(lo[i], hi[i])).collect();
                            let dec: f64 = (0..n).map(|i| g[i] * (cand[i] - z[i])).sum();
                            let (fc, gc) = objective.evaluate(&cand)?;
                            evaluations += 1;
                            if !(fc.is_finite() && fc <= f + 1e-4 * dec && fc < ft) {
                                break;
                            }
                            (trial, ft, gt, step) = (cand, fc, gc, longer);
                        }
                    }
                    log::trace!(
                        "lbfgs it {iterations}: f {ft:.12e} step {step:.3e} backtracks {backtrack} steepest {steepest} pairs {} free {}",
                        pairs.len(),
                        free.iter().filter(|&&b| b).count()
                    );
                    accepted = Some((trial, ft, gt));
                    break;
                }
                step *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
            pairs.clear();
        }
        let Some((zn, fn_, gn)) = accepted else {
            status = InnerStatus::LineSearchFailure;
            break;
        };
        iterations += 1;
        let s: Vec<f64> = zn.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            pairs.push_back((s, y, 1.0 / sy));
            if pairs.len() > opts.memory {
                pairs.pop_front();
            }
        }
        let rel = (f - fn_) / f.abs().max(1.0);
        z = zn;
        f = fn_;
        g = gn;
        if rel <= opts.stall_tolerance {
            stalled += 1;
            if stalled >= opts.stall_iterations {
                status = InnerStatus::Stalled;
                break;
            }
        } else {
            stalled = 0;
        }
    }
    let projected_gradient = projected_gradient_norm(&z, &g, lo, hi);
    if status == InnerStatus::MaxIterations && projected_gradient <= opts.tolerance {
        status = InnerStatus::Converged;
    }
    Ok(InnerResult { z, f, grad: g, iterations, evaluations, projected_gradient, status })
}

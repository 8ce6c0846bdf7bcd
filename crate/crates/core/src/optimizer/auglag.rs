//! Augmented Lagrangian outer loop and multi-start driver.
//!
//! Merit function over the scaled design `z`:
//!
//! `L = J/J_ref + Σ (λ g + ρ/2 g²) + Σ (1/2ρ)(max(0, μ + ρ h)² − μ²)`
//!
//! minimized by projected L-BFGS with the multipliers fixed, followed by the
//! first-order multiplier update. The penalty grows when the violation did not
//! shrink enough. A forward solve failure makes the merit `+∞`, which the line
//! search treats as a rejected step.

use super::adjoint::{assemble_gradient, PeriodTerms};
use super::init::{initial_design, perturbed_start};
use super::lbfgs::{inner_solve, InnerStatus, LbfgsOptions};
use super::scaling::Scaling;
use crate::constraints::{evaluate_constraints, period_constraints, ConstraintSet};
use crate::design::DesignVector;
use crate::economics::{period_operating_cost, total_objective, CostBreakdown};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::solver::{check_reports, solve_all_periods, SolverOptions};
use crate::state::StateSlice;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub max_outer_iterations: usize,
    pub rho_initial: f64,
    pub rho_growth: f64,
    pub rho_max: f64,
    /// Required violation reduction per outer iteration before ρ is kept.
    pub sufficient_reduction: f64,
    pub feasibility_tolerance: f64,
    pub stationarity_tolerance: f64,
    /// First inner tolerance; tightened by `inner_tolerance_factor` each outer step.
    pub inner_tolerance_initial: f64,
    pub inner_tolerance_factor: f64,
    /// Random restarts in addition to the heuristic start.
    pub restarts: usize,
    pub seed: u64,
    pub inner: LbfgsOptions,
    pub solver: SolverOptions,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_outer_iterations: 30,
            rho_initial: 10.0,
            rho_growth: 5.0,
            rho_max: 1e8,
            sufficient_reduction: 0.25,
            feasibility_tolerance: 1e-6,
            stationarity_tolerance: 1e-5,
            inner_tolerance_initial: 1e-2,
            inner_tolerance_factor: 0.1,
            restarts: 3,
            seed: 42,
            inner: LbfgsOptions::default(),
            solver: SolverOptions::default(),
        }
    }
}

/// Multipliers and penalty, one multiplier list per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugLagState {
    pub lambda: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    pub rho: f64,
}

impl AugLagState {
    pub fn new(problem: &Problem, rho: f64) -> Self {
        let counts: Vec<(usize, usize)> =
            (0..problem.n_periods()).map(|t| crate::constraints::period_counts(problem, t)).collect();
        Self {
            lambda: counts.iter().map(|c| vec![0.0; c.0]).collect(),
            mu: counts.iter().map(|c| vec![0.0; c.1]).collect(),
            rho,
        }
    }
}

/// One line of the optimization trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub start: usize,
    pub outer: usize,
    pub inner_iterations: usize,
    pub evaluations: usize,
    /// Total discounted cost (€).
    pub objective: f64,
    pub merit: f64,
    pub max_violation: f64,
    pub projected_gradient: f64,
    pub rho: f64,
    pub inner_status: InnerStatus,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub design: DesignVector,
    pub states: Vec<StateSlice>,
    pub objective: f64,
    pub breakdown: CostBreakdown,
    pub constraints: ConstraintSet,
    pub multipliers: AugLagState,
    pub converged: bool,
    pub outer_iterations: usize,
    /// Index of the winning start (0 is the heuristic start).
    pub start: usize,
    pub trace: Vec<TraceRecord>,
}

impl OptimizationResult {
    pub fn feasible(&self, tolerance: f64) -> bool {
        self.constraints.max_violation() <= tolerance
    }
}

/// Forward solve from `warm`, retried from the cold start if any period fails.
fn solve_with_fallback(
    problem: &Problem,
    design: &DesignVector,
    warm: Option<&[StateSlice]>,
    solver: &SolverOptions,
) -> Result<Vec<StateSlice>> {
    let (states, reports) = solve_all_periods(problem, design, warm, solver);
    if check_reports(&reports).is_ok() || warm.is_none() {
        check_reports(&reports)?;
        return Ok(states);
    }
    let (states, reports) = solve_all_periods(problem, design, None, solver);
    check_reports(&reports)?;
    Ok(states)
}

/// Merit evaluator over scaled variables with a warm-start cache of the
/// last converged states.
pub struct Merit<'a> {
    problem: &'a Problem,
    scaling: &'a Scaling,
    al: &'a AugLagState,
    j_ref: f64,
    solver: SolverOptions,
    warm: Mutex<Option<Vec<StateSlice>>>,
}

impl<'a> Merit<'a> {
    pub fn new(problem: &'a Problem, scaling: &'a Scaling, al: &'a AugLagState, j_ref: f64, solver: SolverOptions) -> Self {
        Self { problem, scaling, al, j_ref, solver, warm: Mutex::new(None) }
    }

    /// Merit value and gradient; `+∞` when a forward solve fails.
    pub fn evaluate(&self, z: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p = self.problem;
        let design = self.scaling.to_physical(p, z);
        let warm = self.warm.lock().unwrap().clone();
        let Ok(states) = solve_with_fallback(p, &design, warm.as_deref(), &self.solver) else {
            return Ok((f64::INFINITY, vec![0.0; z.len()]));
        };
        *self.warm.lock().unwrap() = Some(states.clone());
        let f_op = p.discount_factor;
        let (al, j_ref) = (self.al, self.j_ref);
        let result = assemble_gradient(p, &design, &states, 1.0 / j_ref, self.solver.singular_pivot_ratio, |t, d, x, out| {
            let mut pt = PeriodTerms::zeros(p);
            let w = p.contexts[t].weight * f_op / j_ref;
            let cost = period_operating_cost(p, out);
            pt.value = w * cost.value;
            cost.accumulate(w, &mut pt.gx, &mut pt.gd);
            let pc = period_constraints(p, t, d, x, out);
            let rho = al.rho;
            for ((_, q), &lam) in pc.equalities.iter().zip(&al.lambda[t]) {
                pt.value += lam * q.value + 0.5 * rho * q.value * q.value;
                q.accumulate(lam + rho * q.value, &mut pt.gx, &mut pt.gd);
            }
            for ((_, q), &mu) in pc.inequalities.iter().zip(&al.mu[t]) {
                let s = (mu + rho * q.value).max(0.0);
                pt.value += (s * s - mu * mu) / (2.0 * rho);
                if s > 0.0 {
                    q.accumulate(s, &mut pt.gx, &mut pt.gd);
                }
            }
            pt
        });
        match result {
            Ok((v, g)) if v.is_finite() => Ok((v, self.scaling.scale_gradient(z, &g))),
            Ok(_) | Err(Error::SingularJacobian { .. }) => Ok((f64::INFINITY, vec![0.0; z.len()])),
            Err(e) => Err(e),
        }
    }
}

/// Solves the forward problem for a design, failing if any period fails.
pub fn evaluate_design(problem: &Problem, design: &DesignVector, solver: &SolverOptions) -> Result<(Vec<StateSlice>, f64, CostBreakdown, ConstraintSet)> {
    let (states, reports) = solve_all_periods(problem, design, None, solver);
    check_reports(&reports)?;
    let (j, breakdown) = total_objective(problem, design, &states)?;
    let constraints = evaluate_constraints(problem, design, &states)?;
    Ok((states, j, breakdown, constraints))
}

/// Runs the augmented Lagrangian method from one scaled start point.
pub fn outer_solve(problem: &Problem, z0: &[f64], j_ref: f64, start: usize, opts: &OptimizerOptions) -> Result<OptimizationResult> {
    let scaling = Scaling::new(problem);
    let mut al = AugLagState::new(problem, opts.rho_initial);
    let mut z = z0.to_vec();
    let mut trace = Vec::new();
    let mut inner_tol = opts.inner_tolerance_initial;
    let mut prev_violation = f64::INFINITY;
    let mut warm: Option<Vec<StateSlice>> = None;
    let mut converged = false;
    let mut outer = 0;

    while outer < opts.max_outer_iterations {
        outer += 1;
        let merit = Merit { warm: Mutex::new(warm.clone()), ..Merit::new(problem, &scaling, &al, j_ref, opts.solver) };
        let mut obj = |z: &[f64]| merit.evaluate(z);
        let inner_opts = LbfgsOptions { tolerance: inner_tol.max(opts.stationarity_tolerance), ..opts.inner };
        let inner = inner_solve(&mut obj, &scaling.lower, &scaling.upper, &z, &inner_opts)?;
        z = inner.z.clone();
        warm = merit.warm.into_inner().unwrap();

        let design = scaling.to_physical(problem, &z);
        let states = solve_with_fallback(problem, &design, warm.as_deref(), &opts.solver)?;
        let (j, _) = total_objective(problem, &design, &states)?;
        let cs = evaluate_constraints(problem, &design, &states)?;
        let violation = cs.max_violation();
        trace.push(TraceRecord {
            start,
            outer,
            inner_iterations: inner.iterations,
            evaluations: inner.evaluations,
            objective: j,
            merit: inner.f,
            max_violation: violation,
            projected_gradient: inner.projected_gradient,
            rho: al.rho,
            inner_status: inner.status,
        });
        log::debug!("start {start} outer {outer}: J = {j:.6e}, violation = {violation:.3e}, pg = {:.3e}", inner.projected_gradient);
        warm = Some(states);

        if violation <= opts.feasibility_tolerance && inner.projected_gradient <= opts.stationarity_tolerance {
            converged = true;
            break;
        }
        // First-order multiplier update in the constraints' period order.
        let mut ie = 0;
        let mut ii = 0;
        for t in 0..problem.n_periods() {
            for lam in al.lambda[t].iter_mut() {
                *lam += al.rho * cs.equalities[ie].value;
                ie += 1;
            }
            for mu in al.mu[t].iter_mut() {
                *mu = (*mu + al.rho * cs.inequalities[ii].value).max(0.0);
                ii += 1;
            }
        }
        if violation > opts.feasibility_tolerance && violation > opts.sufficient_reduction * prev_violation {
            al.rho = (al.rho * opts.rho_growth).min(opts.rho_max);
        }
        prev_violation = violation;
        inner_tol = (inner_tol * opts.inner_tolerance_factor).max(opts.stationarity_tolerance);
    }

    let design = scaling.to_physical(problem, &z);
    let states = solve_with_fallback(problem, &design, warm.as_deref(), &opts.solver)?;
    let (objective, breakdown) = total_objective(problem, &design, &states)?;
    let constraints = evaluate_constraints(problem, &design, &states)?;
    Ok(OptimizationResult {
        design,
        states,
        objective,
        breakdown,
        constraints,
        multipliers: al,
        converged,
        outer_iterations: outer,
        start,
        trace,
    })
}

/// Cost of the heuristic start, used to normalize the merit function.
pub fn reference_cost(problem: &Problem, solver: &SolverOptions) -> f64 {
    let base = initial_design(problem, solver);
    match evaluate_design(problem, &base, solver) {
        Ok((_, j, _, _)) if j.is_finite() && j > 0.0 => j,
        _ => 1e6,
    }
}

/// Runs the augmented Lagrangian method from a single given design.
pub fn optimize_from(problem: &Problem, opts: &OptimizerOptions, start: &DesignVector) -> Result<OptimizationResult> {
    if start.layout != problem.layout {
        return Err(Error::ShapeMismatch("start design does not match the problem".into()));
    }
    let scaling = Scaling::new(problem);
    let mut d = start.clone();
    problem.clamp(&mut d);
    outer_solve(problem, &scaling.to_scaled(&d), reference_cost(problem, &opts.solver), 0, opts)
}

/// Runs the heuristic start, the given extra starts and seeded random
/// restarts; returns the lowest-cost feasible result (or the least violated
/// one if none is feasible). All traces are kept, in start order.
pub fn optimize(problem: &Problem, opts: &OptimizerOptions, extra_starts: &[DesignVector]) -> Result<OptimizationResult> {
    let scaling = Scaling::new(problem);
    let base = initial_design(problem, &opts.solver);
    let j_ref = reference_cost(problem, &opts.solver);
    let mut starts = vec![scaling.to_scaled(&base)];
    for d in extra_starts {
        if d.layout == problem.layout {
            let mut d = d.clone();
            problem.clamp(&mut d);
            starts.push(scaling.to_scaled(&d));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        starts.push(perturbed_start(problem, &scaling, &base, &mut rng));
    }

    let results: Vec<Result<OptimizationResult>> =
        starts.par_iter().enumerate().map(|(i, z0)| outer_solve(problem, z0, j_ref, i, opts)).collect();

    let mut trace = Vec::new();
    let mut best: Option<OptimizationResult> = None;
    let mut first_error = None;
    for r in results {
        match r {
            Ok(r) => {
                trace.extend(r.trace.iter().cloned());
                let better = match &best {
                    None => true,
                    Some(b) => is_better(&r, b, opts.feasibility_tolerance),
                };
                if better {
                    best = Some(r);
                }
            }
            Err(e) => {
                log::warn!("optimization start failed: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.trace = trace;
            Ok(b)
        }
        None => Err(first_error.unwrap_or(Error::StalledProgress("no start produced a result".into()))),
    }
}

/// Feasible beats infeasible; then lower cost, or lower violation.
pub fn is_better(a: &OptimizationResult, b: &OptimizationResult, tol: f64) -> bool {
    match (a.feasible(tol), b.feasible(tol)) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.objective < b.objective,
        (false, false) => a.constraints.max_violation() < b.constraints.max_violation(),
    }
}

//! Damped Newton solver for one period and the parallel map over periods.

use super::model::{PeriodModel, Triplets};
use crate::design::DesignVector;
use crate::error::{Error, Result};
use crate::network::EdgeKind;
use crate::problem::Problem;
use crate::state::{StateSlice, StateVector};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Newton solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Tolerance on the scaled residual ∞-norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Extra Newton steps taken after convergence while the residual keeps shrinking.
    pub polish_steps: usize,
    /// Pivot ratio below which the Jacobian is declared singular.
    pub singular_pivot_ratio: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 50, polish_steps: 2, singular_pivot_ratio: 1e-15 }
    }
}

/// Outcome of one period solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub period: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Final scaled residual ∞-norm.
    pub residual_norm: f64,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

/// Dense matrix from triplets.
pub fn dense(n_rows: usize, n_cols: usize, triplets: &Triplets) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n_rows, n_cols);
    for &(r, c, v) in triplets {
        m[(r, c)] += v;
    }
    m
}

/// LU-solves `a x = b`, rejecting numerically singular matrices.
pub fn lu_solve(mut a: DMatrix<f64>, b: &[f64], pivot_ratio: f64, period: usize) -> Result<Vec<f64>> {
    // Equilibrate rows so the pivot test compares like with like.
    let mut b = b.to_vec();
    for (i, bi) in b.iter_mut().enumerate() {
        let m = a.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m > 0.0 {
            a.row_mut(i).scale_mut(1.0 / m);
            *bi /= m;
        }
    }
    let lu = a.lu();
    let u = lu.u();
    let diag: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !(min / max >= pivot_ratio) {
        return Err(Error::SingularJacobian { period });
    }
    let x = lu.solve(&DVector::from_column_slice(&b)).ok_or(Error::SingularJacobian { period })?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian { period });
    }
    Ok(x.as_slice().to_vec())
}

fn scaled_norm(r: &[f64], s: &[f64]) -> (f64, f64) {
    let mut inf = 0.0f64;
    let mut sq = 0.0;
    for (a, b) in r.iter().zip(s) {
        let v = a * b;
        inf = inf.max(v.abs());
        sq += v * v;
    }
    if r.iter().any(|v| !v.is_finite()) {
        return (f64::INFINITY, f64::INFINITY);
    }
    (inf, 0.5 * sq)
}

/// Initial state: uniform 40 K, pressures and flows from a linearized
/// resistance network fed by the producer inflows.
pub fn cold_start(problem: &Problem, t: usize, d: &[f64]) -> StateSlice {
    let g = &problem.graph;
    let sl = problem.state_layout;
    let dl = problem.layout;
    let ctx = &problem.contexts[t];
    let phys = &problem.scenario.physics;
    let nn = g.n_nodes();
    let mut x = StateSlice::zeros(sl);

    let total_flow: f64 = (0..g.n_producers()).map(|k| d[dl.local_gamma(k)].max(0.0)).sum();
    let total_demand: f64 = ctx.demand.iter().sum();
    let n_con = g.n_consumers().max(1) as f64;
    let q_pipe = (total_flow / n_con.sqrt()).max(1e-4);

    // Conductances (m^3 s^-1 Pa^-1) from secant resistances at nominal flows.
    let mut lap = DMatrix::<f64>::zeros(nn, nn);
    let mut rhs = vec![0.0; nn];
    for (e, edge) in g.edges.iter().enumerate() {
        let cond = match &edge.kind {
            EdgeKind::Pipe(pipe) => {
                let (dp, _) = super::friction::pipe_pressure_drop(pipe, q_pipe, phys.density, phys.viscosity);
                q_pipe / dp
            }
            EdgeKind::Consumer(_) => {
                let c = g.consumers.iter().position(|&x| x == e).unwrap();
                let share = if total_demand > 0.0 { ctx.demand[c] / total_demand } else { 1.0 / n_con };
                let q_nom = (total_flow * share).max(1e-6);
                1.0 / (d[dl.local_alpha(c)] * q_nom)
            }
            EdgeKind::Producer(_) => {
                let k = g.producer_ordinal(e).unwrap();
                let gamma = d[dl.local_gamma(k)];
                rhs[edge.to] += gamma;
                rhs[edge.from] -= gamma;
                continue;
            }
        };
        let (i, j) = (edge.from, edge.to);
        lap[(i, i)] += cond;
        lap[(j, j)] += cond;
        lap[(i, j)] -= cond;
        lap[(j, i)] -= cond;
    }
    // Row of the reference node pins its pressure.
    let r = problem.reference_node;
    for c in 0..nn {
        lap[(r, c)] = 0.0;
    }
    lap[(r, r)] = 1.0;
    rhs[r] = phys.static_pressure;
    // Mass balance: Σ cond (p_i - p_j) leaving = injection.
    let pressures = lu_solve(lap, &rhs, 1e-18, t).unwrap_or_else(|_| vec![phys.static_pressure; nn]);

    for n in 0..nn {
        x.values[sl.p(n)] = pressures[n];
        x.values[sl.theta_node(n)] = 40.0;
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let dp = pressures[edge.from] - pressures[edge.to];
        x.values[sl.q(e)] = match &edge.kind {
            EdgeKind::Pipe(pipe) => {
                let (ref_dp, _) = super::friction::pipe_pressure_drop(pipe, q_pipe, phys.density, phys.viscosity);
                dp * q_pipe / ref_dp
            }
            EdgeKind::Consumer(_) => {
                let c = g.consumers.iter().position(|&x| x == e).unwrap();
                let alpha = d[dl.local_alpha(c)];
                dp.signum() * (dp.abs() / alpha).sqrt()
            }
            EdgeKind::Producer(_) => d[dl.local_gamma(g.producer_ordinal(e).unwrap())],
        };
        x.values[sl.theta_exit(e)] = 40.0;
    }
    for (j, &k) in g.temp_controlled.iter().enumerate() {
        x.values[sl.theta_exit(g.producers[k])] = d[dl.local_tau(j)] - ctx.t_inf;
    }
    x
}

/// Solves the model equations of period `t` for the local design `d`.
pub fn solve_period(
    problem: &Problem,
    t: usize,
    d: &[f64],
    init: Option<&StateSlice>,
    opts: &SolverOptions,
) -> (StateSlice, SolveReport) {
    let start = Instant::now();
    let model = PeriodModel::new(problem, t);
    let sl = problem.state_layout;
    let n = sl.len();
    let scales = model.row_scales(d);
    let mut x = match init {
        Some(s) if s.values.len() == n && s.values.iter().all(|v| v.is_finite()) => s.values.clone(),
        _ => cold_start(problem, t, d).values,
    };
    let mut report = SolveReport {
        period: t,
        converged: false,
        iterations: 0,
        residual_norm: f64::INFINITY,
        wall_time_s: 0.0,
        error: None,
    };
    let mut polish = 0;
    let mut asm = model.assemble(d, &x, true);
    let (mut inf, mut merit) = scaled_norm(&asm.residual, &scales);
    loop {
        report.residual_norm = inf;
        if inf <= opts.tolerance {
            report.converged = true;
            if polish >= opts.polish_steps {
                break;
            }
        }
        if report.iterations >= opts.max_iterations + polish {
            break;
        }
        let jac = dense(n, n, &asm.jx);
        let rhs: Vec<f64> = asm.residual.iter().map(|v| -v).collect();
        let dx = match lu_solve(jac, &rhs, opts.singular_pivot_ratio, t) {
            Ok(dx) => dx,
            Err(e) => {
                if !report.converged {
                    report.error = Some(e.to_string());
                }
                break;
            }
        };
        // Backtracking on the merit function; keep the best trial.
        let mut lambda = 1.0;
        let mut best: Option<(Vec<f64>, f64, f64)> = None;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + lambda * b).collect();
            let r = model.residual(d, &trial);
            let (ti, tm) = scaled_norm(&r, &scales);
            let better = best.as_ref().map_or(true, |b| tm < b.2);
            if better && tm.is_finite() {
                best = Some((trial, ti, tm));
            }
            if tm <= (1.0 - 2e-4 * lambda) * merit {
                break;
            }
            lambda *= 0.5;
        }
        report.iterations += 1;
        let Some((trial, ti, tm)) = best else {
            report.error = Some("no finite trial point".into());
            break;
        };
        if report.converged {
            // Polishing: stop as soon as the residual no longer shrinks.
            if tm >= merit {
                break;
            }
            polish += 1;
        }
        x = trial;
        inf = ti;
        merit = tm;
        asm = model.assemble(d, &x, true);
    }
    if !report.converged && report.error.is_none() {
        report.error = Some(
            Error::MaxIterationsExceeded { period: t, iterations: report.iterations, residual: report.residual_norm }
                .to_string(),
        );
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    (StateSlice { layout: sl, values: x }, report)
}

/// Solves every period independently (in parallel) and returns the states in
/// period order.
pub fn solve_all_periods(
    problem: &Problem,
    design: &DesignVector,
    init: Option<&[StateSlice]>,
    opts: &SolverOptions,
) -> (StateVector, Vec<SolveReport>) {
    (0..problem.n_periods())
        .into_par_iter()
        .map(|t| solve_period(problem, t, &design.local(t), init.map(|s| &s[t]), opts))
        .collect::<Vec<_>>()
        .into_iter()
        .unzip()
}

/// Turns failed reports into an error naming the failed periods.
pub fn check_reports(reports: &[SolveReport]) -> Result<()> {
    let failed: Vec<usize> = reports.iter().filter(|r| !r.converged).map(|r| r.period).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::PeriodFailures(failed))
    }
}

//! Reduced gradients through the model equations by per-period adjoint solves.
//!
//! For a period term `L_t(d_t, x_t)` with `c_t(d_t, x_t) = 0`:
//! solve `(∂c/∂x)ᵀ λ = ∂L/∂x`, then `dL/dd = ∂L/∂d − (∂c/∂d)ᵀ λ`.
//! Capacity fractions are shared by all periods; their per-period
//! contributions are summed in sorted order, so neither thread scheduling nor
//! the order of the periods changes a single bit of the result.

use crate::design::DesignVector;
use crate::economics::{period_operating_cost, producer_capex_with_derivative};
use crate::error::{Error, Result};
use crate::network::Technology;
use crate::problem::Problem;
use crate::solver::{dense, lu_solve, PeriodModel, PeriodOutputs};
use crate::state::StateSlice;
use rayon::prelude::*;

/// Value and partial gradients of one period term.
#[derive(Debug, Clone, Default)]
pub struct PeriodTerms {
    pub value: f64,
    /// ∂L/∂x_t.
    pub gx: Vec<f64>,
    /// ∂L/∂d_t over the local slice.
    pub gd: Vec<f64>,
}

impl PeriodTerms {
    pub fn zeros(problem: &Problem) -> Self {
        Self { value: 0.0, gx: vec![0.0; problem.state_layout.len()], gd: vec![0.0; problem.layout.local_len()] }
    }
}

/// Reduced gradient over the local design slice of period `t`.
pub fn period_reduced_gradient(
    problem: &Problem,
    t: usize,
    d: &[f64],
    x: &[f64],
    terms: &PeriodTerms,
    pivot_ratio: f64,
) -> Result<Vec<f64>> {
    let model = PeriodModel::new(problem, t);
    let asm = model.assemble(d, x, true);
    let n = problem.state_layout.len();
    let jt = dense(n, n, &asm.jx).transpose();
    let lambda = lu_solve(jt, &terms.gx, pivot_ratio, t)?;
    let mut grad = terms.gd.clone();
    for &(r, c, v) in &asm.jd {
        grad[c] -= v * lambda[r];
    }
    Ok(grad)
}

/// Investment cost (€) and its gradient with respect to the capacity fractions.
pub fn capex_with_gradient(problem: &Problem, phi: &[f64]) -> (f64, Vec<f64>) {
    let params = &problem.scenario.parameters;
    let mut total = 0.0;
    let grad = (0..problem.graph.n_producers())
        .map(|k| {
            let p = problem.graph.producer(k);
            let size = if p.technology == Technology::ST { p.a_max } else { p.p_max };
            let (v, dv) = producer_capex_with_derivative(params, p.technology, phi[k], size);
            total += v;
            dv
        })
        .collect();
    (total, grad)
}

/// Total value `w_capex · capex + Σ_t L_t` and its reduced gradient over the
/// physical design vector.
pub fn assemble_gradient<F>(
    problem: &Problem,
    design: &DesignVector,
    states: &[StateSlice],
    capex_weight: f64,
    pivot_ratio: f64,
    terms: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(usize, &[f64], &[f64], &PeriodOutputs) -> PeriodTerms + Sync,
{
    if states.len() != problem.n_periods() {
        return Err(Error::ShapeMismatch("one state per period required".into()));
    }
    let l = problem.layout;
    let per_period: Vec<Result<(f64, Vec<f64>)>> = (0..problem.n_periods())
        .into_par_iter()
        .map(|t| {
            let d = design.local(t);
            let x = &states[t].values;
            let out = PeriodModel::new(problem, t).outputs(&d, x);
            let pt = terms(t, &d, x, &out);
            let g = period_reduced_gradient(problem, t, &d, x, &pt, pivot_ratio)?;
            Ok((pt.value, g))
        })
        .collect();
    let (capex, capex_grad) = capex_with_gradient(problem, design.phi());
    let mut value = capex_weight * capex;
    let mut grad = vec![0.0; l.len()];
    for (k, g) in capex_grad.iter().enumerate() {
        grad[k] = capex_weight * g;
    }
    let mut values = Vec::with_capacity(per_period.len());
    let mut shared = vec![Vec::with_capacity(per_period.len()); l.n_producers];
    for (t, r) in per_period.into_iter().enumerate() {
        let (v, g) = r?;
        values.push(v);
        for (k, gk) in g[..l.n_producers].iter().enumerate() {
            shared[k].push(*gk);
        }
        for (i, gi) in g.iter().enumerate().skip(l.n_producers) {
            grad[l.global_index(t, i)] += gi;
        }
    }
    value += ordered_sum(values);
    for (k, terms) in shared.into_iter().enumerate() {
        grad[k] += ordered_sum(terms);
    }
    Ok((value, grad))
}

/// Sum independent of the order of `terms`.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Discounted total cost J and dJ/d(design) at converged states.
pub fn objective_gradient(problem: &Problem, design: &DesignVector, states: &[StateSlice]) -> Result<(f64, Vec<f64>)> {
    let f_op = problem.discount_factor;
    assemble_gradient(problem, design, states, 1.0, 1e-15, |t, _d, _x, out| {
        let w = problem.contexts[t].weight * f_op;
        let cost = period_operating_cost(problem, out);
        let mut pt = PeriodTerms::zeros(problem);
        pt.value = w * cost.value;
        cost.accumulate(w, &mut pt.gx, &mut pt.gd);
        pt
    })
}

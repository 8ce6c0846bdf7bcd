//! Starting designs: a heuristic feasible-ish point and seeded perturbations.

use super::scaling::Scaling;
use crate::design::DesignVector;
use crate::problem::Problem;
use crate::solver::{solve_period, SolverOptions};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Heuristic start: φ = 0.5, τ at mid-range, inflows sized for the aggregate
/// demand and split evenly, valves from a few flow-balancing passes.
pub fn initial_design(problem: &Problem, solver: &SolverOptions) -> DesignVector {
    let l = problem.layout;
    let g = &problem.graph;
    let rho_cp = problem.scenario.physics.rho_cp();
    let mut values = vec![0.0; l.len()];
    for k in 0..g.n_producers() {
        values[k] = 0.5;
    }
    for t in 0..l.n_periods {
        for (j, i) in l.tau_range(t).enumerate() {
            let p = g.producer(g.temp_controlled[j]);
            values[i] = 0.5 * (p.supply_min + p.supply_max);
        }
        let ctx = &problem.contexts[t];
        let total_demand: f64 = ctx.demand.iter().sum();
        let supply: f64 = if g.temp_controlled.is_empty() {
            60.0
        } else {
            l.tau_range(t).map(|i| values[i]).sum::<f64>() / l.n_temp as f64
        };
        let ret = ctx.requirements.iter().map(|r| r.cold).fold(ctx.t_inf, f64::max) + 5.0;
        let spread = (supply - ret).max(10.0);
        let total_flow = 1.1 * total_demand / (rho_cp * spread);
        let enabled: Vec<usize> = (0..g.n_producers()).filter(|&k| problem.upper[l.gamma_range(t).start + k] > 0.0).collect();
        for &k in &enabled {
            values[l.gamma_range(t).start + k] = total_flow / enabled.len() as f64;
        }
        for (c, i) in l.alpha_range(t).enumerate() {
            values[i] = problem.consumers[c].alpha_min;
        }
    }
    let mut design = DesignVector { layout: l, values };
    problem.clamp(&mut design);
    balance_valves(problem, &mut design, solver);
    design
}

/// Adjusts valve settings so consumer flows follow the demand split, keeping
/// the least-throttled valve fully open.
fn balance_valves(problem: &Problem, design: &mut DesignVector, solver: &SolverOptions) {
    let l = problem.layout;
    let g = &problem.graph;
    for t in 0..l.n_periods {
        let ctx = &problem.contexts[t];
        let total_demand: f64 = ctx.demand.iter().sum();
        if !(total_demand > 0.0) {
            continue;
        }
        let mut state = None;
        for _ in 0..8 {
            let d = design.local(t);
            let (x, report) = solve_period(problem, t, &d, state.as_ref(), solver);
            if !report.converged {
                break;
            }
            let total_flow: f64 = g.consumers.iter().map(|&e| x.q(e).abs()).sum();
            let mut scale: f64 = 0.0;
            let range = l.alpha_range(t);
            let mut updated = Vec::with_capacity(g.n_consumers());
            for (c, &e) in g.consumers.iter().enumerate() {
                let alpha = design.values[range.start + c];
                if ctx.demand[c] > 0.0 {
                    let target = total_flow * ctx.demand[c] / total_demand;
                    let a = alpha * (x.q(e).abs().max(1e-9) / target).powi(2);
                    scale = scale.max(problem.consumers[c].alpha_min / a);
                    updated.push(Some(a));
                } else {
                    updated.push(None);
                }
            }
            for (c, a) in updated.into_iter().enumerate() {
                if let Some(a) = a {
                    let i = range.start + c;
                    design.values[i] = (a * scale).clamp(problem.lower[i], problem.upper[i]);
                }
            }
            state = Some(x);
        }
    }
}

/// Random start around `base`: capacity fractions and temperatures drawn
/// uniformly within their bounds, inflows re-split at the same total.
pub fn perturbed_start(problem: &Problem, scaling: &Scaling, base: &DesignVector, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let l = problem.layout;
    let mut z = scaling.to_scaled(base);
    let draw = |i: usize, rng: &mut ChaCha8Rng| {
        let (lo, hi) = (scaling.lower[i], scaling.upper[i]);
        if hi > lo {
            lo + (hi - lo) * rng.gen::<f64>()
        } else {
            lo
        }
    };
    for k in l.phi_range() {
        z[k] = draw(k, rng).clamp(0.1f64.max(scaling.lower[k]), 0.9f64.min(scaling.upper[k]).max(scaling.lower[k]));
    }
    for t in 0..l.n_periods {
        for i in l.tau_range(t) {
            z[i] = draw(i, rng);
        }
        let range = l.gamma_range(t);
        let total: f64 = range.clone().map(|i| base.values[i]).sum();
        let weights: Vec<f64> = range
            .clone()
            .map(|i| if scaling.upper[i] > scaling.lower[i] { 0.2 + rng.gen::<f64>() } else { 0.0 })
            .collect();
        let wsum: f64 = weights.iter().sum();
        if wsum > 0.0 {
            for (w, i) in weights.iter().zip(range) {
                let gamma = total * w / wsum;
                z[i] = (gamma / scaling.derivative(i, 0.0)).clamp(scaling.lower[i], scaling.upper[i]);
            }
        }
    }
    z
}

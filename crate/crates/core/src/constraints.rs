//! Technological constraints and consumer temperature requirements.
//!
//! Equalities: demand satisfaction per consumer and full integration of the
//! available solar heat. Inequalities (`h ≤ 0`): maximal pressure rise over
//! each producer, the thermal capacity of each non-solar producer and the
//! inflow of each producer, which may only pass through built capacity. All
//! residuals are dimensionless.

use crate::design::DesignVector;
use crate::error::{Error, Result};
use crate::network::Technology;
use crate::problem::Problem;
use crate::scenario::SubstationDefaults;
use crate::solver::{PeriodModel, PeriodOutputs, Quantity};
use crate::state::StateSlice;
use serde::{Deserialize, Serialize};

/// Secondary-side requirement of one consumer in one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsumerRequirement {
    /// Required radiator supply temperature (°C).
    pub hot: f64,
    /// Radiator return temperature (°C).
    pub cold: f64,
    /// Heat demand (W).
    pub demand: f64,
}

/// Radiator temperatures at part load `ratio = Q̇/Q̇_peak` with a constant
/// secondary flow, from the characteristic radiator equation
/// `Q̇/Q̇_peak = (LMTD/LMTD_peak)^n`.
pub fn radiator_requirements(ratio: f64, demand: f64, sub: &SubstationDefaults) -> ConsumerRequirement {
    let room = sub.room_temperature;
    let spread_peak = sub.peak_hot - sub.peak_cold;
    if !(ratio > 0.0) {
        return ConsumerRequirement { hot: room, cold: room, demand };
    }
    let lmtd_peak = spread_peak / ((sub.peak_hot - room) / (sub.peak_cold - room)).ln();
    let lmtd = lmtd_peak * ratio.powf(1.0 / sub.radiator_exponent);
    let spread = ratio * spread_peak;
    // LMTD = ΔT / ln((x + ΔT) / x) with x the cold-side excess over the room.
    let excess = spread / (spread / lmtd).exp_m1();
    ConsumerRequirement { hot: room + excess + spread, cold: room + excess, demand }
}

/// Normalized demand shortfall, `None` when there is no demand.
pub fn demand_residual(demand: f64, delivered: f64) -> Option<f64> {
    (demand > 0.0).then(|| (demand - delivered) / demand)
}

/// Normalized mismatch between available and integrated solar heat.
pub fn solar_integration_residual(available: f64, integrated: f64, reference_power: f64) -> f64 {
    (available - integrated) / reference_power
}

/// Normalized excess of the pressure rise over its maximum.
pub fn pressure_residual(p_in: f64, p_out: f64, dp_max: f64) -> f64 {
    ((p_out - p_in) - dp_max) / dp_max
}

/// Normalized excess of a producer inflow over its share of the flow bound.
pub fn flow_residual(q: f64, flow_max: f64, phi: f64) -> f64 {
    q / flow_max - phi
}

/// Normalized excess of the produced heat over the built capacity.
pub fn capacity_residual(rho_cp: f64, q: f64, dtheta: f64, phi: f64, p_max: f64) -> f64 {
    rho_cp * q * dtheta / p_max - phi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum ConstraintKind {
    /// Consumer ordinal.
    Demand(usize),
    /// Producer ordinal.
    Solar(usize),
    Pressure(usize),
    Capacity(usize),
    /// Producer ordinal.
    Flow(usize),
}

/// One evaluated constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintValue {
    pub period: usize,
    pub kind: ConstraintKind,
    pub value: f64,
}

/// Constraints of one period with gradients over `[x_t | d_t]`.
#[derive(Debug, Clone, Default)]
pub struct PeriodConstraints {
    pub equalities: Vec<(ConstraintKind, Quantity)>,
    pub inequalities: Vec<(ConstraintKind, Quantity)>,
}

/// All constraints of a design.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub equalities: Vec<ConstraintValue>,
    pub inequalities: Vec<ConstraintValue>,
}

impl ConstraintSet {
    /// Largest equality magnitude or positive inequality part.
    pub fn max_violation(&self) -> f64 {
        let eq = self.equalities.iter().map(|c| c.value.abs()).fold(0.0, f64::max);
        let ineq = self.inequalities.iter().map(|c| c.value.max(0.0)).fold(0.0, f64::max);
        eq.max(ineq)
    }
}

/// Number of (equality, inequality) constraints of a period.
pub fn period_counts(problem: &Problem, t: usize) -> (usize, usize) {
    let g = &problem.graph;
    let n_st = (0..g.n_producers()).filter(|&k| g.producer(k).technology == Technology::ST).count();
    let n_dem = problem.contexts[t].demand.iter().filter(|&&d| d > 0.0).count();
    (n_dem + n_st, 2 * g.n_producers() + (g.n_producers() - n_st))
}

/// Constraints of period `t` with gradients.
pub fn period_constraints(problem: &Problem, t: usize, d: &[f64], x: &[f64], out: &PeriodOutputs) -> PeriodConstraints {
    let g = &problem.graph;
    let sl = problem.state_layout;
    let dl = problem.layout;
    let nx = sl.len();
    let ctx = &problem.contexts[t];
    let dp_max = problem.scenario.economics.max_pressure_rise;
    let mut pc = PeriodConstraints::default();

    for (c, heat) in out.consumer_heat.iter().enumerate() {
        let qd = ctx.demand[c];
        if let Some(v) = demand_residual(qd, heat.value) {
            pc.equalities.push((
                ConstraintKind::Demand(c),
                Quantity { value: v, grad: heat.grad.iter().map(|&(i, g)| (i, -g / qd)).collect() },
            ));
        }
    }
    for k in 0..g.n_producers() {
        if g.producer(k).technology != Technology::ST {
            continue;
        }
        let p_ref = problem.reference_power[k];
        let (avail, heat) = (&out.solar_available[k], &out.producer_heat[k]);
        let mut grad: Vec<(usize, f64)> = avail.grad.iter().map(|&(i, v)| (i, v / p_ref)).collect();
        grad.extend(heat.grad.iter().map(|&(i, v)| (i, -v / p_ref)));
        pc.equalities.push((
            ConstraintKind::Solar(k),
            Quantity { value: solar_integration_residual(avail.value, heat.value, p_ref), grad },
        ));
    }
    for k in 0..g.n_producers() {
        let edge = &g.edges[g.producers[k]];
        let (pi, pj) = (x[sl.p(edge.from)], x[sl.p(edge.to)]);
        pc.inequalities.push((
            ConstraintKind::Pressure(k),
            Quantity {
                value: pressure_residual(pi, pj, dp_max),
                grad: vec![(sl.p(edge.to), 1.0 / dp_max), (sl.p(edge.from), -1.0 / dp_max)],
            },
        ));
    }
    for k in 0..g.n_producers() {
        if g.producer(k).technology == Technology::ST {
            continue;
        }
        let p_max = g.producer(k).p_max;
        let heat = &out.producer_heat[k];
        let phi_index = nx + dl.local_phi(k);
        let mut grad: Vec<(usize, f64)> = heat.grad.iter().map(|&(i, v)| (i, v / p_max)).collect();
        grad.push((phi_index, -1.0));
        pc.inequalities.push((ConstraintKind::Capacity(k), Quantity { value: heat.value / p_max - d[dl.local_phi(k)], grad }));
    }
    for k in 0..g.n_producers() {
        let flow_max = g.producer(k).flow_max;
        let grad = vec![(nx + dl.local_gamma(k), 1.0 / flow_max), (nx + dl.local_phi(k), -1.0)];
        let value = flow_residual(d[dl.local_gamma(k)], flow_max, d[dl.local_phi(k)]);
        pc.inequalities.push((ConstraintKind::Flow(k), Quantity { value, grad }));
    }
    pc
}

/// Evaluates every constraint of a design at its converged states.
pub fn evaluate_constraints(problem: &Problem, design: &DesignVector, states: &[StateSlice]) -> Result<ConstraintSet> {
    if states.len() != problem.n_periods() || design.layout != problem.layout {
        return Err(Error::ShapeMismatch("design or states do not match the problem".into()));
    }
    let mut set = ConstraintSet::default();
    for (t, x) in states.iter().enumerate() {
        let d = design.local(t);
        let out = PeriodModel::new(problem, t).outputs(&d, &x.values);
        let pc = period_constraints(problem, t, &d, &x.values, &out);
        set.equalities.extend(pc.equalities.iter().map(|(k, q)| ConstraintValue { period: t, kind: *k, value: q.value }));
        set.inequalities
            .extend(pc.inequalities.iter().map(|(k, q)| ConstraintValue { period: t, kind: *k, value: q.value }));
    }
    Ok(set)
}

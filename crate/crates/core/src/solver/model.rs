//! Per-period model equations `c_t(d_t, x_t) = 0` with analytic Jacobians.
//!
//! Equations follow the state layout: one mass balance per node (the
//! reference node's balance is replaced by its imposed pressure), one
//! momentum balance per edge, one mixing balance per node and one exit
//! temperature closure per edge.

use super::friction::pipe_pressure_drop;
use crate::network::{EdgeKind, Technology};
use crate::problem::{PeriodContext, Problem, VALVE_FLOW_SMOOTHING};
use crate::producers::counterflow_duty;
use crate::state::StateLayout;

/// Sparse matrix entries `(row, col, value)`; duplicates are summed.
pub type Triplets = Vec<(usize, usize, f64)>;

/// Residual and optional Jacobians with respect to state and local design.
#[derive(Debug, Clone, Default)]
pub struct Assembly {
    pub residual: Vec<f64>,
    pub jx: Triplets,
    pub jd: Triplets,
}

/// Scalar with a sparse gradient over the stacked vector `[x_t | d_t]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Quantity {
    pub value: f64,
    pub grad: Vec<(usize, f64)>,
}

impl Quantity {
    pub fn constant(value: f64) -> Self {
        Self { value, grad: Vec::new() }
    }

    /// Adds `w ∇self` into dense state and design gradients.
    pub fn accumulate(&self, w: f64, gx: &mut [f64], gd: &mut [f64]) {
        let nx = gx.len();
        for &(i, v) in &self.grad {
            if i < nx {
                gx[i] += w * v;
            } else {
                gd[i - nx] += w * v;
            }
        }
    }
}

/// Physical quantities derived from a converged period state.
#[derive(Debug, Clone, Default)]
pub struct PeriodOutputs {
    /// Heat added to the network per producer (W).
    pub producer_heat: Vec<Quantity>,
    /// Conversion efficiency (or COP) per producer; 1 for solar.
    pub efficiency: Vec<Quantity>,
    /// Hydraulic power delivered by each producer's pump (W).
    pub pump_power: Vec<Quantity>,
    /// Heat delivered to each consumer (W).
    pub consumer_heat: Vec<Quantity>,
    /// Solar heat available per producer at the built area (W).
    pub solar_available: Vec<Quantity>,
    /// Solar secondary-loop flow per producer (m^3 s^-1).
    pub solar_flow: Vec<Quantity>,
    /// True where an efficiency fit was evaluated at a clamped input.
    pub clamped: Vec<bool>,
}

/// The model of one period.
#[derive(Clone, Copy)]
pub struct PeriodModel<'a> {
    pub problem: &'a Problem,
    pub t: usize,
}

fn sgn(q: f64) -> f64 {
    if q >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl<'a> PeriodModel<'a> {
    pub fn new(problem: &'a Problem, t: usize) -> Self {
        Self { problem, t }
    }

    pub fn ctx(&self) -> &'a PeriodContext {
        &self.problem.contexts[self.t]
    }

    pub fn layout(&self) -> StateLayout {
        self.problem.state_layout
    }

    /// Node a flow leaves from: `from` for non-negative flow.
    pub fn upstream(&self, e: usize, q: f64) -> usize {
        let edge = &self.problem.graph.edges[e];
        if q >= 0.0 {
            edge.from
        } else {
            edge.to
        }
    }

    pub fn downstream(&self, e: usize, q: f64) -> usize {
        let edge = &self.problem.graph.edges[e];
        if q >= 0.0 {
            edge.to
        } else {
            edge.from
        }
    }

    fn flow_floor(&self) -> f64 {
        self.problem.scenario.physics.flow_floor
    }

    /// `max(|q|, q_floor)` and its derivative.
    fn regularized(&self, q: f64) -> (f64, f64) {
        let qf = self.flow_floor();
        if q.abs() > qf {
            (q.abs(), sgn(q))
        } else {
            (qf, 0.0)
        }
    }

    /// Residual vector only.
    pub fn residual(&self, d: &[f64], x: &[f64]) -> Vec<f64> {
        self.assemble(d, x, false).residual
    }

    /// Residual plus, when `jacobians` is set, ∂c/∂x and ∂c/∂d.
    pub fn assemble(&self, d: &[f64], x: &[f64], jacobians: bool) -> Assembly {
        let pb = self.problem;
        let g = &pb.graph;
        let sl = pb.state_layout;
        let dl = pb.layout;
        let ctx = self.ctx();
        let phys = &pb.scenario.physics;
        let rho_cp = phys.rho_cp();
        let (nn, ne) = (g.n_nodes(), g.n_edges());
        let mut res = vec![0.0; sl.len()];
        let mut jx: Triplets = Vec::new();
        let mut jd: Triplets = Vec::new();
        let mut px = |r: usize, c: usize, v: f64| {
            if jacobians {
                jx.push((r, c, v));
            }
        };
        let mut pd = |r: usize, c: usize, v: f64| {
            if jacobians {
                jd.push((r, c, v));
            }
        };
        let q = |e: usize| x[sl.q(e)];
        let p = |n: usize| x[sl.p(n)];
        let tn = |n: usize| x[sl.theta_node(n)];
        let tx = |e: usize| x[sl.theta_exit(e)];

        // Mass balances.
        let r_mass = |n: usize| n;
        for (e, edge) in g.edges.iter().enumerate() {
            if edge.to != pb.reference_node {
                res[r_mass(edge.to)] += q(e);
                px(r_mass(edge.to), sl.q(e), 1.0);
            }
            if edge.from != pb.reference_node {
                res[r_mass(edge.from)] -= q(e);
                px(r_mass(edge.from), sl.q(e), -1.0);
            }
        }
        res[r_mass(pb.reference_node)] = p(pb.reference_node) - phys.static_pressure;
        px(r_mass(pb.reference_node), sl.p(pb.reference_node), 1.0);

        // Momentum balances.
        let r_mom = |e: usize| nn + e;
        for (e, edge) in g.edges.iter().enumerate() {
            let r = r_mom(e);
            match &edge.kind {
                EdgeKind::Pipe(pipe) => {
                    let (dp, ddp) = pipe_pressure_drop(pipe, q(e), phys.density, phys.viscosity);
                    res[r] = p(edge.from) - p(edge.to) - dp;
                    px(r, sl.p(edge.from), 1.0);
                    px(r, sl.p(edge.to), -1.0);
                    px(r, sl.q(e), -ddp);
                }
                EdgeKind::Consumer(_) => {
                    let c = g.consumers.iter().position(|&x| x == e).expect("consumer ordinal");
                    let alpha = d[dl.local_alpha(c)];
                    let qe = q(e);
                    let s = (qe * qe + VALVE_FLOW_SMOOTHING * VALVE_FLOW_SMOOTHING).sqrt();
                    res[r] = p(edge.from) - p(edge.to) - alpha * qe * s;
                    px(r, sl.p(edge.from), 1.0);
                    px(r, sl.p(edge.to), -1.0);
                    px(r, sl.q(e), -alpha * (s + qe * qe / s));
                    pd(r, dl.local_alpha(c), -qe * s);
                }
                EdgeKind::Producer(_) => {
                    let k = g.producer_ordinal(e).expect("producer ordinal");
                    res[r] = q(e) - d[dl.local_gamma(k)];
                    px(r, sl.q(e), 1.0);
                    pd(r, dl.local_gamma(k), -1.0);
                }
            }
        }

        // Mixing balances.
        let r_mix = |n: usize| nn + ne + n;
        let qf = self.flow_floor();
        let mut inflow_sum = vec![0.0; nn];
        for e in 0..ne {
            inflow_sum[self.downstream(e, q(e))] += q(e).abs();
        }
        for n in 0..nn {
            let s = inflow_sum[n];
            res[r_mix(n)] += tn(n) * s.max(qf);
            px(r_mix(n), sl.theta_node(n), s.max(qf));
        }
        for e in 0..ne {
            let qe = q(e);
            let n = self.downstream(e, qe);
            let r = r_mix(n);
            res[r] -= qe.abs() * tx(e);
            let ds = if inflow_sum[n] > qf { tn(n) * sgn(qe) } else { 0.0 };
            px(r, sl.q(e), ds - sgn(qe) * tx(e));
            px(r, sl.theta_exit(e), -qe.abs());
        }

        // Exit temperature closures.
        let r_exit = |e: usize| 2 * nn + ne + e;
        for (e, edge) in g.edges.iter().enumerate() {
            let r = r_exit(e);
            let qe = q(e);
            let u = self.upstream(e, qe);
            match &edge.kind {
                EdgeKind::Pipe(pipe) => {
                    let a = pipe.u_loss * pipe.length / rho_cp;
                    let (m, dm) = self.regularized(qe);
                    let decay = (-a / m).exp();
                    res[r] = tx(e) - tn(u) * decay;
                    px(r, sl.theta_exit(e), 1.0);
                    px(r, sl.theta_node(u), -decay);
                    px(r, sl.q(e), -tn(u) * decay * a / (m * m) * dm);
                }
                EdgeKind::Consumer(_) => {
                    let c = g.consumers.iter().position(|&x| x == e).expect("consumer ordinal");
                    let (m, dm) = self.regularized(qe);
                    let c_net = rho_cp * m;
                    let duty = counterflow_duty(c_net, ctx.secondary_rate[c], pb.consumers[c].ua);
                    let drive = tn(u) + ctx.t_inf - ctx.requirements[c].cold;
                    let gain = duty.duty / c_net;
                    res[r] = tx(e) - tn(u) + drive * gain;
                    px(r, sl.theta_exit(e), 1.0);
                    px(r, sl.theta_node(u), -1.0 + gain);
                    px(r, sl.q(e), drive * rho_cp * dm * (duty.d_c1 / c_net - duty.duty / (c_net * c_net)));
                }
                EdgeKind::Producer(attrs) => {
                    let k = g.producer_ordinal(e).expect("producer ordinal");
                    if attrs.technology == Technology::ST {
                        let solar = &ctx.solar[k];
                        let c1 = solar.capacity_rate(&pb.scenario.parameters.solar);
                        let phi = d[dl.local_phi(k)];
                        let (m, dm) = self.regularized(qe);
                        let c_net = rho_cp * m;
                        let duty = counterflow_duty(c_net, phi * c1, pb.solar_ua[k]);
                        let drive = if solar.active { solar.t_hot - ctx.t_inf - tn(u) } else { 0.0 };
                        let gain = duty.duty / c_net;
                        res[r] = tx(e) - tn(u) - drive * gain;
                        px(r, sl.theta_exit(e), 1.0);
                        px(r, sl.theta_node(u), -1.0 + if solar.active { gain } else { 0.0 });
                        px(r, sl.q(e), -drive * rho_cp * dm * (duty.d_c1 / c_net - duty.duty / (c_net * c_net)));
                        pd(r, dl.local_phi(k), -drive / c_net * duty.d_c2 * c1);
                    } else {
                        let j = pb.tau_index(k).expect("temperature-controlled producer");
                        res[r] = tx(e) - (d[dl.local_tau(j)] - ctx.t_inf);
                        px(r, sl.theta_exit(e), 1.0);
                        pd(r, dl.local_tau(j), -1.0);
                    }
                }
            }
        }
        Assembly { residual: res, jx, jd }
    }

    /// Row weights turning the residual into a dimensionless vector.
    pub fn row_scales(&self, d: &[f64]) -> Vec<f64> {
        let pb = self.problem;
        let g = &pb.graph;
        let (nn, ne) = (g.n_nodes(), g.n_edges());
        let total: f64 = (0..g.n_producers()).map(|k| d[pb.layout.local_gamma(k)].abs()).sum();
        let q_scale = total.max(1e-4);
        let p_scale = 1e4;
        let mut s = vec![1.0; pb.state_layout.len()];
        for n in 0..nn {
            s[n] = if n == pb.reference_node { 1.0 / p_scale } else { 1.0 / q_scale };
            s[nn + ne + n] = 1.0 / q_scale;
        }
        for e in 0..ne {
            s[nn + e] = if g.edges[e].producer().is_some() { 1.0 / q_scale } else { 1.0 / p_scale };
        }
        s
    }

    /// Producer and consumer quantities with gradients.
    pub fn outputs(&self, d: &[f64], x: &[f64]) -> PeriodOutputs {
        let pb = self.problem;
        let g = &pb.graph;
        let sl = pb.state_layout;
        let dl = pb.layout;
        let ctx = self.ctx();
        let rho_cp = pb.scenario.physics.rho_cp();
        let nx = sl.len();
        let params = &pb.scenario.parameters;
        let mut out = PeriodOutputs::default();
        for k in 0..g.n_producers() {
            let e = g.producers[k];
            let edge = &g.edges[e];
            let (qe, th_in, th_out) = (x[sl.q(e)], x[sl.theta_node(edge.from)], x[sl.theta_exit(e)]);
            let technology = g.producer(k).technology;
            if technology == Technology::ST && !ctx.solar[k].active {
                // The exchanger closure pins θ_exit to θ_in, so no heat is added.
                out.producer_heat.push(Quantity::constant(0.0));
            } else {
                out.producer_heat.push(Quantity {
                    value: rho_cp * qe * (th_out - th_in),
                    grad: vec![
                        (sl.q(e), rho_cp * (th_out - th_in)),
                        (sl.theta_exit(e), rho_cp * qe),
                        (sl.theta_node(edge.from), -rho_cp * qe),
                    ],
                });
            }
            let (eff, clamped) = match technology {
                Technology::GB => {
                    let ev = params.gb_model(th_in + ctx.t_inf);
                    (Quantity { value: ev.value, grad: vec![(sl.theta_node(edge.from), ev.derivative)] }, ev.clamped)
                }
                Technology::HP => {
                    let ev = params.hp_model(th_out);
                    (Quantity { value: ev.value, grad: vec![(sl.theta_exit(e), ev.derivative)] }, ev.clamped)
                }
                Technology::EB => (Quantity::constant(params.eb_efficiency.a), false),
                Technology::ST => (Quantity::constant(1.0), false),
            };
            out.efficiency.push(eff);
            out.clamped.push(clamped);
            let (pi, pj) = (x[sl.p(edge.from)], x[sl.p(edge.to)]);
            out.pump_power.push(Quantity {
                value: qe * (pj - pi),
                grad: vec![(sl.q(e), pj - pi), (sl.p(edge.to), qe), (sl.p(edge.from), -qe)],
            });
            let solar = &ctx.solar[k];
            let phi = d[dl.local_phi(k)];
            out.solar_available.push(Quantity { value: phi * solar.heat, grad: vec![(nx + dl.local_phi(k), solar.heat)] });
            out.solar_flow.push(Quantity { value: phi * solar.flow, grad: vec![(nx + dl.local_phi(k), solar.flow)] });
        }
        for &e in &g.consumers {
            let qe = x[sl.q(e)];
            let u = self.upstream(e, qe);
            let (th_u, th_x) = (x[sl.theta_node(u)], x[sl.theta_exit(e)]);
            out.consumer_heat.push(Quantity {
                value: rho_cp * qe.abs() * (th_u - th_x),
                grad: vec![
                    (sl.q(e), rho_cp * sgn(qe) * (th_u - th_x)),
                    (sl.theta_node(u), rho_cp * qe.abs()),
                    (sl.theta_exit(e), -rho_cp * qe.abs()),
                ],
            });
        }
        out
    }
}

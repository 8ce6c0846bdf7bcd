//! A network, scenario and period set bound together, with everything the
//! model equations need per period precomputed: consumer requirements,
//! substation sizing, solar operating points and design-variable bounds.

use crate::constraints::{radiator_requirements, ConsumerRequirement};
use crate::design::{DesignLayout, DesignVector};
use crate::economics::discount_factor;
use crate::error::{Error, Result};
use crate::network::{NetworkGraph, Technology};
use crate::periods::PeriodSet;
use crate::producers::{solar_preprocess_with, SolarUnitState};
use crate::scenario::Scenario;
use crate::state::StateLayout;

/// Substation sizing of one consumer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsumerSizing {
    /// Design (maximum) demand over all periods (W).
    pub design_demand: f64,
    /// Heat exchanger conductance (W K^-1).
    pub ua: f64,
    /// Valve loss coefficient range (Pa s^2 m^-6).
    pub alpha_min: f64,
    pub alpha_max: f64,
}

/// Drivers of one period as seen by the model equations.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodContext {
    pub t_inf: f64,
    pub g_irr: f64,
    pub weight: f64,
    pub is_peak: bool,
    /// Heat demand per consumer (W).
    pub demand: Vec<f64>,
    /// Secondary-side requirements per consumer.
    pub requirements: Vec<ConsumerRequirement>,
    /// Secondary capacity rate per consumer (W K^-1), zero without demand.
    pub secondary_rate: Vec<f64>,
    /// Solar operating point per producer at full area; inactive for non-solar.
    pub solar: Vec<SolarUnitState>,
}

/// Regularization flow of the valve characteristic (m^3 s^-1).
pub const VALVE_FLOW_SMOOTHING: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Problem {
    pub graph: NetworkGraph,
    pub scenario: Scenario,
    pub periods: PeriodSet,
    pub layout: DesignLayout,
    pub state_layout: StateLayout,
    pub contexts: Vec<PeriodContext>,
    pub consumers: Vec<ConsumerSizing>,
    /// Solar heat exchanger conductance per producer (W K^-1), zero for non-solar.
    pub solar_ua: Vec<f64>,
    /// Reference heat rate normalizing each producer's constraints (W).
    pub reference_power: Vec<f64>,
    /// Node whose pressure is imposed.
    pub reference_node: usize,
    /// Physical design bounds.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Active hours per year (h).
    pub active_hours: f64,
    pub discount_factor: f64,
}

/// Log-mean temperature difference of a counter-flow exchanger.
fn lmtd(dt_a: f64, dt_b: f64) -> f64 {
    if (dt_a - dt_b).abs() < 1e-12 {
        dt_a
    } else {
        (dt_a - dt_b) / (dt_a / dt_b).ln()
    }
}

impl Problem {
    pub fn new(graph: NetworkGraph, scenario: Scenario, periods: PeriodSet) -> Result<Self> {
        scenario.validate()?;
        periods.validate(graph.n_consumers())?;
        if graph.producers.is_empty() {
            return Err(Error::InvalidNetwork("network has no producer".into()));
        }
        for id in scenario.menu.fixed_capacity.keys() {
            let known = graph.edge_id(id).and_then(|e| graph.producer_ordinal(e)).is_some();
            if !known {
                return Err(Error::DanglingReference(format!("fixed capacity for unknown producer `{id}`")));
            }
        }
        let layout = DesignLayout::for_graph(&graph, periods.len())?;
        let state_layout = StateLayout::for_graph(&graph);
        let phys = scenario.physics;
        let sub = scenario.substation;
        let rho_cp = phys.rho_cp();
        let solar_params = scenario.parameters.solar;

        let design_demand = periods.design_demand();
        let design_lmtd = lmtd(sub.design_primary_in - sub.peak_hot, sub.design_primary_out - sub.peak_cold);
        let consumers: Vec<ConsumerSizing> = (0..graph.n_consumers())
            .map(|c| {
                let attrs = graph.consumer(c);
                let qd = design_demand[c];
                let ua = attrs.ua.unwrap_or_else(|| (qd / design_lmtd).max(1.0));
                let q_nom = (qd / (rho_cp * sub.nominal_spread)).max(1e-5);
                let alpha_min = attrs.valve_min.unwrap_or(sub.open_valve_pressure_drop / (q_nom * q_nom));
                let alpha_max = attrs.valve_max.unwrap_or(alpha_min * sub.valve_range);
                ConsumerSizing { design_demand: qd, ua, alpha_min, alpha_max }
            })
            .collect();
        for (c, s) in consumers.iter().enumerate() {
            if !(s.alpha_min > 0.0 && s.alpha_max >= s.alpha_min && s.ua > 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "consumer `{}` has invalid substation parameters",
                    graph.edges[graph.consumers[c]].id
                )));
            }
        }

        let n_prod = graph.n_producers();
        let mut solar_ua = vec![0.0; n_prod];
        let mut reference_power = vec![0.0; n_prod];
        for k in 0..n_prod {
            let p = graph.producer(k);
            reference_power[k] = p.p_max;
            if p.technology == Technology::ST {
                let per_area = p.ua_per_area.unwrap_or_else(|| solar_params.default_ua_per_area());
                solar_ua[k] = per_area * p.a_max;
            }
        }

        let contexts = periods
            .periods
            .iter()
            .enumerate()
            .map(|(t, env)| {
                let requirements: Vec<ConsumerRequirement> = env
                    .demand
                    .iter()
                    .zip(&consumers)
                    .map(|(&qd, s)| {
                        let ratio = if s.design_demand > 0.0 { qd / s.design_demand } else { 0.0 };
                        radiator_requirements(ratio, qd, &sub)
                    })
                    .collect();
                let secondary_rate = requirements
                    .iter()
                    .map(|r| if r.demand > 0.0 { r.demand / (r.hot - r.cold) } else { 0.0 })
                    .collect();
                let solar = (0..n_prod)
                    .map(|k| {
                        let p = graph.producer(k);
                        if p.technology == Technology::ST {
                            solar_preprocess_with(&solar_params, env.g_irr, env.t_inf, 1.0, p.a_max)
                        } else {
                            SolarUnitState::inactive()
                        }
                    })
                    .collect();
                PeriodContext {
                    t_inf: env.t_inf,
                    g_irr: env.g_irr,
                    weight: env.weight,
                    is_peak: periods.is_peak(t),
                    demand: env.demand.clone(),
                    requirements,
                    secondary_rate,
                    solar,
                }
            })
            .collect();

        let (lower, upper) = Self::bounds(&graph, &scenario, &periods, &layout, &consumers);
        let reference_node = graph.edges[graph.producers[0]].from;
        let active_hours = scenario.economics.active_hours.unwrap_or(periods.active_hours);
        let discount_factor = discount_factor(scenario.economics.discount_rate, scenario.economics.horizon_years);
        Ok(Self {
            graph,
            scenario,
            periods,
            layout,
            state_layout,
            contexts,
            consumers,
            solar_ua,
            reference_power,
            reference_node,
            lower,
            upper,
            active_hours,
            discount_factor,
        })
    }

    fn bounds(
        graph: &NetworkGraph,
        scenario: &Scenario,
        periods: &PeriodSet,
        layout: &DesignLayout,
        consumers: &[ConsumerSizing],
    ) -> (Vec<f64>, Vec<f64>) {
        let n = layout.len();
        let (mut lo, mut hi) = (vec![0.0; n], vec![0.0; n]);
        let enabled: Vec<bool> =
            (0..graph.n_producers()).map(|k| scenario.menu.is_enabled(graph.producer(k).technology)).collect();
        for k in 0..graph.n_producers() {
            let id = &graph.edges[graph.producers[k]].id;
            let (a, b) = match scenario.menu.fixed_capacity.get(id) {
                Some(&v) => (v, v),
                None if enabled[k] => (0.0, 1.0),
                None => (0.0, 0.0),
            };
            lo[k] = a;
            hi[k] = b;
        }
        for t in 0..layout.n_periods {
            let env = &periods.periods[t];
            for (c, i) in layout.alpha_range(t).enumerate() {
                let s = consumers[c];
                lo[i] = if env.demand[c] > 0.0 { s.alpha_min } else { s.alpha_max };
                hi[i] = s.alpha_max;
            }
            for (k, i) in layout.gamma_range(t).enumerate() {
                lo[i] = 0.0;
                hi[i] = if enabled[k] { graph.producer(k).flow_max } else { 0.0 };
            }
            for (j, i) in layout.tau_range(t).enumerate() {
                let p = graph.producer(graph.temp_controlled[j]);
                lo[i] = p.supply_min;
                hi[i] = if enabled[graph.temp_controlled[j]] { p.supply_max } else { p.supply_min };
            }
        }
        (lo, hi)
    }

    pub fn n_periods(&self) -> usize {
        self.contexts.len()
    }

    /// Clamps a design into the bounds.
    pub fn clamp(&self, design: &mut DesignVector) {
        for (i, v) in design.values.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    /// Same problem with periods reordered.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        Self::new(self.graph.clone(), self.scenario.clone(), self.periods.permuted(order))
    }

    /// Same problem under a different scenario.
    pub fn with_scenario(&self, scenario: Scenario) -> Result<Self> {
        Self::new(self.graph.clone(), scenario, self.periods.clone())
    }

    /// Index of the temperature variable of a producer, if it has one.
    pub fn tau_index(&self, k: usize) -> Option<usize> {
        self.graph.temp_controlled.iter().position(|&x| x == k)
    }
}

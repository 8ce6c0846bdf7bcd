//! Discounted lifetime cost of a producer retrofit and reporting metrics.
//!
//! Prices and emission factors are stored per kWh; heat rates are in W and
//! annual energies follow from the active hours `K`:
//! `E [kWh yr^-1] = Q̇ [W] · K [h yr^-1] / 1000`.

use crate::design::DesignVector;
use crate::error::{Error, Result};
use crate::network::Technology;
use crate::problem::Problem;
use crate::producers::ProducerParameters;
use crate::solver::{PeriodModel, PeriodOutputs, Quantity};
use crate::state::StateSlice;
use serde::{Deserialize, Serialize};

const W_PER_KW: f64 = 1000.0;

/// Present value of one unit paid yearly over `years` at `rate`.
pub fn discount_factor(rate: f64, years: u32) -> f64 {
    (1..=years).map(|k| (1.0 + rate).powi(-(k as i32))).sum()
}

/// Investment cost (€) of a producer built at fraction `phi` of `size`
/// (W, or m² for solar thermal), and its derivative with respect to `phi`.
pub fn producer_capex_with_derivative(params: &ProducerParameters, tech: Technology, phi: f64, size: f64) -> (f64, f64) {
    let x = phi * size;
    let (c, dc) = params.specific_capex_with_derivative(tech, x);
    (x * c, size * c + x * dc * size)
}

/// Investment cost (€) of a producer.
pub fn producer_capex(tech: Technology, phi: f64, size: f64) -> Result<f64> {
    if !(phi >= 0.0) || !(size >= 0.0) {
        return Err(Error::NegativeCapacity(phi * size));
    }
    Ok(producer_capex_with_derivative(&ProducerParameters::default(), tech, phi, size).0)
}

/// Annual energy cost (€ yr^-1) of producing heat at rate `ρ c_p q Δθ`
/// with conversion efficiency `eta` and an energy price in € kWh^-1.
pub fn producer_opex(rho_cp: f64, q: f64, dtheta: f64, eta: f64, price: f64, hours: f64) -> f64 {
    rho_cp * q * dtheta / eta * hours / W_PER_KW * price
}

/// Annual electricity cost (€ yr^-1) of the solar collector loop pump.
pub fn solar_opex(dp_sec: f64, q_sec: f64, eta_pump: f64, price: f64, hours: f64) -> f64 {
    dp_sec * q_sec / eta_pump * hours / W_PER_KW * price
}

/// Annual CO₂ cost (€ yr^-1) of producing heat at `heat` W.
pub fn co2_cost(heat: f64, eta: f64, emission_factor: f64, co2_price: f64, hours: f64) -> f64 {
    heat / eta * hours / W_PER_KW * emission_factor * co2_price
}

/// Annual cost (€ yr^-1) of pumping `q` from `p_in` to `p_out` at an
/// electricity price in € kWh^-1.
pub fn pumping_cost(q: f64, p_in: f64, p_out: f64, price: f64, hours: f64, eta_pump: f64) -> Result<f64> {
    let lift = p_out - p_in;
    if lift < 0.0 {
        return Err(Error::NegativePumpLift(lift));
    }
    Ok(q * lift / eta_pump * hours / W_PER_KW * price)
}

/// Annual operating terms of one producer in one period (unweighted).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatingTerms {
    /// Heat added to the network (W).
    pub heat: f64,
    /// Energy cost (€ yr^-1).
    pub opex: f64,
    /// CO₂ cost of the energy carrier (€ yr^-1).
    pub co2_cost: f64,
    /// Distribution pump electricity cost (€ yr^-1).
    pub pump_opex: f64,
    /// CO₂ cost of the distribution pump (€ yr^-1).
    pub pump_co2: f64,
    /// Emissions (kg yr^-1), pump included.
    pub emissions: f64,
}

impl OperatingTerms {
    pub fn total(&self) -> f64 {
        self.opex + self.co2_cost + self.pump_opex + self.pump_co2
    }
}

/// Cost components of a design and its converged states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Investment cost per producer (€).
    pub capex: Vec<f64>,
    /// Operating terms indexed `[period][producer]`.
    pub operating: Vec<Vec<OperatingTerms>>,
    /// Heat delivered to consumers per period (W).
    pub delivered: Vec<f64>,
    pub weights: Vec<f64>,
    pub discount_factor: f64,
    pub active_hours: f64,
    /// Discounted total cost J (€).
    pub total: f64,
}

impl CostBreakdown {
    /// Weighted annual operating cost (€ yr^-1).
    pub fn annual_operating(&self) -> f64 {
        self.operating
            .iter()
            .zip(&self.weights)
            .map(|(ops, w)| w * ops.iter().map(OperatingTerms::total).sum::<f64>())
            .sum()
    }

    /// Recomputes the total from its parts.
    pub fn recompute_total(&self) -> f64 {
        self.capex.iter().sum::<f64>() + self.discount_factor * self.annual_operating()
    }

    /// Annual heat delivered to consumers (kWh yr^-1).
    pub fn annual_heat_kwh(&self) -> f64 {
        self.active_hours / W_PER_KW * self.delivered.iter().zip(&self.weights).map(|(q, w)| w * q).sum::<f64>()
    }

    /// Annual emissions (kg yr^-1).
    pub fn annual_emissions(&self) -> f64 {
        self.operating
            .iter()
            .zip(&self.weights)
            .map(|(ops, w)| w * ops.iter().map(|o| o.emissions).sum::<f64>())
            .sum()
    }

    /// Specific emissions per delivered kWh (kg kWh^-1).
    pub fn specific_emissions(&self) -> Result<f64> {
        let heat = self.annual_heat_kwh();
        if !(heat > 0.0) {
            return Err(Error::ZeroHeat);
        }
        Ok(self.annual_emissions() / heat)
    }

    /// Weighted share of the heat produced by each producer; negative heat
    /// counts as zero.
    pub fn heat_shares(&self) -> Vec<f64> {
        let n = self.capex.len();
        let mut per = vec![0.0; n];
        for (ops, w) in self.operating.iter().zip(&self.weights) {
            for (k, o) in ops.iter().enumerate() {
                per[k] += w * o.heat.max(0.0);
            }
        }
        let total: f64 = per.iter().sum();
        if total > 0.0 {
            per.iter().map(|v| v / total).collect()
        } else {
            per
        }
    }

    /// Heat shares within one period.
    pub fn period_heat_shares(&self, t: usize) -> Vec<f64> {
        let heats: Vec<f64> = self.operating[t].iter().map(|o| o.heat.max(0.0)).collect();
        let total: f64 = heats.iter().sum();
        if total > 0.0 {
            heats.iter().map(|v| v / total).collect()
        } else {
            heats
        }
    }
}

/// Levelized cost of heat (€ kWh^-1): discounted cost over discounted heat.
pub fn lcoh(breakdown: &CostBreakdown, annual_heat_kwh: f64) -> Result<f64> {
    if !(annual_heat_kwh > 0.0) {
        return Err(Error::ZeroHeat);
    }
    Ok(breakdown.total / (breakdown.discount_factor * annual_heat_kwh))
}

/// Per-producer annual operating cost coefficients of one period.
struct PeriodPrices {
    /// € per W of fuel/electricity input sustained over the year.
    energy: Vec<f64>,
    /// € per W of pump power.
    pump: f64,
}

fn period_prices(problem: &Problem) -> PeriodPrices {
    let eco = &problem.scenario.economics;
    let k = problem.active_hours / W_PER_KW;
    let energy = (0..problem.graph.n_producers())
        .map(|p| {
            let tech = problem.graph.producer(p).technology;
            k * (eco.energy_price(tech) + eco.emission_factor(tech) * eco.co2_price)
        })
        .collect();
    let eta_pump = problem.scenario.physics.pump_efficiency;
    PeriodPrices {
        energy,
        pump: k / eta_pump * (eco.electricity_price + eco.electricity_emission_factor * eco.co2_price),
    }
}

/// Operating terms of every producer in period `t`.
pub fn period_operating_terms(problem: &Problem, out: &PeriodOutputs) -> Vec<OperatingTerms> {
    let eco = &problem.scenario.economics;
    let hours = problem.active_hours;
    let eta_pump = problem.scenario.physics.pump_efficiency;
    let dp_sec = problem.scenario.parameters.solar.loop_pressure_drop_pa;
    (0..problem.graph.n_producers())
        .map(|k| {
            let tech = problem.graph.producer(k).technology;
            let heat = out.producer_heat[k].value;
            let pump_w = out.pump_power[k].value;
            let pump_kwh = pump_w / eta_pump * hours / W_PER_KW;
            let (opex, co2, kwh) = if tech == Technology::ST {
                let q_sec = out.solar_flow[k].value;
                let kwh = dp_sec * q_sec / eta_pump * hours / W_PER_KW;
                (
                    solar_opex(dp_sec, q_sec, eta_pump, eco.electricity_price, hours),
                    kwh * eco.electricity_emission_factor * eco.co2_price,
                    kwh,
                )
            } else {
                let eta = out.efficiency[k].value;
                (
                    heat / eta * hours / W_PER_KW * eco.energy_price(tech),
                    co2_cost(heat, eta, eco.emission_factor(tech), eco.co2_price, hours),
                    heat / eta * hours / W_PER_KW,
                )
            };
            let ef = eco.emission_factor(tech);
            OperatingTerms {
                heat,
                opex,
                co2_cost: co2,
                pump_opex: pump_kwh * eco.electricity_price,
                pump_co2: pump_kwh * eco.electricity_emission_factor * eco.co2_price,
                emissions: kwh * ef + pump_kwh * eco.electricity_emission_factor,
            }
        })
        .collect()
}

/// Annual operating cost of period `t` (€ yr^-1) with its gradient over `[x_t | d_t]`.
pub fn period_operating_cost(problem: &Problem, out: &PeriodOutputs) -> Quantity {
    let prices = period_prices(problem);
    let eta_pump = problem.scenario.physics.pump_efficiency;
    let dp_sec = problem.scenario.parameters.solar.loop_pressure_drop_pa;
    let mut total = Quantity::default();
    for k in 0..problem.graph.n_producers() {
        let tech = problem.graph.producer(k).technology;
        let pump = &out.pump_power[k];
        total.value += prices.pump * pump.value;
        total.grad.extend(pump.grad.iter().map(|&(i, v)| (i, prices.pump * v)));
        if tech == Technology::ST {
            // Collector loop pump: fixed pressure drop, electricity priced.
            let flow = &out.solar_flow[k];
            let c = dp_sec / eta_pump * prices.energy[k];
            total.value += c * flow.value;
            total.grad.extend(flow.grad.iter().map(|&(i, v)| (i, c * v)));
        } else {
            let (q, eta) = (&out.producer_heat[k], &out.efficiency[k]);
            let c = prices.energy[k];
            total.value += c * q.value / eta.value;
            total.grad.extend(q.grad.iter().map(|&(i, v)| (i, c * v / eta.value)));
            total.grad.extend(eta.grad.iter().map(|&(i, v)| (i, -c * q.value / (eta.value * eta.value) * v)));
        }
    }
    total
}

/// Discounted total cost J and its breakdown for converged states.
pub fn total_objective(problem: &Problem, design: &DesignVector, states: &[StateSlice]) -> Result<(f64, CostBreakdown)> {
    if states.len() != problem.n_periods() || design.layout != problem.layout {
        return Err(Error::ShapeMismatch("design or states do not match the problem".into()));
    }
    let params = &problem.scenario.parameters;
    let capex: Vec<f64> = (0..problem.graph.n_producers())
        .map(|k| {
            let p = problem.graph.producer(k);
            let size = if p.technology == Technology::ST { p.a_max } else { p.p_max };
            producer_capex_with_derivative(params, p.technology, design.phi()[k], size).0
        })
        .collect();
    let mut operating = Vec::with_capacity(problem.n_periods());
    let mut delivered = Vec::with_capacity(problem.n_periods());
    for (t, x) in states.iter().enumerate() {
        let d = design.local(t);
        let out = PeriodModel::new(problem, t).outputs(&d, &x.values);
        operating.push(period_operating_terms(problem, &out));
        delivered.push(out.consumer_heat.iter().map(|q| q.value).sum());
    }
    let mut b = CostBreakdown {
        capex,
        operating,
        delivered,
        weights: problem.contexts.iter().map(|c| c.weight).collect(),
        discount_factor: problem.discount_factor,
        active_hours: problem.active_hours,
        total: 0.0,
    };
    b.total = b.recompute_total();
    if !b.total.is_finite() {
        return Err(Error::NonFinite("objective".into()));
    }
    Ok((b.total, b))
}

//! Producer models: temperature-dependent efficiencies, specific investment
//! cost fits and the solar thermal unit with its counter-flow heat exchanger.

use crate::error::{Error, Result};
use crate::network::Technology;
use serde::{Deserialize, Serialize};

const BUNDLED_PARAMETERS: &str = include_str!("../params/producers.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicEfficiency {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Return temperature range over which the fit is trusted (°C).
    pub window_c: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCop {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Temperature lift range over which the fit is trusted (K).
    pub window_k: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEfficiency {
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapexFits {
    pub gb: ExpFit,
    pub hp: DoubleExpFit,
    pub st: CubicFit,
    pub eb: ExpFit,
}

/// Flat-plate collector and solar loop parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolarParameters {
    pub eta0: f64,
    /// Linear heat-loss coefficient (W m^-2 K^-1).
    pub a1: f64,
    /// Quadratic heat-loss coefficient (W m^-2 K^-2).
    pub a2: f64,
    /// Hot collector temperature fit in (G, T_air).
    pub hot: [f64; 6],
    /// Cold collector temperature fit in (G, T_air).
    pub cold: [f64; 6],
    pub fluid_density: f64,
    pub fluid_heat_capacity: f64,
    pub loop_pressure_drop_pa: f64,
    /// Below this irradiance the unit is switched off (W m^-2).
    pub min_irradiance: f64,
    /// Below this collector efficiency the unit is switched off.
    pub min_efficiency: f64,
    /// Approach temperature used to size the default heat exchanger (K).
    pub hx_approach_k: f64,
    pub hx_reference_irradiance: f64,
    pub hx_reference_air_c: f64,
}

impl Default for SolarParameters {
    fn default() -> Self {
        ProducerParameters::default().solar
    }
}

/// All producer fits; defaults are the bundled parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProducerParameters {
    pub gb_efficiency: CubicEfficiency,
    pub hp_efficiency: QuadraticCop,
    pub eb_efficiency: ConstantEfficiency,
    pub capex: CapexFits,
    pub solar: SolarParameters,
}

impl Default for ProducerParameters {
    fn default() -> Self {
        toml::from_str(BUNDLED_PARAMETERS).expect("bundled producer parameters parse")
    }
}

// ---------------------------------------------------------------------------
// Efficiencies
// ---------------------------------------------------------------------------

/// Gas boiler efficiency from the cubic return-temperature fit (no clamping).
pub fn eta_gb(t_return: f64) -> f64 {
    eta_gb_with(&ProducerParameters::default().gb_efficiency, t_return)
}

pub fn eta_gb_with(p: &CubicEfficiency, t: f64) -> f64 {
    ((p.a * t + p.b) * t + p.c) * t + p.d
}

/// Heat pump COP from the quadratic lift fit (no clamping).
pub fn eta_hp(t_supply: f64, t_air: f64) -> Result<f64> {
    eta_hp_with(&ProducerParameters::default().hp_efficiency, t_supply, t_air)
}

pub fn eta_hp_with(p: &QuadraticCop, t_supply: f64, t_air: f64) -> Result<f64> {
    let lift = t_supply - t_air;
    if !(lift > 0.0) {
        return Err(Error::NonPositiveLift(lift));
    }
    Ok((p.a * lift + p.b) * lift + p.c)
}

/// Electric boiler efficiency.
pub fn eta_eb() -> f64 {
    ProducerParameters::default().eb_efficiency.a
}

/// Efficiency evaluated inside the network model: value, derivative with
/// respect to the model temperature, and whether the input was clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyEval {
    pub value: f64,
    pub derivative: f64,
    pub clamped: bool,
}

impl ProducerParameters {
    /// Gas boiler efficiency at a return temperature, clamped to the fit window.
    pub fn gb_model(&self, t_return: f64) -> EfficiencyEval {
        let p = &self.gb_efficiency;
        let [lo, hi] = p.window_c;
        let t = t_return.clamp(lo, hi);
        let clamped = t != t_return;
        EfficiencyEval {
            value: eta_gb_with(p, t),
            derivative: if clamped { 0.0 } else { (3.0 * p.a * t + 2.0 * p.b) * t + p.c },
            clamped,
        }
    }

    /// Heat pump COP at a temperature lift, clamped to the fit window.
    pub fn hp_model(&self, lift: f64) -> EfficiencyEval {
        let p = &self.hp_efficiency;
        let [lo, hi] = p.window_k;
        let x = lift.clamp(lo, hi);
        let clamped = x != lift;
        EfficiencyEval {
            value: (p.a * x + p.b) * x + p.c,
            derivative: if clamped { 0.0 } else { 2.0 * p.a * x + p.b },
            clamped,
        }
    }

    /// Specific investment cost (€ W^-1, or € m^-2 for solar thermal) and its
    /// derivative with respect to the installed size.
    pub fn specific_capex_with_derivative(&self, tech: Technology, x: f64) -> (f64, f64) {
        let c = &self.capex;
        match tech {
            Technology::GB => {
                let v = c.gb.a * (c.gb.b * x).exp();
                (v, c.gb.b * v)
            }
            Technology::EB => {
                let v = c.eb.a * (c.eb.b * x).exp();
                (v, c.eb.b * v)
            }
            Technology::HP => {
                let e1 = c.hp.a * (c.hp.b * x).exp();
                let e2 = c.hp.c * (c.hp.d * x).exp();
                (e1 + e2, c.hp.b * e1 + c.hp.d * e2)
            }
            Technology::ST => {
                let f = &c.st;
                (((f.a * x + f.b) * x + f.c) * x + f.d, (3.0 * f.a * x + 2.0 * f.b) * x + f.c)
            }
        }
    }
}

/// Specific investment cost of a producer at an installed size.
pub fn specific_capex(tech: Technology, installed: f64) -> Result<f64> {
    specific_capex_with(&ProducerParameters::default(), tech, installed)
}

pub fn specific_capex_with(params: &ProducerParameters, tech: Technology, installed: f64) -> Result<f64> {
    if !(installed >= 0.0) {
        return Err(Error::NegativeCapacity(installed));
    }
    Ok(params.specific_capex_with_derivative(tech, installed).0)
}

// ---------------------------------------------------------------------------
// Counter-flow heat exchanger
// ---------------------------------------------------------------------------

/// Duty of a counter-flow exchanger per kelvin of inlet temperature difference,
/// `Q = duty * (T_hot,in - T_cold,in)`, together with its partial derivatives
/// with respect to both capacity rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterflowDuty {
    /// `ε C_min` (W K^-1).
    pub duty: f64,
    pub d_c1: f64,
    pub d_c2: f64,
}

/// Effectiveness-NTU duty of a counter-flow exchanger with capacity rates
/// `c1`, `c2` (W K^-1) and conductance `ua` (W K^-1).
///
/// The duty is symmetric in the two streams and smooth through `c1 == c2`.
pub fn counterflow_duty(c1: f64, c2: f64, ua: f64) -> CounterflowDuty {
    if !(ua > 0.0) {
        return CounterflowDuty { duty: 0.0, d_c1: 0.0, d_c2: 0.0 };
    }
    if !(c1 > 0.0) || !(c2 > 0.0) {
        // A vanishing stream leaves at the other stream's inlet temperature.
        return CounterflowDuty {
            duty: 0.0,
            d_c1: if c1 > 0.0 { 0.0 } else if c2 > 0.0 { 1.0 } else { 0.0 },
            d_c2: if c2 > 0.0 { 0.0 } else if c1 > 0.0 { 1.0 } else { 0.0 },
        };
    }
    let swapped = c1 > c2;
    let (cmin, cmax) = if swapped { (c2, c1) } else { (c1, c2) };
    let a = 1.0 / cmin;
    let b = 1.0 / cmax;
    let d = a - b;
    let u = ua;
    let x = u * d;
    let (g, dg) = if x < 1e-3 {
        (
            u * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0),
            u * u * (-0.5 + x / 3.0 - x * x / 8.0 + x * x * x / 30.0),
        )
    } else {
        let n = -(-x).exp_m1();
        let e = (-x).exp();
        (n / d, (x * e - n) / (d * d))
    };
    let den = 1.0 + b * g;
    let duty = g / den;
    let df_da = dg / (den * den);
    let df_db = (-dg - g * g) / (den * den);
    let d_cmin = -df_da * a * a;
    let d_cmax = -df_db * b * b;
    let (d_c1, d_c2) = if swapped { (d_cmax, d_cmin) } else { (d_cmin, d_cmax) };
    CounterflowDuty { duty, d_c1, d_c2 }
}

// ---------------------------------------------------------------------------
// Solar thermal unit
// ---------------------------------------------------------------------------

/// Pre-processed operating point of a solar thermal unit in one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolarUnitState {
    pub active: bool,
    /// Collector efficiency (-).
    pub efficiency: f64,
    /// Hot and cold secondary loop temperatures (°C).
    pub t_hot: f64,
    pub t_cold: f64,
    /// Mean collector temperature (°C).
    pub t_mean: f64,
    /// Secondary loop flow (m^3 s^-1).
    pub flow: f64,
    /// Available solar heat (W).
    pub heat: f64,
}

impl SolarUnitState {
    pub fn inactive() -> Self {
        Self { active: false, efficiency: 0.0, t_hot: 0.0, t_cold: 0.0, t_mean: 0.0, flow: 0.0, heat: 0.0 }
    }

    /// Capacity rate of the secondary loop (W K^-1).
    pub fn capacity_rate(&self, p: &SolarParameters) -> f64 {
        self.flow * p.fluid_density * p.fluid_heat_capacity
    }
}

fn quadratic_fit(c: &[f64; 6], g: f64, t: f64) -> f64 {
    c[0] + c[1] * g + c[2] * t + c[3] * g * g + c[4] * g * t + c[5] * t * t
}

impl SolarParameters {
    pub fn collector_temperatures(&self, g_irr: f64, t_air: f64) -> (f64, f64) {
        (quadratic_fit(&self.hot, g_irr, t_air), quadratic_fit(&self.cold, g_irr, t_air))
    }

    /// Steady-state collector efficiency at reduced temperature `t_m_star`.
    pub fn collector_efficiency(&self, t_m_star: f64, g_irr: f64) -> f64 {
        self.eta0 - self.a1 * t_m_star - self.a2 * g_irr * t_m_star * t_m_star
    }

    /// Default exchanger conductance per m^2 of collector, sized for the
    /// configured approach temperature at the reference conditions.
    pub fn default_ua_per_area(&self) -> f64 {
        let unit = solar_preprocess_with(self, self.hx_reference_irradiance, self.hx_reference_air_c, 1.0, 1.0);
        // Balanced counter-flow exchanger: LMTD equals the approach temperature.
        unit.heat / self.hx_approach_k
    }
}

/// Solar unit operating point for a period.
pub fn solar_preprocess(g_irr: f64, t_air: f64, phi: f64, a_max: f64) -> SolarUnitState {
    solar_preprocess_with(&SolarParameters::default(), g_irr, t_air, phi, a_max)
}

pub fn solar_preprocess_with(p: &SolarParameters, g_irr: f64, t_air: f64, phi: f64, a_max: f64) -> SolarUnitState {
    if !(g_irr >= p.min_irradiance) {
        return SolarUnitState::inactive();
    }
    let (t_hot, t_cold) = p.collector_temperatures(g_irr, t_air);
    let t_mean = 0.5 * (t_hot + t_cold);
    let t_star = (t_mean - t_air) / g_irr;
    let efficiency = p.collector_efficiency(t_star, g_irr);
    if !(efficiency >= p.min_efficiency) || !(t_hot > t_cold) {
        return SolarUnitState::inactive();
    }
    let heat = g_irr * efficiency * phi * a_max;
    let flow = heat / (p.fluid_density * p.fluid_heat_capacity * (t_hot - t_cold));
    SolarUnitState { active: true, efficiency, t_hot, t_cold, t_mean, flow, heat }
}

/// Heat transferred from the solar loop to the network through the
/// counter-flow exchanger (W).
pub fn solar_hx_heat(
    state: &SolarUnitState,
    params: &SolarParameters,
    t_return_network: f64,
    network_capacity_rate: f64,
    ua: f64,
) -> Result<f64> {
    if !state.active {
        return Err(Error::InactiveUnit);
    }
    let duty = counterflow_duty(network_capacity_rate, state.capacity_rate(params), ua);
    Ok(duty.duty * (state.t_hot - t_return_network))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gb_efficiency_fit() {
        assert_eq!(eta_gb(0.0), 0.9755);
        // Oracle: direct evaluation of the cubic with the table coefficients.
        let oracle = |t: f64| -7.2225e-07 * t.powi(3) + 5.5968e-06 * t.powi(2) + 0.0005 * t + 0.9755;
        assert_relative_eq!(eta_gb(30.0), oracle(30.0), max_relative = 1e-14);
        assert!((eta_gb(30.0) - 0.9760).abs() < 1e-4);
        assert!(eta_gb(60.0) < eta_gb(30.0));
    }

    #[test]
    fn hp_cop_fit() {
        assert_relative_eq!(eta_hp(50.0, 10.0).unwrap(), 3.28, max_relative = 1e-12);
        assert_relative_eq!(eta_hp(30.0, 10.0).unwrap(), 4.48, max_relative = 1e-12);
        assert!(matches!(eta_hp(10.0, 10.0), Err(Error::NonPositiveLift(_))));
    }

    #[test]
    fn hp_cop_decreasing_in_window() {
        let mut prev = f64::INFINITY;
        for i in 1..=750 {
            let lift = i as f64 * 0.1;
            let cop = eta_hp(lift, 0.0).unwrap();
            assert!(cop < prev);
            prev = cop;
        }
    }

    #[test]
    fn eb_constant() {
        assert_eq!(eta_eb(), 0.98);
        assert_eq!(eta_eb(), eta_eb());
    }

    #[test]
    fn capex_at_zero_size() {
        assert_relative_eq!(specific_capex(Technology::GB, 0.0).unwrap(), 0.1085);
        assert_relative_eq!(specific_capex(Technology::HP, 0.0).unwrap(), 1.1117, max_relative = 1e-12);
        assert_relative_eq!(specific_capex(Technology::ST, 0.0).unwrap(), 252.09);
        assert!(matches!(specific_capex(Technology::GB, -1.0), Err(Error::NegativeCapacity(_))));
    }

    #[test]
    fn capex_non_increasing() {
        for tech in [Technology::GB, Technology::HP, Technology::EB] {
            let mut prev = f64::INFINITY;
            for i in 0..=100 {
                let v = specific_capex(tech, i as f64 * 0.5e6).unwrap();
                assert!(v <= prev && v > 0.0);
                prev = v;
            }
        }
    }

    #[test]
    fn clamped_model_evaluation() {
        let p = ProducerParameters::default();
        let e = p.gb_model(10.0);
        assert!(e.clamped);
        assert_eq!(e.value, eta_gb(20.0));
        assert_eq!(e.derivative, 0.0);
        let e = p.gb_model(45.0);
        assert!(!e.clamped);
        let h = 1e-5;
        assert_relative_eq!(e.derivative, (eta_gb(45.0 + h) - eta_gb(45.0 - h)) / (2.0 * h), max_relative = 1e-6);
        let e = p.hp_model(80.0);
        assert!(e.clamped);
    }

    #[test]
    fn counterflow_balanced_ntu_one() {
        let c = 1000.0;
        let d = counterflow_duty(c, c, c);
        assert_relative_eq!(d.duty, 0.5 * c, max_relative = 1e-12);
    }

    #[test]
    fn counterflow_matches_closed_form() {
        // ε = (1 - exp(-N(1-C*))) / (1 - C* exp(-N(1-C*)))
        let (c1, c2, ua): (f64, f64, f64) = (800.0, 2000.0, 1500.0);
        let cr = c1 / c2;
        let n = ua / c1;
        let eps = (1.0 - (-n * (1.0 - cr)).exp()) / (1.0 - cr * (-n * (1.0 - cr)).exp());
        assert_relative_eq!(counterflow_duty(c1, c2, ua).duty, eps * c1, max_relative = 1e-12);
        assert_relative_eq!(counterflow_duty(c2, c1, ua).duty, eps * c1, max_relative = 1e-12);
    }

    #[test]
    fn counterflow_ideal_limit() {
        let d = counterflow_duty(500.0, 3000.0, 1e9);
        assert_relative_eq!(d.duty, 500.0, max_relative = 1e-9);
    }

    #[test]
    fn counterflow_derivatives() {
        for &(c1, c2, ua) in &[(800.0, 2000.0, 1500.0), (1000.0, 1000.0000001, 700.0), (3000.0, 10.0, 50.0), (5.0, 5e6, 1e4)] {
            let d = counterflow_duty(c1, c2, ua);
            let h1 = c1 * 1e-6;
            let h2 = c2 * 1e-6;
            let fd1 = (counterflow_duty(c1 + h1, c2, ua).duty - counterflow_duty(c1 - h1, c2, ua).duty) / (2.0 * h1);
            let fd2 = (counterflow_duty(c1, c2 + h2, ua).duty - counterflow_duty(c1, c2 - h2, ua).duty) / (2.0 * h2);
            assert_relative_eq!(d.d_c1, fd1, max_relative = 1e-6, epsilon = 1e-12);
            assert_relative_eq!(d.d_c2, fd2, max_relative = 1e-6, epsilon = 1e-12);
        }
    }

    #[test]
    fn solar_inactive_without_sun() {
        let s = solar_preprocess(0.0, 5.0, 1.0, 10_000.0);
        assert!(!s.active);
        assert_eq!(s.heat, 0.0);
        assert_eq!(s.flow, 0.0);
    }

    #[test]
    fn solar_efficiency_at_zero_reduced_temperature() {
        let p = SolarParameters::default();
        assert_eq!(p.collector_efficiency(0.0, 800.0), 0.75);
    }

    #[test]
    fn solar_mean_temperature_low_irradiance() {
        let s = solar_preprocess(167.5, 5.0, 1.0, 10_000.0);
        assert!((s.t_mean - 31.0).abs() <= 1.0, "T_m = {}", s.t_mean);
    }

    #[test]
    fn solar_energy_bookkeeping() {
        let p = SolarParameters::default();
        let s = solar_preprocess(600.0, 15.0, 0.4, 10_000.0);
        assert!(s.active);
        let balance = s.flow * p.fluid_density * p.fluid_heat_capacity * (s.t_hot - s.t_cold);
        assert_relative_eq!(balance, s.heat, max_relative = 1e-14);
    }

    #[test]
    fn solar_hx_limits() {
        let p = SolarParameters::default();
        let s = solar_preprocess(600.0, 15.0, 1.0, 10_000.0);
        assert_eq!(solar_hx_heat(&s, &p, s.t_hot, 1e5, 1e6).unwrap(), 0.0);
        // Ideal exchanger with the network as the weak stream.
        let c_net = 0.1 * s.capacity_rate(&p);
        let q = solar_hx_heat(&s, &p, 30.0, c_net, 1e12).unwrap();
        assert_relative_eq!(q, c_net * (s.t_hot - 30.0), max_relative = 1e-9);
        // Balanced, NTU = 1.
        let c = s.capacity_rate(&p);
        let q = solar_hx_heat(&s, &p, 30.0, c, c).unwrap();
        assert_relative_eq!(q, 0.5 * c * (s.t_hot - 30.0), max_relative = 1e-9);
        assert!(matches!(
            solar_hx_heat(&SolarUnitState::inactive(), &p, 30.0, c, c),
            Err(Error::InactiveUnit)
        ));
    }

    #[test]
    fn default_hx_conductance_is_positive() {
        let ua = SolarParameters::default().default_ua_per_area();
        assert!(ua > 10.0 && ua < 500.0, "{ua}");
    }
}

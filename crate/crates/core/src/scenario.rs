//! Scenario configuration: physical constants, prices, emission factors and
//! the producer menu.

use crate::error::{Error, Result};
use crate::network::Technology;
use crate::producers::ProducerParameters;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Water and pump properties (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Physics {
    /// Water density (kg m^-3).
    pub density: f64,
    /// Water specific heat capacity (J kg^-1 K^-1).
    pub heat_capacity: f64,
    /// Dynamic viscosity used for the Reynolds number (Pa s).
    pub viscosity: f64,
    /// Distribution pump efficiency (-).
    pub pump_efficiency: f64,
    /// Pressure imposed at the inlet node of the first producer (Pa).
    pub static_pressure: f64,
    /// Flow floor used by the thermal closures (m^3 s^-1).
    pub flow_floor: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            density: 983.0,
            heat_capacity: 4185.0,
            viscosity: 4.7e-4,
            pump_efficiency: 0.81,
            static_pressure: 3.0e5,
            flow_floor: 1e-9,
        }
    }
}

impl Physics {
    pub fn rho_cp(&self) -> f64 {
        self.density * self.heat_capacity
    }
}

/// Cost and emission inputs, stored in the units of the published tables
/// (€ kWh^-1, kg kWh^-1, € kg^-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Economics {
    pub gas_price: f64,
    pub electricity_price: f64,
    pub gas_emission_factor: f64,
    pub electricity_emission_factor: f64,
    pub co2_price: f64,
    pub discount_rate: f64,
    pub horizon_years: u32,
    /// Overrides the active hours derived from the period set (h yr^-1).
    pub active_hours: Option<f64>,
    /// Maximal pressure rise over a producer (Pa).
    pub max_pressure_rise: f64,
}

impl Default for Economics {
    fn default() -> Self {
        Self {
            gas_price: 0.0319,
            electricity_price: 0.1,
            gas_emission_factor: 0.181,
            electricity_emission_factor: 0.181,
            co2_price: 0.0,
            discount_rate: 0.05,
            horizon_years: 30,
            active_hours: None,
            max_pressure_rise: 10.0e5,
        }
    }
}

impl Economics {
    pub fn energy_price(&self, tech: Technology) -> f64 {
        if tech.uses_electricity() {
            self.electricity_price
        } else {
            self.gas_price
        }
    }

    pub fn emission_factor(&self, tech: Technology) -> f64 {
        if tech.uses_electricity() {
            self.electricity_emission_factor
        } else {
            self.gas_emission_factor
        }
    }
}

/// Consumer substation and heating-system defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubstationDefaults {
    /// Secondary hot temperature at peak demand (°C).
    pub peak_hot: f64,
    /// Secondary cold temperature at peak demand (°C).
    pub peak_cold: f64,
    /// Radiator exponent of the characteristic radiator equation.
    pub radiator_exponent: f64,
    /// Room temperature (°C).
    pub room_temperature: f64,
    /// Primary inlet/outlet temperatures used to size the default substation UA (°C).
    pub design_primary_in: f64,
    pub design_primary_out: f64,
    /// Substation pressure drop with the valve fully open at nominal flow (Pa).
    pub open_valve_pressure_drop: f64,
    /// Nominal primary temperature spread for valve sizing (K).
    pub nominal_spread: f64,
    /// Ratio between the closed and open valve loss coefficients.
    pub valve_range: f64,
}

impl Default for SubstationDefaults {
    fn default() -> Self {
        Self {
            peak_hot: 55.0,
            peak_cold: 40.0,
            radiator_exponent: 1.3,
            room_temperature: 20.0,
            design_primary_in: 65.0,
            design_primary_out: 45.0,
            open_valve_pressure_drop: 0.3e5,
            nominal_spread: 20.0,
            valve_range: 1e6,
        }
    }
}

/// Which producers may be built, and which capacities are pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProducerMenu {
    pub enabled: Vec<Technology>,
    /// Capacity fraction pinned per producer id.
    pub fixed_capacity: BTreeMap<String, f64>,
}

impl Default for ProducerMenu {
    fn default() -> Self {
        Self { enabled: Technology::ALL.to_vec(), fixed_capacity: BTreeMap::new() }
    }
}

impl ProducerMenu {
    pub fn is_enabled(&self, tech: Technology) -> bool {
        self.enabled.contains(&tech)
    }
}

/// Complete scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub schema: String,
    pub physics: Physics,
    pub economics: Economics,
    pub substation: SubstationDefaults,
    pub menu: ProducerMenu,
    pub parameters: ProducerParameters,
}

pub const SCENARIO_SCHEMA: &str = "dhn-scenario/1";

impl Default for Scenario {
    fn default() -> Self {
        Self {
            schema: SCENARIO_SCHEMA.into(),
            physics: Physics::default(),
            economics: Economics::default(),
            substation: SubstationDefaults::default(),
            menu: ProducerMenu::default(),
            parameters: ProducerParameters::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let e = &self.economics;
        let nonneg = [
            ("gas_price", e.gas_price),
            ("electricity_price", e.electricity_price),
            ("gas_emission_factor", e.gas_emission_factor),
            ("electricity_emission_factor", e.electricity_emission_factor),
            ("co2_price", e.co2_price),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(Error::InvalidScenario(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(e.discount_rate > 0.0 && e.discount_rate < 1.0) {
            return Err(Error::InvalidScenario(format!("discount_rate must be in (0,1), got {}", e.discount_rate)));
        }
        if e.horizon_years < 1 {
            return Err(Error::InvalidScenario("horizon_years must be at least 1".into()));
        }
        if let Some(k) = e.active_hours {
            if !(k > 0.0 && k <= 8760.0) {
                return Err(Error::InvalidScenario(format!("active_hours must be in (0, 8760], got {k}")));
            }
        }
        if !(e.max_pressure_rise > 0.0) {
            return Err(Error::InvalidScenario("max_pressure_rise must be positive".into()));
        }
        for (id, &phi) in &self.menu.fixed_capacity {
            if !(0.0..=1.0).contains(&phi) {
                return Err(Error::InvalidScenario(format!("fixed capacity of `{id}` must be in [0,1], got {phi}")));
            }
        }
        let p = &self.physics;
        if !(p.density > 0.0 && p.heat_capacity > 0.0 && p.viscosity > 0.0 && p.pump_efficiency > 0.0) {
            return Err(Error::InvalidScenario("physical constants must be positive".into()));
        }
        Ok(())
    }
}

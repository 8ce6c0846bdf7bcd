//! Representative periods: environment, demand and annual weight.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Operating conditions of one representative period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodEnvironment {
    /// Outdoor air temperature (°C).
    pub t_inf: f64,
    /// Global irradiance on the collector plane (W m^-2).
    pub g_irr: f64,
    /// Heat demand per consumer in consumer order (W).
    pub demand: Vec<f64>,
    /// Fraction of the active hours represented by this period.
    pub weight: f64,
}

/// Ordered set of periods, optionally with a zero-weight peak period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSet {
    pub periods: Vec<PeriodEnvironment>,
    /// Index of the synthetic peak period.
    pub peak: Option<usize>,
    /// Active hours per year (h).
    pub active_hours: f64,
    /// Fraction of the year excluded as demand-free.
    pub excluded_fraction: f64,
}

impl PeriodSet {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn is_peak(&self, t: usize) -> bool {
        self.peak == Some(t)
    }

    /// Checks weights and demand vector lengths.
    pub fn validate(&self, n_consumers: usize) -> Result<()> {
        if self.periods.is_empty() {
            return Err(Error::ShapeMismatch("period set is empty".into()));
        }
        if let Some(p) = self.peak {
            if p >= self.periods.len() {
                return Err(Error::ShapeMismatch(format!("peak index {p} out of range")));
            }
            if self.periods[p].weight != 0.0 {
                return Err(Error::InvalidScenario("peak period must have zero weight".into()));
            }
        }
        let mut sum = 0.0;
        for (t, env) in self.periods.iter().enumerate() {
            if env.demand.len() != n_consumers {
                return Err(Error::ShapeMismatch(format!(
                    "period {t}: {} demands for {n_consumers} consumers",
                    env.demand.len()
                )));
            }
            if env.demand.iter().any(|d| !(*d >= 0.0)) || !env.t_inf.is_finite() || !(env.g_irr >= 0.0) {
                return Err(Error::NonFinite(format!("period {t} has invalid drivers")));
            }
            if !(env.weight >= 0.0) {
                return Err(Error::InvalidScenario(format!("period {t} has a negative weight")));
            }
            sum += env.weight;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidScenario(format!("period weights sum to {sum}, expected 1")));
        }
        if !(self.active_hours > 0.0 && self.active_hours <= 8760.0) {
            return Err(Error::InvalidScenario(format!("active hours {} outside (0, 8760]", self.active_hours)));
        }
        Ok(())
    }

    /// Per-consumer design (maximum) demand over all periods.
    pub fn design_demand(&self) -> Vec<f64> {
        let n = self.periods.first().map_or(0, |p| p.demand.len());
        (0..n)
            .map(|c| self.periods.iter().map(|p| p.demand[c]).fold(0.0, f64::max))
            .collect()
    }

    /// Same set with periods reordered; the peak index follows its period.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            periods: order.iter().map(|&t| self.periods[t].clone()).collect(),
            peak: self.peak.and_then(|p| order.iter().position(|&t| t == p)),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(w: f64) -> PeriodEnvironment {
        PeriodEnvironment { t_inf: 5.0, g_irr: 100.0, demand: vec![1e5, 2e5], weight: w }
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut s = PeriodSet { periods: vec![env(0.5), env(0.5), env(0.0)], peak: Some(2), active_hours: 8208.0, excluded_fraction: 0.063 };
        s.validate(2).unwrap();
        s.periods[0].weight = 0.4;
        assert!(s.validate(2).is_err());
    }

    #[test]
    fn permutation_tracks_peak() {
        let s = PeriodSet { periods: vec![env(1.0), env(0.0)], peak: Some(1), active_hours: 8760.0, excluded_fraction: 0.0 };
        assert_eq!(s.permuted(&[1, 0]).peak, Some(0));
    }
}

//! Map between physical design values and the optimizer's scaled variables.
//!
//! Capacity fractions are used as is, inflows are divided by a reference flow
//! of their period (the flow carrying the period's total demand at a nominal
//! spread), supply temperatures are mapped affinely from their bounds and
//! valve coefficients are log-scaled between the consumer's open and closed
//! settings. Scaled variables are thus all of order one.

use crate::design::{DesignVector, VarClass};
use crate::problem::Problem;

/// Temperature spread defining the reference flow of a period (K).
const REFERENCE_SPREAD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    /// `x = offset + scale z`
    Affine { offset: f64, scale: f64 },
    /// `x = base exp(log_ratio z)`
    Log { base: f64, log_ratio: f64 },
}

/// Per-entry variable scaling of a problem's design vector.
#[derive(Debug, Clone)]
pub struct Scaling {
    maps: Vec<Map>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Scaling {
    pub fn new(problem: &Problem) -> Self {
        let l = &problem.layout;
        let g = &problem.graph;
        let peak_total = problem.contexts.iter().map(|c| c.demand.iter().sum::<f64>()).fold(0.0, f64::max);
        let reference_flow: Vec<f64> = problem
            .contexts
            .iter()
            .map(|c| {
                let total = c.demand.iter().sum::<f64>().max(1e-2 * peak_total);
                (total / (problem.scenario.physics.rho_cp() * REFERENCE_SPREAD)).max(1e-6)
            })
            .collect();
        let maps: Vec<Map> = (0..l.len())
            .map(|i| {
                let local = match l.period_of(i) {
                    None => i,
                    Some(t) => i - l.alpha_range(t).start + l.n_producers,
                };
                match l.class_of(i) {
                    VarClass::Phi => Map::Affine { offset: 0.0, scale: 1.0 },
                    VarClass::Alpha => {
                        let s = problem.consumers[local - l.n_producers];
                        Map::Log { base: s.alpha_min, log_ratio: (s.alpha_max / s.alpha_min).ln().max(1e-12) }
                    }
                    VarClass::Gamma => {
                        let t = l.period_of(i).unwrap_or(0);
                        Map::Affine { offset: 0.0, scale: reference_flow[t] }
                    }
                    VarClass::Tau => {
                        let j = local - 2 * l.n_producers - l.n_consumers;
                        let p = g.producer(g.temp_controlled[j]);
                        let span = p.supply_max - p.supply_min;
                        Map::Affine { offset: p.supply_min, scale: if span > 0.0 { span } else { 1.0 } }
                    }
                }
            })
            .collect();
        let mut s = Self { maps, lower: Vec::new(), upper: Vec::new() };
        s.lower = problem.lower.iter().enumerate().map(|(i, &v)| s.to_scaled_entry(i, v)).collect();
        s.upper = problem.upper.iter().enumerate().map(|(i, &v)| s.to_scaled_entry(i, v)).collect();
        for i in 0..s.lower.len() {
            if s.upper[i] < s.lower[i] {
                s.upper[i] = s.lower[i];
            }
        }
        s
    }

    fn to_scaled_entry(&self, i: usize, x: f64) -> f64 {
        match self.maps[i] {
            Map::Affine { offset, scale } => (x - offset) / scale,
            Map::Log { base, log_ratio } => (x / base).ln() / log_ratio,
        }
    }

    pub fn to_physical_entry(&self, i: usize, z: f64) -> f64 {
        match self.maps[i] {
            Map::Affine { offset, scale } => offset + scale * z,
            Map::Log { base, log_ratio } => base * (log_ratio * z).exp(),
        }
    }

    /// d x_i / d z_i.
    pub fn derivative(&self, i: usize, z: f64) -> f64 {
        match self.maps[i] {
            Map::Affine { scale, .. } => scale,
            Map::Log { base, log_ratio } => base * log_ratio * (log_ratio * z).exp(),
        }
    }

    pub fn to_scaled(&self, design: &DesignVector) -> Vec<f64> {
        design.values.iter().enumerate().map(|(i, &x)| self.to_scaled_entry(i, x)).collect()
    }

    /// Physical design for scaled variables; pinned entries take their bound
    /// exactly so round-off never leaves the box.
    pub fn to_physical(&self, problem: &Problem, z: &[f64]) -> DesignVector {
        let values = z
            .iter()
            .enumerate()
            .map(|(i, &zi)| {
                if problem.lower[i] == problem.upper[i] {
                    problem.lower[i]
                } else {
                    self.to_physical_entry(i, zi).clamp(problem.lower[i], problem.upper[i])
                }
            })
            .collect();
        DesignVector { layout: problem.layout, values }
    }

    /// Chain rule from a physical gradient to the scaled variables.
    pub fn scale_gradient(&self, z: &[f64], grad_physical: &[f64]) -> Vec<f64> {
        grad_physical.iter().enumerate().map(|(i, g)| g * self.derivative(i, z[i])).collect()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

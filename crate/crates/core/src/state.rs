//! Per-period state layout: `[q (edges) | p (nodes) | θ_node (nodes) | θ_exit (edges)]`.
//!
//! Temperatures are stored above the period's ambient temperature.

use crate::error::{Error, Result};
use crate::network::NetworkGraph;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLayout {
    pub n_nodes: usize,
    pub n_edges: usize,
}

impl StateLayout {
    pub fn for_graph(graph: &NetworkGraph) -> Self {
        Self { n_nodes: graph.n_nodes(), n_edges: graph.n_edges() }
    }

    pub fn len(&self) -> usize {
        2 * (self.n_nodes + self.n_edges)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn q(&self, e: usize) -> usize {
        e
    }
    pub fn p(&self, n: usize) -> usize {
        self.n_edges + n
    }
    pub fn theta_node(&self, n: usize) -> usize {
        self.n_edges + self.n_nodes + n
    }
    pub fn theta_exit(&self, e: usize) -> usize {
        self.n_edges + 2 * self.n_nodes + e
    }
}

/// One period's state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSlice {
    pub layout: StateLayout,
    pub values: Vec<f64>,
}

impl StateSlice {
    pub fn zeros(layout: StateLayout) -> Self {
        Self { layout, values: vec![0.0; layout.len()] }
    }

    pub fn from_values(layout: StateLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::ShapeMismatch(format!("state: expected {}, got {}", layout.len(), values.len())));
        }
        Ok(Self { layout, values })
    }

    pub fn q(&self, e: usize) -> f64 {
        self.values[self.layout.q(e)]
    }
    pub fn p(&self, n: usize) -> f64 {
        self.values[self.layout.p(n)]
    }
    pub fn theta_node(&self, n: usize) -> f64 {
        self.values[self.layout.theta_node(n)]
    }
    pub fn theta_exit(&self, e: usize) -> f64 {
        self.values[self.layout.theta_exit(e)]
    }

    pub fn flows(&self) -> &[f64] {
        &self.values[..self.layout.n_edges]
    }
}

/// States of all periods, in period order.
pub type StateVector = Vec<StateSlice>;

//! Network graph data model.
//!
//! A district heating network is stored as a directed graph whose feed and
//! return sub-networks are explicit mirrored halves. Consumer edges bridge a
//! feed-side node to a return-side node; producer edges bridge the return side
//! back to the feed side; pipes stay on one side.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Producer,
    Consumer,
    Junction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Feed,
    Return,
}

/// Heat production technology of a producer edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Technology {
    /// Condensing natural gas boiler.
    GB,
    /// Air-source heat pump.
    HP,
    /// Flat-plate solar thermal field behind a heat exchanger.
    ST,
    /// Electric boiler.
    EB,
}

impl Technology {
    pub const ALL: [Technology; 4] = [Technology::GB, Technology::HP, Technology::ST, Technology::EB];

    /// Whether the supply temperature of this technology is a design variable.
    pub fn is_temperature_controlled(self) -> bool {
        !matches!(self, Technology::ST)
    }

    pub fn uses_electricity(self) -> bool {
        !matches!(self, Technology::GB)
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Technology::GB => "GB",
            Technology::HP => "HP",
            Technology::ST => "ST",
            Technology::EB => "EB",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Technology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "GB" => Ok(Technology::GB),
            "HP" => Ok(Technology::HP),
            "ST" => Ok(Technology::ST),
            "EB" => Ok(Technology::EB),
            other => Err(Error::InvalidNetwork(format!("unknown technology `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipeAttrs {
    /// Length (m).
    pub length: f64,
    /// Inner diameter (m).
    pub diameter: f64,
    /// Absolute wall roughness (m).
    pub roughness: f64,
    /// Overall heat-loss coefficient per metre (W m^-1 K^-1).
    pub u_loss: f64,
}

impl PipeAttrs {
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.diameter * self.diameter / 4.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProducerAttrs {
    pub technology: Technology,
    /// Maximal thermal capacity (W). For solar thermal this is the reference
    /// power used to normalize the heat-integration constraint.
    pub p_max: f64,
    /// Maximal collector area (m^2), solar thermal only.
    pub a_max: f64,
    /// Supply temperature bounds (°C), temperature-controlled producers only.
    pub supply_min: f64,
    pub supply_max: f64,
    /// Upper bound of the producer inflow (m^3 s^-1).
    pub flow_max: f64,
    /// Heat exchanger conductance per m^2 of collector (W m^-2 K^-1), solar thermal only.
    pub ua_per_area: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConsumerAttrs {
    /// Substation heat exchanger conductance (W K^-1); derived from the peak
    /// demand when absent.
    pub ua: Option<f64>,
    /// Valve loss coefficient bounds (Pa s^2 m^-6); derived when absent.
    pub valve_min: Option<f64>,
    pub valve_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeKind {
    Pipe(PipeAttrs),
    Consumer(ConsumerAttrs),
    Producer(ProducerAttrs),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn pipe(&self) -> Option<&PipeAttrs> {
        match &self.kind {
            EdgeKind::Pipe(p) => Some(p),
            _ => None,
        }
    }

    pub fn producer(&self) -> Option<&ProducerAttrs> {
        match &self.kind {
            EdgeKind::Producer(p) => Some(p),
            _ => None,
        }
    }

    pub fn consumer(&self) -> Option<&ConsumerAttrs> {
        match &self.kind {
            EdgeKind::Consumer(c) => Some(c),
            _ => None,
        }
    }
}

/// Validated directed network graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// Edge indices of producers, in declaration order.
    pub producers: Vec<usize>,
    /// Edge indices of consumers, in declaration order.
    pub consumers: Vec<usize>,
    pub pipes: Vec<usize>,
    /// Producer ordinals (positions in `producers`) whose supply temperature is a design variable.
    pub temp_controlled: Vec<usize>,
}

impl NetworkGraph {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_producers(&self) -> usize {
        self.producers.len()
    }

    pub fn n_consumers(&self) -> usize {
        self.consumers.len()
    }

    pub fn n_temp_controlled(&self) -> usize {
        self.temp_controlled.len()
    }

    pub fn node_id(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn edge_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Producer attributes by producer ordinal.
    pub fn producer(&self, k: usize) -> &ProducerAttrs {
        self.edges[self.producers[k]].producer().expect("producer edge")
    }

    pub fn consumer(&self, c: usize) -> &ConsumerAttrs {
        self.edges[self.consumers[c]].consumer().expect("consumer edge")
    }

    /// Producer ordinal of an edge index, if the edge is a producer.
    pub fn producer_ordinal(&self, edge: usize) -> Option<usize> {
        self.producers.iter().position(|&e| e == edge)
    }

    /// Undirected fundamental cycles, each as a list of `(edge, orientation)`
    /// where orientation is +1 when the cycle traverses the edge from `from` to `to`.
    pub fn fundamental_cycles(&self) -> Vec<Vec<(usize, f64)>> {
        let n = self.n_nodes();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, edge) in self.edges.iter().enumerate() {
            adj[edge.from].push((edge.to, e));
            adj[edge.to].push((edge.from, e));
        }
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree_edge = vec![false; self.n_edges()];
        depth[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some((u, e));
                    tree_edge[e] = true;
                    queue.push_back(v);
                }
            }
        }
        let mut cycles = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if tree_edge[e] {
                continue;
            }
            // Walk from `to` and `from` up to their common ancestor.
            let mut path_to = Vec::new();
            let mut path_from = Vec::new();
            let (mut a, mut b) = (edge.to, edge.from);
            while depth[a] > depth[b] {
                let (p, pe) = parent[a].unwrap();
                path_to.push((pe, a));
                a = p;
            }
            while depth[b] > depth[a] {
                let (p, pe) = parent[b].unwrap();
                path_from.push((pe, b));
                b = p;
            }
            while a != b {
                let (pa, pea) = parent[a].unwrap();
                path_to.push((pea, a));
                a = pa;
                let (pb, peb) = parent[b].unwrap();
                path_from.push((peb, b));
                b = pb;
            }
            // Cycle: from -> to along e, then to -> ancestor, then ancestor -> from.
            let mut cycle = vec![(e, 1.0)];
            for &(te, child) in &path_to {
                // traversing child -> parent
                let orient = if self.edges[te].from == child { 1.0 } else { -1.0 };
                cycle.push((te, orient));
            }
            for &(te, child) in path_from.iter().rev() {
                // traversing parent -> child
                let orient = if self.edges[te].to == child { 1.0 } else { -1.0 };
                cycle.push((te, orient));
            }
            cycles.push(cycle);
        }
        cycles
    }
}

// ---------------------------------------------------------------------------
// Serializable description
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub kind: NodeKind,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipeRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length_m: f64,
    pub diameter_m: f64,
    #[serde(default = "default_roughness")]
    pub roughness_m: f64,
    pub u_w_per_m_k: f64,
}

fn default_roughness() -> f64 {
    4.5e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumerRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ua_w_per_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valve_min_pa_s2_m6: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valve_max_pa_s2_m6: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProducerRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub technology: Technology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supply_min_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supply_max_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_max_m3_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hx_ua_w_per_m2_k: Option<f64>,
}

/// File-level network description, see the README for the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDescription {
    #[serde(default = "network_schema")]
    pub schema: String,
    #[serde(default, rename = "node")]
    pub nodes: Vec<NodeRecord>,
    #[serde(default, rename = "pipe")]
    pub pipes: Vec<PipeRecord>,
    #[serde(default, rename = "consumer")]
    pub consumers: Vec<ConsumerRecord>,
    #[serde(default, rename = "producer")]
    pub producers: Vec<ProducerRecord>,
}

pub const NETWORK_SCHEMA: &str = "dhn-network/1";

fn network_schema() -> String {
    NETWORK_SCHEMA.to_string()
}

/// Nominal temperature spread used to derive default producer flow bounds (K).
const NOMINAL_PRODUCER_SPREAD: f64 = 10.0;
/// Reference irradiance used for the default solar reference power (W m^-2).
const SOLAR_REFERENCE_IRRADIANCE: f64 = 1000.0;

/// Build and validate a network graph from its description.
pub fn build_graph(desc: &NetworkDescription) -> Result<NetworkGraph> {
    if desc.schema != NETWORK_SCHEMA {
        return Err(Error::InvalidNetwork(format!(
            "unsupported schema `{}` (expected `{NETWORK_SCHEMA}`)",
            desc.schema
        )));
    }
    let mut nodes = Vec::with_capacity(desc.nodes.len());
    let mut node_index = HashMap::new();
    for rec in &desc.nodes {
        if node_index.insert(rec.id.clone(), nodes.len()).is_some() {
            return Err(Error::InvalidNetwork(format!("duplicate node `{}`", rec.id)));
        }
        nodes.push(Node { id: rec.id.clone(), kind: rec.kind, side: rec.side });
    }
    if nodes.is_empty() {
        return Err(Error::InvalidNetwork("network has no nodes".into()));
    }

    let lookup = |edge: &str, id: &str| -> Result<usize> {
        node_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::DanglingReference(format!("edge `{edge}` references unknown node `{id}`")))
    };

    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_index = HashMap::new();
    let mut push = |edges: &mut Vec<Edge>, edge: Edge| -> Result<()> {
        if edge_index.insert(edge.id.clone(), edges.len()).is_some() {
            return Err(Error::InvalidNetwork(format!("duplicate edge `{}`", edge.id)));
        }
        edges.push(edge);
        Ok(())
    };

    let mut pipes = Vec::new();
    for rec in &desc.pipes {
        let from = lookup(&rec.id, &rec.from)?;
        let to = lookup(&rec.id, &rec.to)?;
        for (name, v) in [
            ("length", rec.length_m),
            ("diameter", rec.diameter_m),
            ("heat-loss coefficient", rec.u_w_per_m_k),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveGeometry(format!("pipe `{}` has {name} {v}", rec.id)));
            }
        }
        if !(rec.roughness_m >= 0.0) {
            return Err(Error::NonPositiveGeometry(format!(
                "pipe `{}` has roughness {}",
                rec.id, rec.roughness_m
            )));
        }
        if nodes[from].side != nodes[to].side {
            return Err(Error::InvalidNetwork(format!("pipe `{}` crosses between feed and return", rec.id)));
        }
        pipes.push(edges.len());
        push(
            &mut edges,
            Edge {
                id: rec.id.clone(),
                from,
                to,
                kind: EdgeKind::Pipe(PipeAttrs {
                    length: rec.length_m,
                    diameter: rec.diameter_m,
                    roughness: rec.roughness_m,
                    u_loss: rec.u_w_per_m_k,
                }),
            },
        )?;
    }

    let mut consumers = Vec::new();
    for rec in &desc.consumers {
        let from = lookup(&rec.id, &rec.from)?;
        let to = lookup(&rec.id, &rec.to)?;
        if nodes[from].side != Side::Feed || nodes[to].side != Side::Return {
            return Err(Error::InvalidNetwork(format!(
                "consumer `{}` must go from a feed node to a return node",
                rec.id
            )));
        }
        for (name, v) in [
            ("ua", rec.ua_w_per_k),
            ("valve_min", rec.valve_min_pa_s2_m6),
            ("valve_max", rec.valve_max_pa_s2_m6),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::NonPositiveGeometry(format!("consumer `{}` has {name} {v}", rec.id)));
                }
            }
        }
        consumers.push(edges.len());
        push(
            &mut edges,
            Edge {
                id: rec.id.clone(),
                from,
                to,
                kind: EdgeKind::Consumer(ConsumerAttrs {
                    ua: rec.ua_w_per_k,
                    valve_min: rec.valve_min_pa_s2_m6,
                    valve_max: rec.valve_max_pa_s2_m6,
                }),
            },
        )?;
    }

    let rho_cp = crate::scenario::Physics::default().rho_cp();
    let mut producers = Vec::new();
    let mut temp_controlled = Vec::new();
    for rec in &desc.producers {
        let from = lookup(&rec.id, &rec.from)?;
        let to = lookup(&rec.id, &rec.to)?;
        if nodes[from].side != Side::Return || nodes[to].side != Side::Feed {
            return Err(Error::InvalidNetwork(format!(
                "producer `{}` must go from a return node to a feed node",
                rec.id
            )));
        }
        let attrs = match rec.technology {
            Technology::ST => {
                let a_max = rec.a_max_m2.ok_or_else(|| {
                    Error::InvalidNetwork(format!("solar producer `{}` needs a_max_m2", rec.id))
                })?;
                if !(a_max > 0.0) {
                    return Err(Error::NonPositiveGeometry(format!("producer `{}` has a_max {a_max}", rec.id)));
                }
                let p_ref = rec
                    .p_max_w
                    .unwrap_or(SOLAR_REFERENCE_IRRADIANCE * crate::producers::SolarParameters::default().eta0 * a_max);
                ProducerAttrs {
                    technology: Technology::ST,
                    p_max: p_ref,
                    a_max,
                    supply_min: f64::NAN,
                    supply_max: f64::NAN,
                    flow_max: rec.flow_max_m3_s.unwrap_or(p_ref / (rho_cp * NOMINAL_PRODUCER_SPREAD)),
                    ua_per_area: rec.hx_ua_w_per_m2_k,
                }
            }
            tech => {
                let p_max = rec.p_max_w.ok_or_else(|| {
                    Error::InvalidNetwork(format!("producer `{}` needs p_max_w", rec.id))
                })?;
                if !(p_max > 0.0) {
                    return Err(Error::NonPositiveGeometry(format!("producer `{}` has p_max {p_max}", rec.id)));
                }
                let (lo, hi) = match (rec.supply_min_c, rec.supply_max_c) {
                    (Some(lo), Some(hi)) if lo <= hi => (lo, hi),
                    _ => {
                        return Err(Error::InvalidNetwork(format!(
                            "producer `{}` needs supply_min_c <= supply_max_c",
                            rec.id
                        )))
                    }
                };
                temp_controlled.push(producers.len());
                ProducerAttrs {
                    technology: tech,
                    p_max,
                    a_max: 0.0,
                    supply_min: lo,
                    supply_max: hi,
                    flow_max: rec.flow_max_m3_s.unwrap_or(p_max / (rho_cp * NOMINAL_PRODUCER_SPREAD)),
                    ua_per_area: None,
                }
            }
        };
        if !(attrs.flow_max > 0.0) {
            return Err(Error::NonPositiveGeometry(format!("producer `{}` has flow_max {}", rec.id, attrs.flow_max)));
        }
        producers.push(edges.len());
        push(&mut edges, Edge { id: rec.id.clone(), from, to, kind: EdgeKind::Producer(attrs) })?;
    }

    if producers.is_empty() {
        return Err(Error::InvalidNetwork("network has no producer edge".into()));
    }

    // Connectivity (undirected).
    let n = nodes.len();
    let mut adj = vec![Vec::new(); n];
    for e in &edges {
        adj[e.from].push(e.to);
        adj[e.to].push(e.from);
    }
    let mut seen = HashSet::from([0usize]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    if seen.len() != n {
        let missing = (0..n).find(|i| !seen.contains(i)).unwrap();
        return Err(Error::DisconnectedGraph(format!(
            "node `{}` is not connected to `{}`",
            nodes[missing].id, nodes[0].id
        )));
    }

    Ok(NetworkGraph { nodes, edges, node_index, edge_index, producers, consumers, pipes, temp_controlled })
}

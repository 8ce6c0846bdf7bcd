//! Scenario runs: manifest loading, CO₂-price sweeps and result export.
//!
//! A sweep first optimizes every price point independently (in parallel),
//! then makes a forward and a backward continuation pass in which each point
//! is re-optimized from its neighbour's optimum; the better result is kept.
//!
//! Every exported file carries a schema line and is written in a fixed order
//! with shortest round-trip float formatting, so identical inputs and seeds
//! give byte-identical outputs.

use crate::design::DesignVector;
use crate::economics::{lcoh, CostBreakdown};
use crate::error::{Error, Result};
use crate::io::{design_to_string, periods_to_string, read_network, read_periods, read_scenario, read_structured, read_timeseries, write_text};
use crate::network::{EdgeKind, NetworkGraph, Technology};
use crate::optimizer::{evaluate_design, is_better, optimize, optimize_from, OptimizationResult, OptimizerOptions, TraceRecord};
use crate::periods::PeriodSet;
use crate::problem::Problem;
use crate::scenario::Scenario;
use crate::solver::{PeriodModel, SolverOptions};
use crate::state::StateSlice;
use crate::timeagg::build_period_set;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const MANIFEST_SCHEMA: &str = "dhn-manifest/1";
pub const SUMMARY_SCHEMA: &str = "dhn-summary/1";
pub const SWEEP_SCHEMA: &str = "dhn-sweep/1";
pub const PRODUCERS_SCHEMA: &str = "dhn-producers/1";
pub const OPERATION_SCHEMA: &str = "dhn-operation/1";
pub const NODES_SCHEMA: &str = "dhn-nodes/1";
pub const EDGES_SCHEMA: &str = "dhn-edges/1";

/// Scenario fields a manifest may override.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub co2_price: Option<f64>,
    pub gas_price: Option<f64>,
    pub electricity_price: Option<f64>,
    pub discount_rate: Option<f64>,
    pub horizon_years: Option<u32>,
    pub max_pressure_rise: Option<f64>,
    /// Technologies that may be built.
    pub enabled: Option<Vec<Technology>>,
    /// Capacity fraction pinned per producer id.
    pub fixed_capacity: BTreeMap<String, f64>,
}

impl ScenarioOverrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        let e = &mut scenario.economics;
        let pairs = [
            (&mut e.co2_price, self.co2_price),
            (&mut e.gas_price, self.gas_price),
            (&mut e.electricity_price, self.electricity_price),
            (&mut e.discount_rate, self.discount_rate),
            (&mut e.max_pressure_rise, self.max_pressure_rise),
        ];
        for (field, v) in pairs {
            if let Some(v) = v {
                *field = v;
            }
        }
        if let Some(h) = self.horizon_years {
            e.horizon_years = h;
        }
        if let Some(en) = &self.enabled {
            scenario.menu.enabled = en.clone();
        }
        for (id, &phi) in &self.fixed_capacity {
            scenario.menu.fixed_capacity.insert(id.clone(), phi);
        }
    }
}

/// Solver and optimizer settings a manifest may override.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    /// Forward-solve residual tolerance.
    pub solver: Option<f64>,
    pub feasibility: Option<f64>,
    pub stationarity: Option<f64>,
    pub max_outer_iterations: Option<usize>,
    pub restarts: Option<usize>,
}

impl ToleranceOverrides {
    pub fn apply(&self, opts: &mut OptimizerOptions) {
        if let Some(v) = self.solver {
            opts.solver.tolerance = v;
        }
        if let Some(v) = self.feasibility {
            opts.feasibility_tolerance = v;
        }
        if let Some(v) = self.stationarity {
            opts.stationarity_tolerance = v;
        }
        if let Some(v) = self.max_outer_iterations {
            opts.max_outer_iterations = v;
        }
        if let Some(v) = self.restarts {
            opts.restarts = v;
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_clusters() -> usize {
    3
}

fn default_block_len() -> usize {
    24
}

/// Everything needed to reproduce a run. Relative paths are resolved against
/// the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema: String,
    pub network: PathBuf,
    pub scenario: PathBuf,
    /// Aggregated periods; alternatively `timeseries` is clustered on load.
    #[serde(default)]
    pub periods: Option<PathBuf>,
    #[serde(default)]
    pub timeseries: Option<PathBuf>,
    /// Representative periods drawn from the time series (peak excluded).
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    /// Hours per clustering block.
    #[serde(default = "default_block_len")]
    pub block_len: usize,
    /// CO₂ prices (€ kg⁻¹); empty runs once at the scenario's price.
    #[serde(default)]
    pub sweep: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub overrides: ScenarioOverrides,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Parsed inputs of a manifest.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub graph: NetworkGraph,
    pub scenario: Scenario,
    pub periods: PeriodSet,
}

impl RunManifest {
    /// Reads and validates a manifest file.
    pub fn load(path: &Path) -> Result<Self> {
        let mut m: RunManifest = read_structured(path)?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        m.validate(&path.display().to_string())?;
        Ok(m)
    }

    fn validate(&self, file: &str) -> Result<()> {
        let invalid = |msg: String| Error::Parse { file: file.into(), line: 0, msg };
        if self.schema != MANIFEST_SCHEMA {
            return Err(invalid(format!("schema `{}`, expected `{MANIFEST_SCHEMA}`", self.schema)));
        }
        if self.periods.is_some() == self.timeseries.is_some() {
            return Err(invalid("exactly one of `periods` and `timeseries` must be given".into()));
        }
        if let Some(v) = self.sweep.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("sweep values must be non-negative, got {v}")));
        }
        let mut files = vec![&self.network, &self.scenario];
        files.extend(self.periods.iter().chain(&self.timeseries));
        for f in files {
            let p = self.resolve(f);
            if !p.is_file() {
                return Err(Error::Io(format!("{}: referenced file does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output)
    }

    /// Reads the network, scenario (with overrides applied) and periods.
    pub fn load_inputs(&self) -> Result<Inputs> {
        let graph = read_network(&self.resolve(&self.network))?;
        let mut scenario = read_scenario(&self.resolve(&self.scenario))?;
        self.overrides.apply(&mut scenario);
        scenario.validate()?;
        let periods = match (&self.periods, &self.timeseries) {
            (Some(p), _) => read_periods(&self.resolve(p))?,
            (None, Some(ts)) => {
                let series = read_timeseries(&self.resolve(ts))?;
                build_period_set(&series, self.clusters, self.block_len, self.seed)?
            }
            (None, None) => unreachable!("validated"),
        };
        Ok(Inputs { graph, scenario, periods })
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        let mut o = OptimizerOptions { seed: self.seed, ..Default::default() };
        self.tolerances.apply(&mut o);
        o
    }

    /// CO₂ prices to run.
    pub fn sweep_values(&self, scenario: &Scenario) -> Vec<f64> {
        if self.sweep.is_empty() {
            vec![scenario.economics.co2_price]
        } else {
            self.sweep.clone()
        }
    }
}

/// How the kept result of a sweep point was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    MultiStart,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Converged,
    NotConverged,
    Failed,
}

impl PointStatus {
    pub fn name(self) -> &'static str {
        match self {
            PointStatus::Converged => "converged",
            PointStatus::NotConverged => "not_converged",
            PointStatus::Failed => "failed",
        }
    }
}

/// Outcome of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub co2_price: f64,
    pub problem: Problem,
    pub outcome: std::result::Result<(OptimizationResult, Origin), String>,
}

impl SweepPoint {
    pub fn status(&self) -> PointStatus {
        match &self.outcome {
            Ok((r, _)) if r.converged => PointStatus::Converged,
            Ok(_) => PointStatus::NotConverged,
            Err(_) => PointStatus::Failed,
        }
    }

    pub fn result(&self) -> Option<&OptimizationResult> {
        self.outcome.as_ref().ok().map(|(r, _)| r)
    }
}

/// All results of a manifest run.
#[derive(Debug, Clone)]
pub struct RunBundle {
    pub seed: u64,
    pub periods: PeriodSet,
    pub points: Vec<SweepPoint>,
}

impl RunBundle {
    /// True when every point converged.
    pub fn complete(&self) -> bool {
        self.points.iter().all(|p| p.status() == PointStatus::Converged)
    }
}

/// Problem of the base scenario at a CO₂ price.
pub fn problem_at(inputs: &Inputs, co2_price: f64) -> Result<Problem> {
    let mut scenario = inputs.scenario.clone();
    scenario.economics.co2_price = co2_price;
    Problem::new(inputs.graph.clone(), scenario, inputs.periods.clone())
}

/// Optimizes every sweep point of a manifest.
pub fn run_scenario(manifest: &RunManifest) -> Result<RunBundle> {
    let inputs = manifest.load_inputs()?;
    let opts = manifest.optimizer_options();
    let prices = manifest.sweep_values(&inputs.scenario);
    let problems: Vec<Problem> = prices.iter().map(|&c| problem_at(&inputs, c)).collect::<Result<_>>()?;
    let points = run_sweep(problems, &opts);
    Ok(RunBundle { seed: manifest.seed, periods: inputs.periods, points })
}

/// Multi-start optimization of each problem, then continuation passes.
pub fn run_sweep(problems: Vec<Problem>, opts: &OptimizerOptions) -> Vec<SweepPoint> {
    let first: Vec<std::result::Result<(OptimizationResult, Origin), String>> = problems
        .par_iter()
        .map(|p| optimize(p, opts, &[]).map(|r| (r, Origin::MultiStart)).map_err(|e| e.to_string()))
        .collect();
    let mut points: Vec<SweepPoint> = problems
        .into_iter()
        .zip(first)
        .map(|(problem, outcome)| SweepPoint { co2_price: problem.scenario.economics.co2_price, problem, outcome })
        .collect();
    let n = points.len();
    let single = OptimizerOptions { restarts: 0, ..*opts };
    let passes: [(Origin, Vec<(usize, usize)>); 2] = [
        (Origin::Forward, (1..n).map(|i| (i - 1, i)).collect()),
        (Origin::Backward, (0..n.saturating_sub(1)).rev().map(|i| (i + 1, i)).collect()),
    ];
    for (origin, steps) in passes {
        for (from, to) in steps {
            let Some(start) = points[from].result().map(|r| r.design.clone()) else {
                continue;
            };
            match optimize_from(&points[to].problem, &single, &start) {
                Ok(r) => {
                    let better = match points[to].result() {
                        None => true,
                        Some(cur) => is_better(&r, cur, opts.feasibility_tolerance),
                    };
                    if better {
                        log::info!("C_CO2 = {}: {:?} continuation improved J to {:.6e}", points[to].co2_price, origin, r.objective);
                        points[to].outcome = Ok((r, origin));
                    }
                }
                Err(e) => log::warn!("C_CO2 = {}: continuation failed: {e}", points[to].co2_price),
            }
        }
    }
    points
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Per-point summary record, also the row source of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub point: usize,
    pub co2_price: f64,
    pub status: PointStatus,
    pub origin: Option<Origin>,
    pub error: Option<String>,
    /// Discounted total cost (€).
    pub objective: Option<f64>,
    /// Investment cost (€).
    pub capex: Option<f64>,
    /// Weighted annual operating cost (€ yr⁻¹).
    pub annual_operating: Option<f64>,
    /// € kWh⁻¹.
    pub lcoh: Option<f64>,
    /// kg CO₂ per delivered kWh.
    pub specific_emissions: Option<f64>,
    pub max_violation: Option<f64>,
    pub outer_iterations: Option<usize>,
    /// Built capacity per producer id (W, m² for solar thermal).
    pub capacity: BTreeMap<String, f64>,
    /// Annual heat share per producer id.
    pub heat_share: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Summary<'a> {
    schema: &'static str,
    seed: u64,
    points: &'a [PointSummary],
}

/// Built capacity of producer `k` (W, or m² for solar thermal).
pub fn built_capacity(graph: &NetworkGraph, k: usize, phi: f64) -> f64 {
    let p = graph.producer(k);
    if p.technology == Technology::ST {
        phi * p.a_max
    } else {
        phi * p.p_max
    }
}

fn producer_ids(graph: &NetworkGraph) -> Vec<String> {
    graph.producers.iter().map(|&e| graph.edges[e].id.clone()).collect()
}

pub fn summarize(index: usize, point: &SweepPoint) -> PointSummary {
    let mut s = PointSummary {
        point: index,
        co2_price: point.co2_price,
        status: point.status(),
        origin: None,
        error: None,
        objective: None,
        capex: None,
        annual_operating: None,
        lcoh: None,
        specific_emissions: None,
        max_violation: None,
        outer_iterations: None,
        capacity: BTreeMap::new(),
        heat_share: BTreeMap::new(),
    };
    match &point.outcome {
        Err(e) => s.error = Some(e.clone()),
        Ok((r, origin)) => {
            let g = &point.problem.graph;
            let b = &r.breakdown;
            s.origin = Some(*origin);
            s.objective = Some(r.objective);
            s.capex = Some(b.capex.iter().sum());
            s.annual_operating = Some(b.annual_operating());
            s.lcoh = lcoh(b, b.annual_heat_kwh()).ok();
            s.specific_emissions = b.specific_emissions().ok();
            s.max_violation = Some(r.constraints.max_violation());
            s.outer_iterations = Some(r.outer_iterations);
            let shares = b.heat_shares();
            for (k, id) in producer_ids(g).into_iter().enumerate() {
                s.capacity.insert(id.clone(), built_capacity(g, k, r.design.phi()[k]));
                s.heat_share.insert(id, shares[k]);
            }
        }
    }
    s
}

/// Shortest round-trip float text; scientific outside `[1e-4, 1e16)`.
struct Num(f64);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a = self.0.abs();
        if a != 0.0 && !(1e-4..1e16).contains(&a) {
            write!(f, "{:e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| Num(x).to_string()).unwrap_or_default()
}

/// Sweep table: one row per point; failed points keep their row.
pub fn sweep_table(graph: &NetworkGraph, rows: &[PointSummary]) -> String {
    let ids = producer_ids(graph);
    let mut out = format!("# {SWEEP_SCHEMA}\n");
    out.push_str(
        "point,co2_price_eur_per_kg,status,origin,objective_eur,capex_eur,annual_operating_eur_per_yr,\
         lcoh_eur_per_kwh,specific_emissions_kg_per_kwh,max_violation",
    );
    for id in &ids {
        write!(out, ",capacity_{id}").unwrap();
    }
    for id in &ids {
        write!(out, ",heat_share_{id}").unwrap();
    }
    out.push('\n');
    for r in rows {
        let origin = r.origin.map(|o| serde_json::to_value(o).unwrap().as_str().unwrap().to_string()).unwrap_or_default();
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.point,
            Num(r.co2_price),
            r.status.name(),
            origin,
            opt(r.objective),
            opt(r.capex),
            opt(r.annual_operating),
            opt(r.lcoh),
            opt(r.specific_emissions),
            opt(r.max_violation)
        )
        .unwrap();
        for id in &ids {
            write!(out, ",{}", opt(r.capacity.get(id).copied())).unwrap();
        }
        for id in &ids {
            write!(out, ",{}", opt(r.heat_share.get(id).copied())).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Producer table: capacity, investment and annual heat share.
pub fn producer_table(graph: &NetworkGraph, design: &DesignVector, b: &CostBreakdown) -> String {
    let shares = b.heat_shares();
    let mut out = format!("# {PRODUCERS_SCHEMA}\nproducer,technology,phi,capacity,capex_eur,heat_share\n");
    for (k, id) in producer_ids(graph).iter().enumerate() {
        let phi = design.phi()[k];
        writeln!(
            out,
            "{id},{},{},{},{},{}",
            graph.producer(k).technology,
            Num(phi),
            Num(built_capacity(graph, k, phi)),
            Num(b.capex[k]),
            Num(shares[k])
        )
        .unwrap();
    }
    out
}

/// Operation table: one row per period and producer.
pub fn operation_table(problem: &Problem, design: &DesignVector, b: &CostBreakdown) -> String {
    let g = &problem.graph;
    let mut out = format!(
        "# {OPERATION_SCHEMA}\nperiod,producer,weight,inflow_m3_per_s,supply_temperature_c,heat_w,heat_share,\
         energy_cost_eur_per_yr,co2_cost_eur_per_yr,pump_cost_eur_per_yr,emissions_kg_per_yr\n"
    );
    for (t, ops) in b.operating.iter().enumerate() {
        let shares = b.period_heat_shares(t);
        for (k, o) in ops.iter().enumerate() {
            let tau = problem.tau_index(k).map(|j| Num(design.tau(t)[j]).to_string()).unwrap_or_default();
            writeln!(
                out,
                "{t},{},{},{},{tau},{},{},{},{},{},{}",
                g.edges[g.producers[k]].id,
                Num(b.weights[t]),
                Num(design.gamma(t)[k]),
                Num(o.heat),
                Num(shares[k]),
                Num(o.opex),
                Num(o.co2_cost),
                Num(o.pump_opex),
                Num(o.emissions)
            )
            .unwrap();
        }
    }
    out
}

/// Node table of one period: pressure and temperature.
pub fn node_table(problem: &Problem, t: usize, state: &StateSlice) -> String {
    let g = &problem.graph;
    let sl = problem.state_layout;
    let t_inf = problem.contexts[t].t_inf;
    let mut out = format!("# {NODES_SCHEMA}\nnode,side,kind,pressure_pa,temperature_c\n");
    for (n, node) in g.nodes.iter().enumerate() {
        let side = serde_json::to_value(node.side).unwrap();
        let kind = serde_json::to_value(node.kind).unwrap();
        writeln!(
            out,
            "{},{},{},{},{}",
            node.id,
            side.as_str().unwrap(),
            kind.as_str().unwrap(),
            Num(state.values[sl.p(n)]),
            Num(state.values[sl.theta_node(n)] + t_inf)
        )
        .unwrap();
    }
    out
}

/// Edge table of one period: flow, outlet temperature and heat exchanged.
pub fn edge_table(problem: &Problem, t: usize, design: &DesignVector, state: &StateSlice) -> String {
    let g = &problem.graph;
    let sl = problem.state_layout;
    let t_inf = problem.contexts[t].t_inf;
    let out_q = PeriodModel::new(problem, t).outputs(&design.local(t), &state.values);
    let mut out = format!("# {EDGES_SCHEMA}\nedge,kind,from,to,flow_m3_per_s,pressure_drop_pa,outlet_temperature_c,heat_w\n");
    for (e, edge) in g.edges.iter().enumerate() {
        let (kind, heat) = match &edge.kind {
            EdgeKind::Pipe(_) => ("pipe", String::new()),
            EdgeKind::Consumer(_) => {
                let c = g.consumers.iter().position(|&x| x == e).unwrap();
                ("consumer", Num(out_q.consumer_heat[c].value).to_string())
            }
            EdgeKind::Producer(_) => {
                let k = g.producers.iter().position(|&x| x == e).unwrap();
                ("producer", Num(out_q.producer_heat[k].value).to_string())
            }
        };
        writeln!(
            out,
            "{},{kind},{},{},{},{},{},{heat}",
            edge.id,
            g.nodes[edge.from].id,
            g.nodes[edge.to].id,
            Num(state.values[sl.q(e)]),
            Num(state.values[sl.p(edge.from)] - state.values[sl.p(edge.to)]),
            Num(state.values[sl.theta_exit(e)] + t_inf)
        )
        .unwrap();
    }
    out
}

fn trace_lines(trace: &[TraceRecord]) -> Result<String> {
    let mut out = String::new();
    for r in trace {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

/// Writes the design, costs and per-period network tables of one solution.
pub fn write_solution(dir: &Path, problem: &Problem, design: &DesignVector, states: &[StateSlice], b: &CostBreakdown) -> Result<()> {
    write_text(&dir.join("design.csv"), &design_to_string(&problem.graph, design))?;
    write_text(&dir.join("producers.csv"), &producer_table(&problem.graph, design, b))?;
    write_text(&dir.join("operation.csv"), &operation_table(problem, design, b))?;
    let scenario = toml::to_string(&problem.scenario).map_err(|e| Error::Io(e.to_string()))?;
    write_text(&dir.join("scenario.toml"), &scenario)?;
    for (t, x) in states.iter().enumerate() {
        write_text(&dir.join(format!("nodes_t{t}.csv")), &node_table(problem, t, x))?;
        write_text(&dir.join(format!("edges_t{t}.csv")), &edge_table(problem, t, design, x))?;
    }
    Ok(())
}

/// Writes the bundle below `dir`: `sweep_summary.csv`, `summary.json`,
/// `periods.toml` and one `point_<i>/` directory per successful point.
pub fn export_results(bundle: &RunBundle, dir: &Path) -> Result<()> {
    let Some(first) = bundle.points.first() else {
        return Err(Error::InvalidScenario("nothing to export".into()));
    };
    let rows: Vec<PointSummary> = bundle.points.iter().enumerate().map(|(i, p)| summarize(i, p)).collect();
    write_text(&dir.join("sweep_summary.csv"), &sweep_table(&first.problem.graph, &rows))?;
    let summary = Summary { schema: SUMMARY_SCHEMA, seed: bundle.seed, points: &rows };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    write_text(&dir.join("summary.json"), &(json + "\n"))?;
    write_text(&dir.join("periods.toml"), &periods_to_string(&bundle.periods)?)?;
    for (i, p) in bundle.points.iter().enumerate() {
        let Some(r) = p.result() else { continue };
        let pdir = dir.join(format!("point_{i}"));
        write_solution(&pdir, &p.problem, &r.design, &r.states, &r.breakdown)?;
        write_text(&pdir.join("trace.jsonl"), &trace_lines(&r.trace)?)?;
    }
    Ok(())
}

/// Forward simulation of a given design, written like an optimized point.
pub fn simulate(problem: &Problem, design: &DesignVector, solver: &SolverOptions, dir: &Path) -> Result<f64> {
    let (states, j, breakdown, constraints) = evaluate_design(problem, design, solver)?;
    write_solution(dir, problem, design, &states, &breakdown)?;
    log::info!("J = {j:.6e} €, max constraint violation {:.3e}", constraints.max_violation());
    Ok(j)
}

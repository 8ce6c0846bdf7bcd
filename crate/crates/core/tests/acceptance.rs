//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always print.

#[path = "common/mod.rs"]
mod common;

use dhn_retrofit::constraints::ConstraintKind;
use dhn_retrofit::design::VarClass;
use dhn_retrofit::economics::{discount_factor, total_objective};
use dhn_retrofit::network::*;
use dhn_retrofit::optimizer::{evaluate_design, initial_design, optimize, AugLagState, Merit, OptimizerOptions, Scaling};
use dhn_retrofit::periods::{PeriodEnvironment, PeriodSet};
use dhn_retrofit::problem::Problem;
use dhn_retrofit::producers::{eta_eb, eta_gb, solar_preprocess, ProducerParameters, SolarParameters};
use dhn_retrofit::runner::{run_scenario, RunBundle, RunManifest};
use dhn_retrofit::scenario::{Economics, Scenario};
use dhn_retrofit::solver::{check_reports, solve_all_periods, PeriodModel, SolverOptions};
use dhn_retrofit::timeagg::{active_hours, exclude_summer, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1 ---------------------------------------------------------------------------

fn parameters() -> Outcome {
    let e = Economics::default();
    let ok = eta_eb() == 0.98
        && eta_gb(0.0) == 0.9755
        && e.gas_emission_factor == 0.181
        && e.electricity_emission_factor == 0.181
        && e.gas_price == 0.0319
        && e.electricity_price == 0.1;
    check(
        ok,
        format!(
            "eta_eb {}, eta_gb(0) {}, EF {}/{}, prices {}/{}",
            eta_eb(),
            eta_gb(0.0),
            e.gas_emission_factor,
            e.electricity_emission_factor,
            e.gas_price,
            e.electricity_price
        ),
    )
}

// 2 ---------------------------------------------------------------------------

fn directional_fd(f: &dyn Fn(&[f64]) -> f64, z: &[f64], v: &[f64], h: f64) -> f64 {
    let at = |s: f64| f(&z.iter().zip(v).map(|(a, b)| a + s * b).collect::<Vec<_>>());
    (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
}

fn gradients() -> Outcome {
    let p = common::desk();
    let solver = SolverOptions { tolerance: 1e-13, ..Default::default() };
    let d = initial_design(&p, &solver);
    let scaling = Scaling::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut al = AugLagState::new(&p, 10.0);
    al.lambda.iter_mut().flatten().for_each(|l| *l = rng.gen_range(-1.0..1.0));
    al.mu.iter_mut().flatten().for_each(|m| *m = rng.gen_range(0.0..1.0));
    let merit = Merit::new(&p, &scaling, &al, 1e6, solver);
    let free = |i: usize| scaling.upper[i] > scaling.lower[i];
    let z: Vec<f64> = scaling
        .to_scaled(&d)
        .iter()
        .enumerate()
        .map(|(i, &v)| if free(i) { v.clamp(scaling.lower[i] + 0.02, scaling.upper[i] - 0.02) } else { v })
        .collect();
    let (_, g) = merit.evaluate(&z).map_err(|e| e.to_string())?;
    let f = |x: &[f64]| merit.evaluate(x).unwrap().0;
    let classes = [VarClass::Phi, VarClass::Alpha, VarClass::Gamma, VarClass::Tau];
    let (mut worst, mut n) = (0.0f64, 0);
    for i in 0..100 {
        // Every third direction mixes all classes, the rest probe one class.
        let class = classes[i % 4];
        let mixed = i % 3 == 0;
        let v: Vec<f64> = (0..z.len())
            .map(|j| if free(j) && (mixed || p.layout.class_of(j) == class) { rng.gen_range(-1.0..1.0) } else { 0.0 })
            .collect();
        let adj: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        let fd = directional_fd(&f, &z, &v, 1e-4);
        worst = worst.max((adj - fd).abs() / fd.abs());
        n += 1;
    }
    check(worst <= 1e-5, format!("{n} directions, worst relative error {worst:.2e} (limit 1e-5)"))
}

// 3 ---------------------------------------------------------------------------

fn conservation() -> Outcome {
    let opts = SolverOptions { tolerance: 1e-12, ..Default::default() };
    let (mut mass, mut mix, mut lp) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..50 {
        let p = common::random_problem(seed);
        let d = initial_design(&p, &opts);
        let (x, reports) = solve_all_periods(&p, &d, None, &opts);
        check_reports(&reports).map_err(|e| format!("network {seed}: {e}"))?;
        let (a, b, c) = common::imbalances(&p, &d, &x);
        mass = mass.max(a);
        mix = mix.max(b);
        lp = lp.max(c);
    }
    check(
        mass <= 1e-10 && mix <= 1e-8 && lp <= 1e-6,
        format!("50 networks: mass {mass:.1e} (1e-10), mixing {mix:.1e} K (1e-8), loop {lp:.1e} Pa (1e-6)"),
    )
}

// 4, 5, 6 ---------------------------------------------------------------------

fn desk_sweep() -> Result<RunBundle, String> {
    let m = RunManifest::load(&common::fixture("desk").join("manifest.toml")).map_err(|e| e.to_string())?;
    run_scenario(&m).map_err(|e| e.to_string())
}

fn feasibility(bundle: &RunBundle) -> Outcome {
    let (mut demand, mut pressure, mut slack, mut other) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for pt in &bundle.points {
        let r = pt.result().ok_or_else(|| format!("C_CO2 = {}: no result", pt.co2_price))?;
        for c in &r.constraints.equalities {
            match c.kind {
                ConstraintKind::Demand(_) => demand = demand.max(c.value.abs()),
                _ => other = other.max(c.value.abs()),
            }
        }
        let mu = r.multipliers.mu.iter().flatten();
        for (c, m) in r.constraints.inequalities.iter().zip(mu) {
            match c.kind {
                ConstraintKind::Pressure(_) => pressure = pressure.max(c.value.max(0.0)),
                _ => other = other.max(c.value.max(0.0)),
            }
            slack = slack.max((m * c.value).abs());
        }
    }
    check(
        demand <= 1e-6 && pressure <= 1e-6 && slack <= 1e-6 && other <= 1e-6,
        format!(
            "{} points: demand {demand:.1e}, pressure {pressure:.1e}, other {other:.1e}, |mu h| {slack:.1e} (all 1e-6)",
            bundle.points.len()
        ),
    )
}

fn share_of(pt: &dhn_retrofit::runner::SweepPoint, id: &str) -> f64 {
    let g = &pt.problem.graph;
    let k = g.producer_ordinal(g.edge_id(id).unwrap()).unwrap();
    pt.result().map(|r| r.breakdown.heat_shares()[k]).unwrap_or(f64::NAN)
}

fn trends(bundle: &RunBundle) -> Outcome {
    let co2: Vec<f64> = bundle.points.iter().map(|p| p.co2_price).collect();
    let hp: Vec<f64> = bundle.points.iter().map(|p| share_of(p, "HP")).collect();
    let gb: Vec<f64> = bundle.points.iter().map(|p| share_of(p, "GB")).collect();
    let j: Vec<f64> = bundle.points.iter().map(|p| p.result().map(|r| r.objective).unwrap_or(f64::NAN)).collect();
    let up = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let down = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let all_converged = bundle.complete();
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
    check(
        all_converged && co2 == [0.0, 0.075, 0.15, 0.3] && up(&hp) && down(&gb) && up(&j),
        format!(
            "C_CO2 [{}]: HP share [{}], GB share [{}], J [{}]",
            fmt(&co2),
            fmt(&hp),
            fmt(&gb),
            j.iter().map(|x| format!("{x:.0}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn temperature_bounds(bundle: &RunBundle) -> Outcome {
    // The desk scenario file's own CO₂ price; the sweep overrides it per point.
    let m = RunManifest::load(&common::fixture("desk").join("manifest.toml")).unwrap();
    let own = m.load_inputs().unwrap().scenario.economics.co2_price;
    let pt = bundle
        .points
        .iter()
        .find(|p| p.co2_price == own)
        .ok_or_else(|| format!("no sweep point at the desk scenario price {own}"))?;
    let r = pt.result().ok_or("no result at the desk scenario price")?;
    let p = &pt.problem;
    let g = &p.graph;
    let gb = g.producer_ordinal(g.edge_id("GB").unwrap()).unwrap();
    let hp = g.producer_ordinal(g.edge_id("HP").unwrap()).unwrap();
    let (j_gb, j_hp) = (p.tau_index(gb).unwrap(), p.tau_index(hp).unwrap());
    let gb_max = g.producer(gb).supply_max;
    let hp_min = g.producer(hp).supply_min;
    let mut gb_ok = true;
    let mut gb_periods = Vec::new();
    for t in 0..p.n_periods() {
        let heat = r.breakdown.operating[t][gb].heat;
        if p.periods.is_peak(t) || p.contexts[t].weight == 0.0 || heat <= 0.0 {
            continue;
        }
        let tau = r.design.tau(t)[j_gb];
        gb_ok &= (tau - gb_max).abs() <= 1e-6;
        gb_periods.push(format!("t{t} {tau:.4}"));
    }
    // Lowest total demand among positive-weight periods.
    let low = (0..p.n_periods())
        .filter(|&t| !p.periods.is_peak(t) && p.contexts[t].weight > 0.0)
        .min_by(|&a, &b| {
            let s = |t: usize| p.contexts[t].demand.iter().sum::<f64>();
            s(a).total_cmp(&s(b))
        })
        .unwrap();
    let hp_tau = r.design.tau(low)[j_hp];
    let hp_ok = (hp_tau - hp_min).abs() <= 1e-6 && r.breakdown.operating[low][hp].heat > 0.0;
    check(
        !gb_periods.is_empty() && gb_ok && hp_ok,
        format!(
            "C_CO2 {own}: GB supply [{}] vs max {gb_max}; HP supply t{low} {hp_tau:.4} vs min {hp_min}",
            gb_periods.join(", ")
        ),
    )
}

// 7 ---------------------------------------------------------------------------

/// Single gas boiler feeding the pair fixture's consumers.
fn single_producer_problem() -> Problem {
    let dir = common::fixture("pair");
    let mut graph = dhn_retrofit::io::read_network(&dir.join("network.toml")).unwrap();
    let hp = graph.edge_id("HP").unwrap();
    graph = strip_producer(&graph, hp);
    let mut scenario = dhn_retrofit::io::read_scenario(&dir.join("scenario.toml")).unwrap();
    scenario.menu.enabled = vec![Technology::GB];
    let periods = dhn_retrofit::io::read_periods(&dir.join("periods.toml")).unwrap();
    Problem::new(graph, scenario, periods).unwrap()
}

fn strip_producer(g: &NetworkGraph, edge: usize) -> NetworkGraph {
    let text = toml::to_string(&describe(g, edge)).unwrap();
    build_graph(&toml::from_str(&text).unwrap()).unwrap()
}

fn describe(g: &NetworkGraph, skip: usize) -> NetworkDescription {
    let id = |n: usize| g.nodes[n].id.clone();
    let mut d = NetworkDescription {
        schema: NETWORK_SCHEMA.into(),
        nodes: g.nodes.iter().map(|n| NodeRecord { id: n.id.clone(), kind: n.kind, side: n.side }).collect(),
        pipes: vec![],
        consumers: vec![],
        producers: vec![],
    };
    for (e, edge) in g.edges.iter().enumerate() {
        if e == skip {
            continue;
        }
        match &edge.kind {
            EdgeKind::Pipe(p) => d.pipes.push(PipeRecord {
                id: edge.id.clone(),
                from: id(edge.from),
                to: id(edge.to),
                length_m: p.length,
                diameter_m: p.diameter,
                roughness_m: p.roughness,
                u_w_per_m_k: p.u_loss,
            }),
            EdgeKind::Consumer(_) => d.consumers.push(ConsumerRecord {
                id: edge.id.clone(),
                from: id(edge.from),
                to: id(edge.to),
                ua_w_per_k: None,
                valve_min_pa_s2_m6: None,
                valve_max_pa_s2_m6: None,
            }),
            EdgeKind::Producer(p) => d.producers.push(ProducerRecord {
                id: edge.id.clone(),
                from: id(edge.from),
                to: id(edge.to),
                technology: p.technology,
                p_max_w: Some(p.p_max),
                a_max_m2: None,
                supply_min_c: Some(p.supply_min),
                supply_max_c: Some(p.supply_max),
                flow_max_m3_s: None,
                hx_ua_w_per_m2_k: None,
            }),
        }
    }
    d
}

/// Spreadsheet-style assembly straight from the raw state vector and the
/// published formulas, independent of the library's cost code.
fn brute_force_objective(p: &Problem, d: &dhn_retrofit::design::DesignVector, x: &[dhn_retrofit::state::StateSlice]) -> f64 {
    let params = ProducerParameters::default();
    let e = &p.scenario.economics;
    let phys = &p.scenario.physics;
    let g = &p.graph;
    let sl = p.state_layout;
    let edge = g.producers[0];
    let (from, to) = (g.edges[edge].from, g.edges[edge].to);
    let size = d.phi()[0] * g.producer(0).p_max;
    let capex = size * params.capex.gb.a * (params.capex.gb.b * size).exp();
    let annuity = (1.0 - (1.0 + e.discount_rate).powi(-(e.horizon_years as i32))) / e.discount_rate;
    let hours = p.periods.active_hours;
    let mut annual = 0.0;
    for (t, st) in x.iter().enumerate() {
        let v = &st.values;
        let t_inf = p.periods.periods[t].t_inf;
        let q = v[sl.q(edge)];
        let t_ret = v[sl.theta_node(from)] + t_inf;
        let t_sup = v[sl.theta_exit(edge)] + t_inf;
        let heat = phys.density * phys.heat_capacity * q * (t_sup - t_ret);
        let c = params.gb_efficiency;
        let eta = c.a * t_ret.powi(3) + c.b * t_ret.powi(2) + c.c * t_ret + c.d;
        let fuel_kwh = heat / eta * hours / 1000.0;
        let pump_kwh = q * (v[sl.p(to)] - v[sl.p(from)]) / phys.pump_efficiency * hours / 1000.0;
        let cost = fuel_kwh * (e.gas_price + e.gas_emission_factor * e.co2_price)
            + pump_kwh * (e.electricity_price + e.electricity_emission_factor * e.co2_price);
        annual += p.periods.periods[t].weight * cost;
    }
    capex + annuity * annual
}

fn economics() -> Outcome {
    let p = single_producer_problem();
    let solver = SolverOptions { tolerance: 1e-12, ..Default::default() };
    let d = initial_design(&p, &solver);
    let (x, reports) = solve_all_periods(&p, &d, None, &solver);
    check_reports(&reports).map_err(|e| e.to_string())?;
    let (j, _) = total_objective(&p, &d, &x).map_err(|e| e.to_string())?;
    let oracle = brute_force_objective(&p, &d, &x);
    let rel = (j - oracle).abs() / oracle.abs();
    let df = discount_factor(0.05, 30);

    // 8760 h with a contiguous 552 h demand-free summer (6.3 %).
    let n = 8760;
    let series = TimeSeries {
        consumer_ids: vec!["C1".into()],
        t_inf: (0..n).map(|h| 8.0 + 8.0 * (h as f64 / 8760.0 * std::f64::consts::TAU).sin()).collect(),
        g_irr: vec![100.0; n],
        demand: (0..n).map(|h| vec![if (4000..4552).contains(&h) { 0.0 } else { 5.0e4 }]).collect(),
    };
    let (_, excluded) = exclude_summer(&series).map_err(|e| e.to_string())?;
    let k = active_hours(excluded);
    check(
        rel <= 1e-9 && (df - 15.3725).abs() <= 1e-4 && k == 8208.0,
        format!("J rel. error {rel:.1e} (1e-9); discount factor {df:.5} (15.3725 +- 1e-4); K {k} h/yr (8208)"),
    )
}

// 8 ---------------------------------------------------------------------------

fn solar() -> Outcome {
    let sp = SolarParameters::default();
    let eta0 = sp.collector_efficiency(0.0, 500.0);
    let unit = solar_preprocess(167.5, 5.0, 1.0, 1.0);

    // Desk peak period has no irradiance: the solar unit is off.
    let p = common::desk();
    let solver = SolverOptions::default();
    let d = initial_design(&p, &solver);
    let (x, _) = solve_all_periods(&p, &d, None, &solver);
    let g = &p.graph;
    let st = g.producer_ordinal(g.edge_id("ST").unwrap()).unwrap();
    let mut inactive = 0;
    let mut exact = true;
    let cs = dhn_retrofit::constraints::evaluate_constraints(&p, &d, &x).map_err(|e| e.to_string())?;
    for t in 0..p.n_periods() {
        if p.contexts[t].solar[st].active {
            continue;
        }
        inactive += 1;
        let out = PeriodModel::new(&p, t).outputs(&d.local(t), &x[t].values);
        exact &= out.producer_heat[st].value == 0.0 && out.solar_available[st].value == 0.0;
        exact &= cs.equalities.iter().filter(|c| c.period == t && c.kind == ConstraintKind::Solar(st)).all(|c| c.value == 0.0);
    }
    check(
        eta0 == 0.75 && (unit.t_mean - 31.0).abs() <= 1.0 && inactive > 0 && exact,
        format!(
            "eta(0) {eta0}; T_m at (167.5 W/m2, 5 C) {:.2} C (31 +- 1); {inactive} inactive period(s) with zero heat and zero residual: {exact}",
            unit.t_mean
        ),
    )
}

// 9 ---------------------------------------------------------------------------

/// Gas boiler and heat pump feeding one consumer directly, supply fixed at 70 °C.
fn dispatch_problem() -> Problem {
    let node = |id: &str, side| NodeRecord { id: id.into(), kind: NodeKind::Producer, side };
    let producer = |id: &str, technology| ProducerRecord {
        id: id.into(),
        from: "R".into(),
        to: "F".into(),
        technology,
        p_max_w: Some(2.0e5),
        a_max_m2: None,
        supply_min_c: Some(70.0),
        supply_max_c: Some(70.0),
        flow_max_m3_s: None,
        hx_ua_w_per_m2_k: None,
    };
    let desc = NetworkDescription {
        schema: NETWORK_SCHEMA.into(),
        nodes: vec![node("F", Side::Feed), node("R", Side::Return)],
        pipes: vec![],
        consumers: vec![ConsumerRecord {
            id: "C".into(),
            from: "F".into(),
            to: "R".into(),
            ua_w_per_k: None,
            valve_min_pa_s2_m6: None,
            valve_max_pa_s2_m6: None,
        }],
        producers: vec![producer("GB", Technology::GB), producer("HP", Technology::HP)],
    };
    let graph = build_graph(&desc).unwrap();
    let mut scenario = Scenario::default();
    scenario.economics.co2_price = 0.15;
    scenario.menu.enabled = vec![Technology::GB, Technology::HP];
    let periods = PeriodSet {
        periods: vec![PeriodEnvironment { t_inf: 5.0, g_irr: 0.0, demand: vec![8.0e4], weight: 1.0 }],
        peak: None,
        active_hours: 8208.0,
        excluded_fraction: 0.063,
    };
    Problem::new(graph, scenario, periods).unwrap()
}

fn dispatch() -> Outcome {
    let p = dispatch_problem();
    let solver = SolverOptions { tolerance: 1e-12, ..Default::default() };
    let l = p.layout;
    let base = initial_design(&p, &solver);
    let alpha_min = p.lower[l.alpha_range(0).start];
    let flow_max = [p.graph.producer(0).flow_max, p.graph.producer(1).flow_max];
    let p_max = [p.graph.producer(0).p_max, p.graph.producer(1).p_max];
    // Design for a dispatch: open valve, capacities sized to cover heat and flow.
    let design = |q_gb: f64, q_hp: f64| -> Option<(f64, f64)> {
        let mut d = base.clone();
        d.values[l.alpha_range(0).start] = alpha_min;
        let gr = l.gamma_range(0);
        d.values[gr.start] = q_gb;
        d.values[gr.start + 1] = q_hp;
        d.values[0] = 1.0;
        d.values[1] = 1.0;
        let (x, reports) = solve_all_periods(&p, &d, None, &solver);
        check_reports(&reports).ok()?;
        let out = PeriodModel::new(&p, 0).outputs(&d.local(0), &x[0].values);
        for k in 0..2 {
            let q = [q_gb, q_hp][k];
            d.values[k] = (out.producer_heat[k].value / p_max[k]).max(q / flow_max[k]).min(1.0);
        }
        let (_, j, _, cs) = evaluate_design(&p, &d, &solver).ok()?;
        let delivered = out.consumer_heat[0].value;
        Some((j, cs.max_violation().max((delivered - 8.0e4).abs() / 8.0e4)))
    };
    // Total flow that meets the demand, by bisection on the delivered heat.
    let delivered = |q: f64| {
        let mut d = base.clone();
        d.values[l.alpha_range(0).start] = alpha_min;
        d.values[l.gamma_range(0).start] = q;
        d.values[l.gamma_range(0).start + 1] = 0.0;
        let (x, _) = solve_all_periods(&p, &d, None, &solver);
        PeriodModel::new(&p, 0).outputs(&d.local(0), &x[0].values).consumer_heat[0].value
    };
    let (mut lo, mut hi) = (1e-5, flow_max[0].min(flow_max[1]));
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if delivered(mid) < 8.0e4 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q_total = 0.5 * (lo + hi);
    let mut oracle = f64::INFINITY;
    let mut best_split = 0.0;
    for i in 0..=200 {
        let s = i as f64 / 200.0;
        if let Some((j, viol)) = design(s * q_total, (1.0 - s) * q_total) {
            if viol <= 1e-6 && j < oracle {
                oracle = j;
                best_split = s;
            }
        }
    }
    let opts = OptimizerOptions { restarts: 3, seed: 3, ..Default::default() };
    let r = optimize(&p, &opts, &[]).map_err(|e| e.to_string())?;
    let gr = l.gamma_range(0);
    let split = r.design.values[gr.start] / (r.design.values[gr.start] + r.design.values[gr.start + 1]);
    let rel = (r.objective - oracle) / oracle;
    check(
        r.feasible(1e-6) && rel.abs() <= 0.01,
        format!(
            "optimizer J {:.2} vs grid {:.2} ({:+.3}%, limit 1%); GB flow fraction {split:.3} vs {best_split:.3}",
            r.objective,
            oracle,
            100.0 * rel
        ),
    )
}

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let mut failures = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {n} {name}: {detail} ({secs:.1} s)"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {n} {name}: {detail} ({secs:.1} s)");
            }
        }
    };
    report(1, "parameter fidelity", &parameters);
    report(2, "gradient correctness", &gradients);
    report(3, "conservation", &conservation);
    let t = Instant::now();
    let sweep = desk_sweep();
    println!("       desk CO2 sweep optimized in {:.1} s", t.elapsed().as_secs_f64());
    let sweep = &sweep;
    let on_sweep = |f: fn(&RunBundle) -> Outcome| -> Box<dyn Fn() -> Outcome + '_> {
        Box::new(move || match sweep {
            Ok(b) => f(b),
            Err(e) => Err(format!("sweep failed: {e}")),
        })
    };
    report(4, "constraint feasibility", &*on_sweep(feasibility));
    report(5, "trend reproduction", &*on_sweep(trends));
    report(6, "temperature bounds", &*on_sweep(temperature_bounds));
    report(7, "economics oracle", &economics);
    report(8, "solar model", &solar);
    report(9, "dispatch oracle", &dispatch);
    if failures > 0 {
        println!("{failures} criterion/criteria failed");
        std::process::exit(1);
    }
}

#![allow(dead_code)]

use dhn_retrofit::io::{read_network, read_periods, read_scenario};
use dhn_retrofit::problem::Problem;
use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// The desk-scale fixture with its scenario.
pub fn desk() -> Problem {
    let dir = fixture("desk");
    let graph = read_network(&dir.join("network.toml")).unwrap();
    let scenario = read_scenario(&dir.join("scenario.toml")).unwrap();
    let periods = read_periods(&dir.join("periods.toml")).unwrap();
    Problem::new(graph, scenario, periods).unwrap()
}

/// A random two-pipe-layer network: feed tree mirrored by a return tree, an
/// optional feed/return cross-link forming loops, one or two producers.
pub fn random_network(seed: u64) -> dhn_retrofit::network::NetworkGraph {
    use dhn_retrofit::network::*;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5usize);
    let node = |id: String, kind, side| NodeRecord { id, kind, side };
    let mut nodes = vec![node("F0".into(), NodeKind::Producer, Side::Feed), node("R0".into(), NodeKind::Producer, Side::Return)];
    let mut pipes = Vec::new();
    let mut consumers = Vec::new();
    let pipe = |rng: &mut rand_chacha::ChaCha8Rng, id: String, from: String, to: String| PipeRecord {
        id,
        from,
        to,
        length_m: rng.gen_range(30.0..200.0),
        diameter_m: rng.gen_range(0.04..0.1),
        roughness_m: 4.5e-5,
        u_w_per_m_k: rng.gen_range(0.1..0.4),
    };
    for i in 1..=n {
        nodes.push(node(format!("F{i}"), NodeKind::Consumer, Side::Feed));
        nodes.push(node(format!("R{i}"), NodeKind::Consumer, Side::Return));
        let parent = rng.gen_range(0..i);
        pipes.push(pipe(&mut rng, format!("PF{i}"), format!("F{parent}"), format!("F{i}")));
        pipes.push(pipe(&mut rng, format!("PR{i}"), format!("R{i}"), format!("R{parent}")));
        consumers.push(ConsumerRecord { id: format!("C{i}"), from: format!("F{i}"), to: format!("R{i}"), ua_w_per_k: None, valve_min_pa_s2_m6: None, valve_max_pa_s2_m6: None });
    }
    if n >= 3 && rng.gen_bool(0.6) {
        // Loop between two consumers on both sides.
        let a = rng.gen_range(1..n);
        let b = rng.gen_range(a + 1..=n);
        pipes.push(pipe(&mut rng, "LF".into(), format!("F{a}"), format!("F{b}")));
        pipes.push(pipe(&mut rng, "LR".into(), format!("R{b}"), format!("R{a}")));
    }
    let producer = |id: &str, technology, lo, hi| ProducerRecord {
        id: id.into(),
        from: "R0".into(),
        to: "F0".into(),
        technology,
        p_max_w: Some(1.0e6),
        a_max_m2: None,
        supply_min_c: Some(lo),
        supply_max_c: Some(hi),
        flow_max_m3_s: None,
        hx_ua_w_per_m2_k: None,
    };
    let mut producers = vec![producer("GB", Technology::GB, 50.0, 90.0)];
    if rng.gen_bool(0.5) {
        producers.push(producer("HP", Technology::HP, 40.0, 70.0));
    }
    let desc = NetworkDescription { schema: NETWORK_SCHEMA.into(), nodes, pipes, consumers, producers };
    build_graph(&desc).unwrap()
}

/// Two positive-weight periods with random drivers for `n` consumers.
pub fn random_periods(seed: u64, n: usize) -> dhn_retrofit::periods::PeriodSet {
    use dhn_retrofit::periods::*;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let w = rng.gen_range(0.3..0.7);
    let periods = [w, 1.0 - w]
        .into_iter()
        .map(|weight| PeriodEnvironment {
            t_inf: rng.gen_range(-5.0..12.0),
            g_irr: rng.gen_range(0.0..300.0),
            demand: (0..n).map(|_| rng.gen_range(10.0e3..60.0e3)).collect(),
            weight,
        })
        .collect();
    PeriodSet { periods, peak: None, active_hours: 8208.0, excluded_fraction: 0.063 }
}

/// Random problem with the desk scenario's prices.
pub fn random_problem(seed: u64) -> Problem {
    let graph = random_network(seed);
    let periods = random_periods(seed, graph.n_consumers());
    let scenario = read_scenario(&fixture("desk").join("scenario.toml")).unwrap();
    Problem::new(graph, scenario, periods).unwrap()
}

/// Copy of a fixture manifest with absolute input paths, writing into `out`.
pub fn manifest_in(fixture_name: &str, out: &std::path::Path, extra: &str) -> PathBuf {
    let dir = fixture(fixture_name);
    let text = std::fs::read_to_string(dir.join("manifest.toml")).unwrap();
    let mut lines: Vec<String> = Vec::new();
    for line in text.lines() {
        let key = line.split('=').next().unwrap().trim();
        match key {
            "network" | "scenario" | "periods" => {
                let file = line.split('"').nth(1).unwrap();
                lines.push(format!("{key} = {:?}", dir.join(file).display().to_string()));
            }
            "output" => lines.push(format!("output = {:?}", out.join("out").display().to_string())),
            _ => lines.push(line.to_string()),
        }
    }
    let text = format!("{}\n{extra}", lines.join("\n"));
    let path = out.join("manifest.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// Worst (mass, mixing, loop pressure) imbalance over all periods.
pub fn imbalances(p: &Problem, design: &dhn_retrofit::design::DesignVector, states: &[dhn_retrofit::state::StateSlice]) -> (f64, f64, f64) {
    let g = &p.graph;
    let sl = p.state_layout;
    let phys = &p.scenario.physics;
    let (mut mass, mut mix, mut loops) = (0.0f64, 0.0f64, 0.0f64);
    for (t, st) in states.iter().enumerate() {
        let x = &st.values;
        let q: Vec<f64> = (0..g.n_edges()).map(|e| x[sl.q(e)]).collect();
        let q_scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut net = vec![0.0; g.n_nodes()];
        let mut inflow = vec![0.0; g.n_nodes()];
        let mut heat_in = vec![0.0; g.n_nodes()];
        for (e, edge) in g.edges.iter().enumerate() {
            net[edge.to] += q[e];
            net[edge.from] -= q[e];
            let down = if q[e] >= 0.0 { edge.to } else { edge.from };
            inflow[down] += q[e].abs();
            heat_in[down] += q[e].abs() * x[sl.theta_exit(e)];
        }
        for n in 0..g.n_nodes() {
            mass = mass.max(net[n].abs() / q_scale);
            if inflow[n] > 1e-7 {
                mix = mix.max((x[sl.theta_node(n)] - heat_in[n] / inflow[n]).abs());
            }
        }
        let d = design.local(t);
        // Pressure drop of each edge from its own law; producers close on node pressures.
        let drop = |e: usize| match &g.edges[e].kind {
            dhn_retrofit::network::EdgeKind::Pipe(pipe) => dhn_retrofit::solver::friction::pipe_pressure_drop(pipe, q[e], phys.density, phys.viscosity).0,
            dhn_retrofit::network::EdgeKind::Consumer(_) => {
                let c = g.consumers.iter().position(|&k| k == e).unwrap();
                let alpha = d[p.layout.local_alpha(c)];
                alpha * q[e] * (q[e] * q[e] + dhn_retrofit::problem::VALVE_FLOW_SMOOTHING * dhn_retrofit::problem::VALVE_FLOW_SMOOTHING).sqrt()
            }
            dhn_retrofit::network::EdgeKind::Producer(_) => x[sl.p(g.edges[e].from)] - x[sl.p(g.edges[e].to)],
        };
        for cycle in g.fundamental_cycles() {
            let s: f64 = cycle.iter().map(|&(e, o)| o * drop(e)).sum();
            loops = loops.max(s.abs());
        }
    }
    (mass, mix, loops)
}

//! File round trips, manifest handling and sweep export.

mod common;

use approx::assert_relative_eq;
use dhn_retrofit::io::{design_to_string, parse_design, parse_periods, periods_to_string, read_design, read_network, read_periods};
use dhn_retrofit::optimizer::{evaluate_design, initial_design};
use dhn_retrofit::problem::Problem;
use dhn_retrofit::runner::{export_results, run_scenario, PointStatus, RunBundle, RunManifest, SweepPoint};
use dhn_retrofit::solver::SolverOptions;
use std::fs;

#[test]
fn star_fixture_counts() {
    let g = read_network(&common::fixture("star5").join("network.toml")).unwrap();
    assert_eq!((g.n_nodes(), g.n_edges()), (12, 11));
    assert_eq!((g.n_consumers(), g.n_producers()), (5, 1));
}

#[test]
fn exported_design_and_periods_reproduce_objective() {
    let p = common::desk();
    let opts = SolverOptions::default();
    let d = initial_design(&p, &opts);
    let (_, j, _, _) = evaluate_design(&p, &d, &opts).unwrap();

    let periods = parse_periods(&periods_to_string(&p.periods).unwrap(), "periods").unwrap();
    assert_eq!(periods, p.periods);
    let d2 = parse_design(&design_to_string(&p.graph, &d), "design", p.layout).unwrap();
    assert_eq!(d2.values, d.values);
    let p2 = Problem::new(p.graph.clone(), p.scenario.clone(), periods).unwrap();
    let (_, j2, _, _) = evaluate_design(&p2, &d2, &opts).unwrap();
    assert_relative_eq!(j2, j, max_relative = 1e-9);
}

#[test]
fn manifest_rejects_negative_sweep_and_missing_files() {
    let tmp = tempfile::tempdir().unwrap();
    let m = common::manifest_in("pair", tmp.path(), "");
    let text = fs::read_to_string(&m).unwrap();
    fs::write(&m, text.replace("sweep = [0.0, 0.3]", "sweep = [0.0, -0.1]")).unwrap();
    assert!(RunManifest::load(&m).is_err());
    fs::write(&m, text.replace("periods.toml", "missing.toml")).unwrap();
    assert!(RunManifest::load(&m).is_err());
    fs::write(&m, &text).unwrap();
    assert!(RunManifest::load(&m).is_ok());
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs() {
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir().unwrap();
        let m = RunManifest::load(&common::manifest_in("pair", tmp.path(), "")).unwrap();
        let bundle = run_scenario(&m).unwrap();
        assert_eq!(bundle.points.len(), 2);
        export_results(&bundle, &m.output_dir()).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        let mut stack = vec![m.output_dir()];
        while let Some(dir) = stack.pop() {
            for e in fs::read_dir(dir).unwrap() {
                let path = e.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(m.output_dir()).unwrap().display().to_string();
                    files.push((rel, fs::read(&path).unwrap()));
                }
            }
        }
        files.sort();
        outputs.push(files);
    }
    assert!(outputs[0].len() > 10);
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exported_design_reloads_and_shares_sum_to_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = common::manifest_in("pair", tmp.path(), "");
    let text = fs::read_to_string(&path).unwrap().replace("sweep = [0.0, 0.3]", "sweep = []");
    fs::write(&path, text).unwrap();
    let m = RunManifest::load(&path).unwrap();
    let bundle = run_scenario(&m).unwrap();
    assert_eq!(bundle.points.len(), 1, "empty sweep runs once");
    let out = m.output_dir();
    export_results(&bundle, &out).unwrap();
    let r = bundle.points[0].result().unwrap();
    let p = &bundle.points[0].problem;

    let d = read_design(&out.join("point_0/design.csv"), p.layout).unwrap();
    let periods = read_periods(&out.join("periods.toml")).unwrap();
    let p2 = Problem::new(p.graph.clone(), p.scenario.clone(), periods).unwrap();
    let (_, j, _, _) = evaluate_design(&p2, &d, &SolverOptions::default()).unwrap();
    assert_relative_eq!(j, r.objective, max_relative = 1e-9);

    let text = fs::read_to_string(out.join("point_0/operation.csv")).unwrap();
    let mut sums = std::collections::BTreeMap::<String, f64>::new();
    for line in text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        *sums.entry(cols[0].to_string()).or_default() += cols[6].parse::<f64>().unwrap();
    }
    assert_eq!(sums.len(), p.n_periods());
    for (t, s) in sums {
        assert!((s - 1.0).abs() <= 1e-9, "period {t}: shares sum to {s}");
    }
}

#[test]
fn failed_point_is_flagged_and_export_still_written() {
    let tmp = tempfile::tempdir().unwrap();
    let m = RunManifest::load(&common::manifest_in("pair", tmp.path(), "")).unwrap();
    let mut bundle: RunBundle = run_scenario(&m).unwrap();
    let good = bundle.points[0].clone();
    bundle.points.push(SweepPoint { co2_price: 1.0, problem: good.problem.clone(), outcome: Err("forward solve failed".into()) });
    assert!(!bundle.complete());
    assert_eq!(bundle.points[2].status(), PointStatus::Failed);
    let out = m.output_dir();
    export_results(&bundle, &out).unwrap();
    let table = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    let last = table.lines().last().unwrap();
    assert!(last.starts_with("2,1,failed,"), "{last}");
    assert!(out.join("point_0/design.csv").is_file());
    assert!(!out.join("point_2").exists());
    let json = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(json.contains("forward solve failed"));
}

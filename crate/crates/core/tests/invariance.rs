//! Period independence: reordering periods reorders results bit for bit.

mod common;

use dhn_retrofit::optimizer::{initial_design, objective_gradient};
use dhn_retrofit::solver::{check_reports, solve_all_periods, SolverOptions};

#[test]
fn permuting_periods_permutes_states_and_gradient_bitwise() {
    let p = common::desk();
    let opts = SolverOptions::default();
    let d = initial_design(&p, &opts);
    let (x, reports) = solve_all_periods(&p, &d, None, &opts);
    check_reports(&reports).unwrap();
    let (_, g) = objective_gradient(&p, &d, &x).unwrap();

    for order in [[2usize, 0, 3, 1], [3, 2, 1, 0], [1, 3, 0, 2]] {
        let pp = p.permuted(&order).unwrap();
        let dp = d.select_periods(&order).unwrap();
        let (xp, reports) = solve_all_periods(&pp, &dp, None, &opts);
        check_reports(&reports).unwrap();
        let (_, gp) = objective_gradient(&pp, &dp, &xp).unwrap();
        let l = p.layout;
        for (i, &t) in order.iter().enumerate() {
            assert_eq!(xp[i].values, x[t].values, "state of period {t}");
            assert_eq!(&gp[l.alpha_range(i).start..l.tau_range(i).end], &g[l.alpha_range(t).start..l.tau_range(t).end]);
        }
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&gp[l.phi_range()]), bits(&g[l.phi_range()]), "capacity gradient under {order:?}");
    }
}

#[test]
fn identical_periods_give_identical_states() {
    let p = common::desk();
    let env = p.periods.periods[0].clone();
    let mut set = p.periods.clone();
    set.periods = vec![env.clone(), env.clone(), env.clone(), env];
    for e in &mut set.periods {
        e.weight = 0.25;
    }
    set.peak = None;
    let p = dhn_retrofit::problem::Problem::new(p.graph.clone(), p.scenario.clone(), set).unwrap();
    let opts = SolverOptions::default();
    let d = initial_design(&p, &opts);
    let (x, _) = solve_all_periods(&p, &d, None, &opts);
    for t in 1..4 {
        assert_eq!(x[t].values, x[0].values);
    }
}

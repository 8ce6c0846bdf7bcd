//! Forward solver: per-period steady-state thermo-hydraulic model.
//!
//! Closures:
//!
//! - pipes: Darcy-Weisbach with the Haaland friction factor, laminar below
//!   Re = 2000 and a C¹ blend up to Re = 3000; exponential heat loss towards
//!   ambient with the flow floored at `flow_floor`;
//! - consumers: quadratic valve loss `α q |q|` (smoothed at zero flow) and a
//!   counter-flow substation exchanger against the radiator circuit;
//! - producers: imposed inflow, and either an imposed supply temperature or,
//!   for solar thermal, a counter-flow exchanger against the collector loop.

pub mod friction;
pub mod model;
pub mod newton;

pub use model::{Assembly, PeriodModel, PeriodOutputs, Quantity, Triplets};
pub use newton::{check_reports, cold_start, dense, lu_solve, solve_all_periods, solve_period, SolveReport, SolverOptions};

use crate::problem::Problem;

/// Residual of period `t` for a local design slice and a state slice.
pub fn residual(problem: &Problem, t: usize, d: &[f64], x: &[f64]) -> crate::Result<Vec<f64>> {
    if x.len() != problem.state_layout.len() || d.len() != problem.layout.local_len() {
        return Err(crate::Error::ShapeMismatch("residual: state or design slice has the wrong length".into()));
    }
    let r = PeriodModel::new(problem, t).residual(d, x);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(crate::Error::NonFinite(format!("residual of period {t}")));
    }
    Ok(r)
}

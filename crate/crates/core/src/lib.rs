//! Multi-period producer retrofit optimization for existing district heating
//! networks.
//!
//! The crate couples a steady-state thermo-hydraulic network model with
//! producer cost and efficiency models, and optimizes producer capacities,
//! per-period inflows, valve settings and supply temperatures with an
//! augmented Lagrangian method driven by adjoint gradients.
//!
//! Modules, bottom-up:
//!
//! - [`network`], [`scenario`], [`design`], [`state`], [`periods`]: data model.
//! - [`producers`]: efficiency, investment cost and solar thermal models.
//! - [`problem`]: per-period context derived from a scenario.
//! - [`solver`]: the per-period model equations and Newton solver.
//! - [`economics`], [`constraints`]: objective and technological constraints.
//! - [`optimizer`]: adjoint gradients, projected L-BFGS, augmented Lagrangian.
//! - [`timeagg`]: representative periods from hourly series.
//! - [`io`], [`runner`]: file formats, scenario runs and result export.

pub mod constraints;
pub mod design;
pub mod economics;
pub mod error;
pub mod io;
pub mod network;
pub mod optimizer;
pub mod periods;
pub mod problem;
pub mod producers;
pub mod runner;
pub mod scenario;
pub mod solver;
pub mod state;
pub mod timeagg;

pub use error::{Error, Result};

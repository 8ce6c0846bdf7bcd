//! Design optimization.
//!
//! Gradients of the cost and constraints come from per-period adjoint solves
//! ([`adjoint`]); the box-constrained subproblems are solved by projected
//! L-BFGS ([`lbfgs`]) inside an augmented Lagrangian loop ([`auglag`]) over
//! scaled variables ([`scaling`]).

pub mod adjoint;
pub mod auglag;
pub mod init;
pub mod lbfgs;
pub mod scaling;

pub use adjoint::{objective_gradient, PeriodTerms};
pub use auglag::{evaluate_design, is_better, optimize, optimize_from, outer_solve, reference_cost, AugLagState, Merit, OptimizationResult, OptimizerOptions, TraceRecord};
pub use init::initial_design;
pub use lbfgs::{inner_solve, InnerStatus, LbfgsOptions};
pub use scaling::Scaling;

//! Decentralized primal-dual subgradient method.
//!
//! The rows coupling a hyperarc's own variables (coding, arc-sum, aggregate,
//! capacity, budget) are priced by multipliers. For fixed prices the
//! Lagrangian splits into one small box problem per hyperarc plus one
//! shortest-path problem per commodity, so every hyperarc can be handled by
//! its sender. Flow conservation is kept exactly by projecting arc flows
//! onto each commodity's flow polytope.

mod dual;
mod iterate;
mod layout;
mod projection;
mod repair;
mod slater;
mod solve;
mod subproblem;

pub use dual::DualPoint;
pub use iterate::{estimate_lipschitz, relative_gap,
    accumulate, iterate, point_residual, row_slacks, value_from_reduced, IterationState, StepRule, TraceRow,
};
pub use layout::{ChainLayout, HyperarcInfo, Layout, DUAL_CAP_FACTOR};
pub use projection::{project_flows, FlowPolytope, Projection};
pub use repair::{blend_into_budget, repair, Incumbents, Repaired};
pub use slater::{slater_check, Slater, SLATER_TOL};
pub use solve::{solve_pdsg, write_trace, write_trace_file, PdsgOptions, PdsgStatus, SolveReport, TRACE_HEADER};
pub use subproblem::{
    arc_prices, constant_term, dual_value, refine_dual, dual_value_direct, eval_subproblem, hyperarc_reduced_costs,
    reduced_costs, routing_value, DualValue, HyperarcBlock, Subproblem,
};

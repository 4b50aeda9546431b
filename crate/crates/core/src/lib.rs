//! Investment planning for oil and gas fields split into clusters.
//!
//! Each cluster may launch at most one of its candidate development projects.
//! The planner maximises total profit under a total investment budget and a
//! yearly production cap, in two stages:
//!
//! 1. [`knapsack::stage_one`] distributes the budget by dynamic programming,
//!    ignoring the caps, and fixes one project per cluster;
//! 2. [`local_search::run_pipeline`] then delays launches so that the caps
//!    hold, packing projects greedily in a launch order improved by pairwise
//!    exchanges.
//!
//! [`oracle`] holds exhaustive solvers for small instances and an LP-format
//! exporter for external MILP solvers; [`generator`] builds seeded random
//! benchmark instances; [`bench`] runs the whole thing and reports metrics.

pub mod bench;
pub mod error;
pub mod generator;
pub mod knapsack;
pub mod local_search;
pub mod model;
pub mod oracle;
pub mod scheduler;

pub use error::{PlanError, Result};

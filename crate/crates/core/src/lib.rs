//! Design of potential-based flow networks.
//!
//! Given a network of candidate arcs, node balances and bounds on the node
//! potentials, choose a cheapest set of arcs to build so that the induced
//! flow keeps every potential within its bounds. The crate provides the flow
//! solver, the disjoint-cut inequalities with an exact separation routine,
//! a small dense simplex, and a branch-and-cut design solver.

pub mod flow;
pub mod model;
pub mod lp;
pub mod inequality;
pub mod separation;
pub mod exhaustive;
pub mod generate;
pub mod solver;
pub mod format;

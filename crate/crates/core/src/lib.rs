//! Fine-grained reductions from OuMv, CNF-SAT and TC* to incremental
//! matching, max-flow and diameter, with reference oracles and an
//! instrumented dynamic graph for counting operations.

pub mod amortization;
pub mod diameter;
pub mod dyngraph;
pub mod error;
pub mod flow;
pub mod instances;
pub mod matching;
pub mod oracles;
pub mod reduction;

pub use dyngraph::{DynGraph, GraphKind, OpCounters};
pub use error::{Error, Result};
pub use flow::FlowEngine;
pub use matching::MatchingEngine;

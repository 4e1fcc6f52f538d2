//! The three reductions: OuMv to matching, CNF-SAT to max-flow, TC* to diameter.

pub mod diameter;
pub mod flow;
pub mod matching;

//! CNF-SAT through incremental s-t max-flow, plus the unit-capacity
//! bipartite-matching-to-flow construction.
//!
//! One node per assignment of each variable half (`A`, `B`, `N` each) and one
//! per clause. `a -> c` (capacity `N`) when `a` leaves `c` unsatisfied,
//! `c -> b` (capacity 1) likewise, and `b -> t` (capacity 1). Phase `i`
//! (1-based) adds `s -> a_i`, queries, then adds the shortcut `a_i -> t`.
//! The query returns less than `i * N` exactly when `a_i` extends to a
//! satisfying assignment.

use serde::{Deserialize, Serialize};

use crate::dyngraph::{DynGraph, NodeId, OpCounters};
use crate::error::{Error, Result};
use crate::flow::FlowEngine;
use crate::instances::CnfFormula;
use crate::oracles::{BipartiteGraph, FlowNetwork, Side};

/// Largest variable count the gadget accepts (`N <= 1024`).
pub const FLOW_VAR_GUARD: usize = 20;

#[derive(Debug, Clone)]
pub struct FlowGadget {
    formula: CnfFormula,
    big_n: i64,
    /// `a[k]` is the node of the first-half assignment whose little-endian
    /// integer value is `k`.
    pub a: Vec<NodeId>,
    pub b: Vec<NodeId>,
    pub c: Vec<NodeId>,
    engine: FlowEngine,
    completed: usize,
    query_positions: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowPhase {
    /// 1-based phase index.
    pub phase: usize,
    /// Flow value just before the phase began.
    pub pre_value: i64,
    pub value: i64,
    /// `value < phase * N`: this phase proves satisfiability.
    pub hint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRun {
    pub satisfiable: bool,
    pub big_n: i64,
    pub phases: Vec<FlowPhase>,
    pub counters: OpCounters,
    pub decremental: bool,
}

pub fn build_flow_base(formula: &CnfFormula) -> Result<FlowGadget> {
    if formula.num_vars() > FLOW_VAR_GUARD {
        return Err(Error::Guard(format!(
            "{} variables exceeds the flow gadget limit {FLOW_VAR_GUARD}",
            formula.num_vars()
        )));
    }
    let half = formula.half();
    let count = 1usize << half;
    let big_n = count as i64;
    let mut engine = FlowEngine::new();
    let a: Vec<_> = (0..count).map(|_| engine.add_node()).collect();
    let b: Vec<_> = (0..count).map(|_| engine.add_node()).collect();
    let c: Vec<_> = formula.clauses().iter().map(|_| engine.add_node()).collect();
    for (k, &a_node) in a.iter().enumerate() {
        for (clause, &c_node) in formula.clauses().iter().zip(&c) {
            if !formula.first_half_satisfies(clause, k as u64) {
                engine.insert_edge(a_node, c_node, big_n)?;
            }
        }
    }
    for (clause, &c_node) in formula.clauses().iter().zip(&c) {
        for (k, &b_node) in b.iter().enumerate() {
            if !formula.second_half_satisfies(clause, k as u64) {
                engine.insert_edge(c_node, b_node, 1)?;
            }
        }
    }
    let t = engine.sink();
    for &b_node in &b {
        engine.insert_edge(b_node, t, 1)?;
    }
    Ok(FlowGadget {
        formula: formula.clone(),
        big_n,
        a,
        b,
        c,
        engine,
        completed: 0,
        query_positions: Vec::new(),
    })
}

impl FlowGadget {
    pub fn big_n(&self) -> i64 {
        self.big_n
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn engine(&self) -> &FlowEngine {
        &self.engine
    }

    pub fn phases_done(&self) -> usize {
        self.completed
    }

    /// Whether every B node is reachable from the next phase's `a_i` in the
    /// current graph.
    pub fn all_b_reachable_from(&self, a_index: usize) -> bool {
        let seen = self.engine.reachable_from(self.a[a_index]);
        self.b.iter().all(|&b| seen[b])
    }

    pub fn run_flow_phase(&mut self) -> Result<FlowPhase> {
        if self.completed >= self.a.len() {
            return Err(Error::PhasesExhausted(self.a.len()));
        }
        let phase = self.completed + 1;
        let a_i = self.a[self.completed];
        let (s, t) = (self.engine.source(), self.engine.sink());
        let pre_value = self.engine.current_value();
        self.engine.insert_edge(s, a_i, self.big_n)?;
        self.query_positions.push(self.engine.graph().log().len());
        let value = self.engine.value();
        self.engine.insert_edge(a_i, t, self.big_n)?;
        self.completed = phase;
        let target = (phase as i64).checked_mul(self.big_n).ok_or(Error::Overflow)?;
        Ok(FlowPhase { phase, pre_value, value, hint: value < target })
    }
}

/// Decide satisfiability by the phase protocol. Without `early_exit` all
/// `N` phases run; with it the run stops at the first phase whose value
/// falls short.
pub fn solve_sat_via_flow(formula: &CnfFormula, early_exit: bool) -> Result<FlowRun> {
    let mut gadget = build_flow_base(formula)?;
    let mut phases = Vec::with_capacity(gadget.a.len());
    let mut satisfiable = false;
    while gadget.completed < gadget.a.len() {
        let p = gadget.run_flow_phase()?;
        phases.push(p);
        satisfiable |= p.hint;
        if satisfiable && early_exit {
            break;
        }
    }
    Ok(FlowRun {
        satisfiable,
        big_n: gadget.big_n,
        phases,
        counters: gadget.engine.graph().op_count(),
        decremental: false,
    })
}

/// Decremental variant: delete the incremental run's insertions in reverse
/// order and recompute the flow from scratch whenever the graph returns to
/// a queried state. Phases are reported in deletion order.
pub fn solve_sat_decremental(formula: &CnfFormula) -> Result<FlowRun> {
    let mut gadget = build_flow_base(formula)?;
    let mut pre_values = Vec::new();
    while gadget.completed < gadget.a.len() {
        pre_values.push(gadget.run_flow_phase()?.pre_value);
    }
    let (s, t) = (gadget.engine.source(), gadget.engine.sink());
    let mut graph: DynGraph = gadget.engine.graph().clone();
    graph.reset_counters();
    let positions = gadget.query_positions.clone();
    let schedule = graph.reverse_replay();
    let mut pending = (0..positions.len()).rev().peekable();
    let mut phases = Vec::new();
    let mut satisfiable = false;
    for deletion in &schedule {
        graph.apply_deletion(deletion)?;
        while let Some(&k) = pending.peek() {
            if positions[k] != graph.log().len() {
                break;
            }
            let fresh = FlowEngine::from_graph(&graph, s, t)?;
            graph.charge(fresh.graph().op_count().elementary_steps);
            graph.record_query();
            let phase = k + 1;
            let value = fresh.current_value();
            let hint = value < phase as i64 * gadget.big_n;
            satisfiable |= hint;
            phases.push(FlowPhase { phase, pre_value: pre_values[k], value, hint });
            pending.next();
        }
    }
    Ok(FlowRun { satisfiable, big_n: gadget.big_n, phases, counters: graph.op_count(), decremental: true })
}

/// Unit-capacity network: `s -> left`, `left -> right` per edge, `right -> t`.
/// Original node `x` keeps handle `x`; `s` and `t` are appended.
pub fn matching_to_st_flow(g: &BipartiteGraph) -> Result<FlowNetwork> {
    g.check()?;
    let n = g.sides.len();
    let (s, t) = (n, n + 1);
    let mut arcs = Vec::with_capacity(n + g.edges.len());
    for (x, side) in g.sides.iter().enumerate() {
        match side {
            Side::Left => arcs.push((s, x, 1)),
            Side::Right => arcs.push((x, t, 1)),
        }
    }
    arcs.extend(g.oriented_edges().map(|(l, r)| (l, r, 1)));
    Ok(FlowNetwork { node_count: n + 2, arcs, s, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Literal;
    use crate::oracles::{max_flow_oracle, max_matching_oracle, sat_oracle};

    fn cnf(vars: usize, clauses: &[&[i64]]) -> CnfFormula {
        let lit = |l: i64| if l > 0 { Literal::pos(l as usize - 1) } else { Literal::neg((-l) as usize - 1) };
        CnfFormula::new(vars, clauses.iter().map(|c| c.iter().map(|&l| lit(l)).collect()).collect()).unwrap()
    }

    #[test]
    fn empty_formula_base() {
        let g = build_flow_base(&cnf(2, &[])).unwrap();
        assert_eq!(g.big_n(), 2);
        assert!(g.c.is_empty());
        assert_eq!(g.engine().graph().edge_count(), 2);
        assert_eq!(g.engine().graph().node_count(), 2 * 2 + 2);
        assert_eq!(g.engine().current_value(), 0);
    }

    #[test]
    fn contradiction_edges() {
        // (x0) & (!x0) over 2 vars: x0 in A, x1 in B.
        let f = cnf(2, &[&[1], &[-1]]);
        let g = build_flow_base(&f).unwrap();
        let graph = g.engine().graph();
        // a-node 0 (x0=0) fails clause (x0); a-node 1 fails (!x0)
        assert!(graph.has_edge(g.a[0], g.c[0]));
        assert!(!graph.has_edge(g.a[0], g.c[1]));
        assert!(graph.has_edge(g.a[1], g.c[1]));
        assert!(!graph.has_edge(g.a[1], g.c[0]));
        // no B variables: every b fails both clauses
        for &b in &g.b {
            assert!(graph.has_edge(g.c[0], b) && graph.has_edge(g.c[1], b));
        }
    }

    #[test]
    fn empty_formula_first_phase() {
        let mut g = build_flow_base(&cnf(2, &[])).unwrap();
        let p = g.run_flow_phase().unwrap();
        assert_eq!(p, FlowPhase { phase: 1, pre_value: 0, value: 0, hint: true });
    }

    #[test]
    fn unsatisfiable_phases_hit_target() {
        let f = cnf(4, &[&[1], &[-1], &[2], &[-2]]);
        assert!(!sat_oracle(&f).unwrap());
        let run = solve_sat_via_flow(&f, false).unwrap();
        assert!(!run.satisfiable);
        for p in &run.phases {
            assert_eq!(p.value, p.phase as i64 * run.big_n);
            assert_eq!(p.pre_value, (p.phase as i64 - 1) * run.big_n);
        }
    }

    #[test]
    fn satisfiable_xor_fires() {
        let f = cnf(2, &[&[1, 2], &[-1, -2]]);
        let run = solve_sat_via_flow(&f, false).unwrap();
        assert!(run.satisfiable);
        assert!(run.phases.iter().any(|p| p.hint));
        assert_eq!(run.phases.len(), 2);
        let early = solve_sat_via_flow(&f, true).unwrap();
        assert!(early.satisfiable);
        assert_eq!(early.phases.len(), 1);
    }

    #[test]
    fn decremental_matches_incremental() {
        let f = crate::instances::gen_cnf(6, 12, 3, 4).unwrap();
        let inc = solve_sat_via_flow(&f, false).unwrap();
        let dec = solve_sat_decremental(&f).unwrap();
        assert_eq!(inc.satisfiable, dec.satisfiable);
        let mut rev = inc.phases.clone();
        rev.reverse();
        assert_eq!(dec.phases, rev);
    }

    #[test]
    fn guard_rejects_large_formulas() {
        let f = CnfFormula::new(22, vec![]).unwrap();
        assert!(matches!(build_flow_base(&f), Err(Error::Guard(_))));
    }

    #[test]
    fn bipartite_bridge_small_cases() {
        let empty = BipartiteGraph::default();
        assert_eq!(max_flow_oracle(&matching_to_st_flow(&empty).unwrap()).unwrap(), 0);
        let k = 3;
        let disjoint = BipartiteGraph {
            sides: (0..2 * k).map(|x| if x < k { Side::Left } else { Side::Right }).collect(),
            edges: (0..k).map(|i| (k + i, i)).collect(),
        };
        let net = matching_to_st_flow(&disjoint).unwrap();
        assert_eq!(max_flow_oracle(&net).unwrap(), 3);
        assert_eq!(max_matching_oracle(&disjoint).unwrap(), 3);
        let bad = BipartiteGraph { sides: vec![Side::Right, Side::Right], edges: vec![(0, 1)] };
        assert!(matching_to_st_flow(&bad).is_err());
    }
}

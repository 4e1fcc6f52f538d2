//! OuMv through incremental bipartite matching.
//!
//! Six families `S, A, B, C, D, T` of `n` (left, right) node pairs. The base
//! graph pairs up `A, B, C, D` and links `b^r_i - c^l_j` whenever
//! `M[i][j] = 1`. Phase `i` wires `u^i` into `A_i -> B` and `v^i` into
//! `C -> D_i`, attaches `s^r_i` and `t^l_i`, and queries: the maximum matching
//! is `4n + 2i + 1` exactly when `(u^i)^T M v^i = 1`, and `4n + 2i` otherwise.
//! Every node labelled left sits on one side of the bipartition, every right
//! node on the other.

use serde::{Deserialize, Serialize};

use crate::dyngraph::{NodeId, OpCounters};
use crate::error::{Error, Result};
use crate::instances::{BitMatrix, OuMvInstance};
use crate::matching::MatchingEngine;
use crate::oracles::Side;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodePair {
    pub left: NodeId,
    pub right: NodeId,
}

#[derive(Debug, Clone)]
pub struct MatchGadget {
    n: usize,
    pub s: Vec<NodePair>,
    pub a: Vec<NodePair>,
    pub b: Vec<NodePair>,
    pub c: Vec<NodePair>,
    pub d: Vec<NodePair>,
    pub t: Vec<NodePair>,
    engine: MatchingEngine,
    phase: usize,
    query_positions: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseOutcome {
    pub phase: usize,
    pub size: usize,
    pub bit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRun {
    /// One bit per query, in the order the queries were issued.
    pub bits: Vec<bool>,
    pub sizes: Vec<usize>,
    pub counters: OpCounters,
    pub decremental: bool,
}

/// Size the matching must have before phase `i`.
pub fn base_size(n: usize, phase: usize) -> usize {
    4 * n + 2 * phase
}

pub fn build_match_base(m: &BitMatrix) -> MatchGadget {
    let n = m.n();
    let mut engine = MatchingEngine::new();
    let family = |engine: &mut MatchingEngine| -> Vec<NodePair> {
        (0..n)
            .map(|_| NodePair { left: engine.add_node(Side::Left), right: engine.add_node(Side::Right) })
            .collect()
    };
    let s = family(&mut engine);
    let a = family(&mut engine);
    let b = family(&mut engine);
    let c = family(&mut engine);
    let d = family(&mut engine);
    let t = family(&mut engine);
    for fam in [&a, &b, &c, &d] {
        for pair in fam {
            engine.insert_edge(pair.left, pair.right).expect("fresh pair edge");
        }
    }
    for (i, bi) in b.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            if m.get(i, j) {
                engine.insert_edge(bi.right, cj.left).expect("fresh matrix edge");
            }
        }
    }
    MatchGadget { n, s, a, b, c, d, t, engine, phase: 0, query_positions: Vec::new() }
}

impl MatchGadget {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn engine(&self) -> &MatchingEngine {
        &self.engine
    }

    /// Log lengths at which each phase's query was issued.
    pub fn query_positions(&self) -> &[usize] {
        &self.query_positions
    }

    pub fn run_match_phase(&mut self, u: &[bool], v: &[bool]) -> Result<PhaseOutcome> {
        let (n, i) = (self.n, self.phase);
        if i >= n {
            return Err(Error::PhasesExhausted(n));
        }
        for len in [u.len(), v.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, got: len });
            }
        }
        for j in (0..n).filter(|&j| u[j]) {
            self.engine.insert_edge(self.a[i].right, self.b[j].left)?;
        }
        for j in (0..n).filter(|&j| v[j]) {
            self.engine.insert_edge(self.c[j].right, self.d[i].left)?;
        }
        self.engine.insert_edge(self.s[i].right, self.a[i].left)?;
        self.engine.insert_edge(self.d[i].right, self.t[i].left)?;
        self.query_positions.push(self.engine.graph().log().len());
        let size = self.engine.size();
        self.engine.insert_edge(self.s[i].left, self.s[i].right)?;
        self.engine.insert_edge(self.t[i].left, self.t[i].right)?;
        self.phase += 1;
        Ok(PhaseOutcome { phase: i, size, bit: size == base_size(n, i) + 1 })
    }
}

/// Exact number of edge insertions the full reduction performs.
pub fn closed_form_insertions(inst: &OuMvInstance) -> u64 {
    let n = inst.n() as u64;
    let ones = |v: &[bool]| v.iter().filter(|&&b| b).count() as u64;
    let phases: u64 = inst.pairs().iter().map(|p| ones(&p.u) + ones(&p.v) + 4).sum();
    4 * n + inst.matrix().count_ones() as u64 + phases
}

fn run_all(inst: &OuMvInstance) -> Result<(MatchGadget, Vec<PhaseOutcome>)> {
    let mut gadget = build_match_base(inst.matrix());
    let outcomes = inst
        .pairs()
        .iter()
        .map(|pair| gadget.run_match_phase(&pair.u, &pair.v))
        .collect::<Result<Vec<_>>>()?;
    Ok((gadget, outcomes))
}

/// Answer every pair in order through the incremental engine.
pub fn solve_oumv_via_matching(inst: &OuMvInstance) -> Result<MatchRun> {
    let (gadget, outcomes) = run_all(inst)?;
    Ok(MatchRun {
        bits: outcomes.iter().map(|o| o.bit).collect(),
        sizes: outcomes.iter().map(|o| o.size).collect(),
        counters: gadget.engine.graph().op_count(),
        decremental: false,
    })
}

/// Decremental run: start from the final graph of the incremental
/// reduction and delete in reverse insertion order, querying whenever the
/// graph is back at a state where the incremental run queried. The bits come
/// out in reverse phase order.
pub fn solve_oumv_decremental(inst: &OuMvInstance) -> Result<MatchRun> {
    let (mut gadget, _) = run_all(inst)?;
    let n = gadget.n;
    let positions = gadget.query_positions.clone();
    gadget.engine.reset_counters();
    let schedule = gadget.engine.graph().reverse_replay();
    let mut pending = (0..positions.len()).rev().peekable();
    let mut bits = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(n);
    for deletion in &schedule {
        gadget.engine.apply_deletion(deletion)?;
        let len = gadget.engine.graph().log().len();
        while let Some(&phase) = pending.peek() {
            if positions[phase] != len {
                break;
            }
            let size = gadget.engine.size();
            bits.push(size == base_size(n, phase) + 1);
            sizes.push(size);
            pending.next();
        }
    }
    Ok(MatchRun { bits, sizes, counters: gadget.engine.graph().op_count(), decremental: true })
}

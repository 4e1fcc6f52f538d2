//! TC* through diameter: the graph `H_{gamma,k}(G)` and its drivers.
//!
//! `H_{gamma,k}` covers one block of A-colors. For each block color `i` it
//! holds rows `A_i = {a^i_0..a^i_{n-1}}` and `T_i = {t^i_0..t^i_{n-1}}`; the
//! B and C nodes of `G` are copied verbatim. `a^i_{i'}` is adjacent to every
//! `b^{i'}_{j,x}` that `a^i_j` reaches in `G`, and `t^i_{i'}` to every
//! `c^{i'}_{j,y}` that `a^i_j` reaches. A master node `u`, one skip node
//! `v_i` per color and connectors `w1, w2, w3` keep every other distance at
//! most 3, so `d(a^i_alpha, t^i_beta)` is 3 when colors `(i, alpha, beta)`
//! have a triangle and 4 otherwise.
//!
//! The scaffold also carries the edge `u - w3`. Without it a block holding a
//! single color leaves `d(v_i, t^i_beta) = 4` regardless of the instance.
//! The edge creates no path of length at most 3 between `A_i` and `T_i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amortization::CreditLedger;
use crate::diameter::{bfs, Distinguisher, ExactDistinguisher};
use crate::dyngraph::{DynGraph, LogEntry, NodeId, OpCounters};
use crate::error::{Error, Result};
use crate::instances::{Slot, TcStarInstance};
use crate::oracles::tcstar_oracle;

/// `ceil(n^gamma)`, clamped to `1..=n`.
pub fn block_size(n: usize, gamma: f64) -> usize {
    let raw = (n as f64).powf(gamma);
    ((raw - 1e-9).ceil() as usize).clamp(1, n.max(1))
}

/// Number of blocks needed to cover all `n` colors.
pub fn block_count(n: usize, gamma: f64) -> usize {
    n.div_ceil(block_size(n, gamma))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma {gamma} outside (0, 1]")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorNodes {
    pub a: Vec<NodeId>,
    pub t: Vec<NodeId>,
    pub skip: NodeId,
}

#[derive(Debug, Clone)]
pub struct HGraph {
    pub gamma: f64,
    pub k: usize,
    pub b_nodes: Vec<NodeId>,
    pub c_nodes: Vec<NodeId>,
    pub master: NodeId,
    pub w1: NodeId,
    pub w2: NodeId,
    pub w3: NodeId,
    /// Block colors currently present, keyed by color.
    pub colors: BTreeMap<usize, ColorNodes>,
    graph: DynGraph,
}

impl HGraph {
    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn into_graph(self) -> DynGraph {
        self.graph
    }

    /// Nodes the construction allocates for `colors` block colors.
    pub fn expected_node_count(inst: &TcStarInstance, colors: usize) -> usize {
        2 * inst.side_size() + 2 * inst.n * colors + colors + 4
    }

    fn b(&self, inst: &TcStarInstance, s: Slot) -> NodeId {
        self.b_nodes[inst.slot_index(s)]
    }

    fn c(&self, inst: &TcStarInstance, s: Slot) -> NodeId {
        self.c_nodes[inst.slot_index(s)]
    }

    /// Allocate B, C, u, w1, w2, w3.
    fn scaffold_nodes(inst: &TcStarInstance, gamma: f64, k: usize) -> Self {
        let mut graph = DynGraph::undirected();
        let b_nodes = (0..inst.side_size()).map(|_| graph.insert_node()).collect();
        let c_nodes = (0..inst.side_size()).map(|_| graph.insert_node()).collect();
        let w1 = graph.insert_node();
        let w2 = graph.insert_node();
        let w3 = graph.insert_node();
        let master = graph.insert_node();
        Self { gamma, k, b_nodes, c_nodes, master, w1, w2, w3, colors: BTreeMap::new(), graph }
    }

    fn edge(&mut self, u: NodeId, v: NodeId) {
        self.graph.insert_edge(u, v, None).expect("handles allocated by the builder");
    }

    fn scaffold_edges(&mut self) {
        let (w1, w2, w3, u) = (self.w1, self.w2, self.w3, self.master);
        self.edge(w1, w2);
        self.edge(w2, w3);
        self.edge(w2, u);
        self.edge(u, w3);
        for x in self.b_nodes.clone().into_iter().chain(self.c_nodes.clone()) {
            self.edge(w2, x);
        }
    }

    fn bc_edges(&mut self, inst: &TcStarInstance) {
        for &(b, c) in &inst.bc {
            let (bn, cn) = (self.b(inst, b), self.c(inst, c));
            self.edge(bn, cn);
        }
    }

    fn color_nodes(&mut self, inst: &TcStarInstance, i: usize) {
        let a = (0..inst.n).map(|_| self.graph.insert_node()).collect();
        let t = (0..inst.n).map(|_| self.graph.insert_node()).collect();
        let skip = self.graph.insert_node();
        self.colors.insert(i, ColorNodes { a, t, skip });
    }

    /// Edges of color `i` against itself, the scaffold, and every other
    /// color already present.
    fn color_edges(&mut self, inst: &TcStarInstance, i: usize) {
        let own = self.colors[&i].clone();
        let (w1, w3, u) = (self.w1, self.w3, self.master);
        for &a in &own.a {
            self.edge(w1, a);
        }
        for &t in &own.t {
            self.edge(w3, t);
        }
        self.edge(u, own.skip);
        for &a in &own.a {
            self.edge(own.skip, a);
        }
        let others: Vec<ColorNodes> =
            self.colors.iter().filter(|(&c, _)| c != i).map(|(_, nodes)| nodes.clone()).collect();
        for other in &others {
            for &t in &other.t {
                self.edge(own.skip, t);
            }
            for &t in &own.t {
                self.edge(other.skip, t);
            }
        }
        for color in 0..inst.n {
            for j in 0..inst.delta {
                let b = self.b(inst, Slot::new(color, j, inst.ab(i, j, color)));
                self.edge(own.a[color], b);
            }
        }
        for color in 0..inst.n {
            for j in 0..inst.delta {
                let c = self.c(inst, Slot::new(color, j, inst.ac(i, j, color)));
                self.edge(c, own.t[color]);
            }
        }
    }
}

/// Build `H_{gamma,k}`: every node first, then scaffold edges, B-C edges,
/// and per-color attachments in ascending color order.
pub fn build_h(inst: &TcStarInstance, gamma: f64, k: usize) -> Result<HGraph> {
    check_gamma(gamma)?;
    let size = block_size(inst.n, gamma);
    let count = block_count(inst.n, gamma);
    if k >= count {
        return Err(Error::InvalidParameter(format!("block index {k} out of range (have {count} blocks)")));
    }
    let colors: Vec<usize> = (k * size..((k + 1) * size).min(inst.n)).collect();
    let mut h = HGraph::scaffold_nodes(inst, gamma, k);
    for &i in &colors {
        h.color_nodes(inst, i);
    }
    h.scaffold_edges();
    h.bc_edges(inst);
    // Cross edges between colors are added once, by the later color.
    let all = std::mem::take(&mut h.colors);
    for &i in &colors {
        h.colors.insert(i, all[&i].clone());
        h.color_edges(inst, i);
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceMismatch {
    pub i: usize,
    pub alpha: usize,
    pub beta: usize,
    pub distance: Option<u32>,
    pub triangle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub checked: usize,
    pub mismatches: Vec<DistanceMismatch>,
}

/// Compare `d(a^i_alpha, t^i_beta)` with triangle existence for every block
/// color and every `(alpha, beta)`: 3 iff a triangle exists, else 4.
pub fn verify_h_distances(h: &HGraph, inst: &TcStarInstance) -> Result<LemmaReport> {
    let oracle = tcstar_oracle(inst)?;
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for (&i, nodes) in &h.colors {
        for alpha in 0..inst.n {
            let (dist, _) = bfs(&h.graph, nodes.a[alpha]);
            for beta in 0..inst.n {
                checked += 1;
                let triangle = oracle.witnesses.binary_search(&(i, alpha, beta)).is_err();
                let distance = dist[nodes.t[beta]];
                let expected = if triangle { 3 } else { 4 };
                if distance != Some(expected) {
                    mismatches.push(DistanceMismatch { i, alpha, beta, distance, triangle });
                }
            }
        }
    }
    Ok(LemmaReport { checked, mismatches })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceAudit {
    /// `None` when some pair is disconnected.
    pub max_distance: Option<u32>,
    /// Pairs outside the `(a^i_alpha, t^i_beta)` same-color form at
    /// distance above 3 (or unreachable).
    pub off_form_pairs_over_3: usize,
    /// Nodes at distance above 2 from the master among skip, connector, B
    /// and C nodes.
    pub master_far_scaffold: usize,
    pub master_eccentricity: Option<u32>,
}

/// All-pairs BFS audit of the global distance bounds.
pub fn audit_h_distances(h: &HGraph) -> DistanceAudit {
    let n = h.graph.node_count();
    let mut row_of: Vec<Option<(usize, bool)>> = vec![None; n];
    for (&i, nodes) in &h.colors {
        for &a in &nodes.a {
            row_of[a] = Some((i, true));
        }
        for &t in &nodes.t {
            row_of[t] = Some((i, false));
        }
    }
    let mut max_distance = Some(0);
    let mut off = 0;
    for src in 0..n {
        let (dist, _) = bfs(&h.graph, src);
        for (dst, d) in dist.iter().enumerate() {
            max_distance = match (max_distance, d) {
                (Some(a), Some(b)) => Some(a.max(*b)),
                _ => None,
            };
            let same_form = matches!(
                (row_of[src], row_of[dst]),
                (Some((i, true)), Some((j, false))) | (Some((i, false)), Some((j, true))) if i == j
            );
            if !same_form && d.is_none_or(|x| x > 3) {
                off += 1;
            }
        }
    }
    let (from_master, _) = bfs(&h.graph, h.master);
    let scaffold = h
        .colors
        .values()
        .map(|c| c.skip)
        .chain([h.w1, h.w2, h.w3])
        .chain(h.b_nodes.iter().copied())
        .chain(h.c_nodes.iter().copied());
    let master_far_scaffold = scaffold.filter(|&x| from_master[x].is_none_or(|d| d > 2)).count();
    let master_eccentricity = from_master.iter().try_fold(0, |acc, d| d.map(|d| acc.max(d)));
    DistanceAudit { max_distance, off_form_pairs_over_3: off, master_far_scaffold, master_eccentricity }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticRun {
    pub answer: bool,
    pub gamma: f64,
    pub block_diameters: Vec<u32>,
    pub counters: OpCounters,
}

pub fn solve_tcstar_static(inst: &TcStarInstance, gamma: f64) -> Result<StaticRun> {
    solve_tcstar_static_with(inst, gamma, &mut ExactDistinguisher)
}

/// Build every block and ask `dist` for 3 vs 4; YES iff some block is 4.
pub fn solve_tcstar_static_with(
    inst: &TcStarInstance,
    gamma: f64,
    dist: &mut dyn Distinguisher,
) -> Result<StaticRun> {
    check_gamma(gamma)?;
    let mut counters = OpCounters::default();
    let mut block_diameters = Vec::new();
    for k in 0..block_count(inst.n, gamma) {
        let mut h = build_h(inst, gamma, k)?;
        let (d, steps) = dist.distinguish(&h.graph)?;
        h.graph.charge(steps);
        h.graph.record_query();
        let c = h.graph.op_count();
        counters.insertions += c.insertions;
        counters.node_insertions += c.node_insertions;
        counters.queries += c.queries;
        counters.elementary_steps += c.elementary_steps;
        block_diameters.push(d);
    }
    Ok(StaticRun { answer: block_diameters.contains(&4), gamma, block_diameters, counters })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalRun {
    pub answer: bool,
    pub diameter: u32,
    pub edge_count: usize,
    pub node_count: usize,
    pub counters: OpCounters,
}

/// Insert all of `H_{1,0}` one element at a time, then query once.
pub fn solve_tcstar_incremental(inst: &TcStarInstance) -> Result<IncrementalRun> {
    let mut h = build_h(inst, 1.0, 0)?;
    let (d, steps) = ExactDistinguisher.distinguish(&h.graph)?;
    h.graph.charge(steps);
    h.graph.record_query();
    Ok(IncrementalRun {
        answer: d == 4,
        diameter: d,
        edge_count: h.graph.edge_count(),
        node_count: h.graph.node_count(),
        counters: h.graph.op_count(),
    })
}

/// Per-insertion cost charged by the dynamic engine under test, on top of
/// the unit charge the graph records for every insertion.
pub trait InsertCost {
    fn on_insert(&mut self, g: &DynGraph, entry: &LogEntry) -> u64;
}

/// The cheap engine: nothing beyond the unit charge.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitCost;

impl InsertCost for UnitCost {
    fn on_insert(&mut self, _: &DynGraph, _: &LogEntry) -> u64 {
        0
    }
}

/// A naive eager engine that refreshes BFS distances from the touched node
/// after every insertion.
#[derive(Debug, Clone, Copy, Default)]
pub struct BfsRefreshCost;

impl InsertCost for BfsRefreshCost {
    fn on_insert(&mut self, g: &DynGraph, entry: &LogEntry) -> u64 {
        let src = match *entry {
            LogEntry::InsertNode(id) => id,
            LogEntry::InsertEdge(_, e) => e.u,
        };
        bfs(g, src).1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeAddRun {
    pub answer: bool,
    pub phase_diameters: Vec<u32>,
    pub ledger: CreditLedger,
    pub nodes_after_setup: usize,
    pub final_node_count: usize,
    pub counters: OpCounters,
}

pub fn solve_tcstar_node_addition(inst: &TcStarInstance, alpha: f64) -> Result<NodeAddRun> {
    solve_tcstar_node_addition_with(inst, alpha, &mut UnitCost)
}

/// Node-addition protocol: insert B, C and the connectors with their
/// edges, then one phase per A-color that inserts `A_i, T_i, v_i` with all
/// induced edges, queries, and keeps the phase only if its insertions cost
/// more than `2 k n_hat^alpha` (else rolls it back).
pub fn solve_tcstar_node_addition_with(
    inst: &TcStarInstance,
    alpha: f64,
    cost: &mut dyn InsertCost,
) -> Result<NodeAddRun> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    let mut h = HGraph::scaffold_nodes(inst, 1.0, 0);
    h.scaffold_edges();
    h.bc_edges(inst);
    charge_new_entries(&mut h.graph, 0, cost);
    let nodes_after_setup = h.graph.node_count();
    let mut ledger = CreditLedger::new(alpha);
    let mut phase_diameters = Vec::with_capacity(inst.n);
    for i in 0..inst.n {
        let start_log = h.graph.log().len();
        let start_steps = h.graph.op_count().elementary_steps;
        let n_hat = h.graph.node_count() as u64;
        h.color_nodes(inst, i);
        h.color_edges(inst, i);
        charge_new_entries(&mut h.graph, start_log, cost);
        let ops = (h.graph.log().len() - start_log) as u64;
        let spent = h.graph.op_count().elementary_steps - start_steps;

        let (d, steps) = ExactDistinguisher.distinguish(&h.graph)?;
        h.graph.charge(steps);
        h.graph.record_query();
        phase_diameters.push(d);

        if !ledger.record_phase(ops, n_hat, spent) {
            h.graph.rollback(ops as usize)?;
            h.colors.remove(&i);
        }
    }
    Ok(NodeAddRun {
        answer: phase_diameters.contains(&4),
        phase_diameters,
        ledger,
        nodes_after_setup,
        final_node_count: h.graph.node_count(),
        counters: h.graph.op_count(),
    })
}

/// Replay the cost model over log entries appended since `from`, charging
/// each against the graph as it stood right after that insertion.
fn charge_new_entries(g: &mut DynGraph, from: usize, cost: &mut dyn InsertCost) {
    let entries: Vec<LogEntry> = g.log()[from..].to_vec();
    if entries.is_empty() {
        return;
    }
    let mut total = 0;
    let mut view = g.clone();
    for idx in (0..entries.len()).rev() {
        total += cost.on_insert(&view, &entries[idx]);
        view.rollback(1).expect("entry present");
    }
    g.charge(total);
}

/// Root in `(0, 1)` of `alpha * (2 + alpha) / (1 + alpha) = 1` by bisection.
pub fn solve_alpha() -> f64 {
    let f = |a: f64| (2.0 + a) / (1.0 + a) * a - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Replace every edge by a path with `s` interior nodes. Original nodes keep
/// their handles; interior nodes follow in edge order.
pub fn subdivide(g: &DynGraph, s: usize) -> DynGraph {
    let mut out = DynGraph::undirected();
    for _ in 0..g.node_count() {
        out.insert_node();
    }
    for e in g.edges() {
        let mut prev = e.u;
        for _ in 0..s {
            let mid = out.insert_node();
            out.insert_edge(prev, mid, None).expect("fresh nodes");
            prev = mid;
        }
        out.insert_edge(prev, e.v, None).expect("fresh nodes");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdividedRun {
    pub answer: bool,
    pub interior: usize,
    /// Largest distance between two original nodes.
    pub original_pair_diameter: u32,
    pub node_count: usize,
    pub edge_count: usize,
}

/// `H_{1,0}` with every edge subdivided; decides from distances between
/// original nodes, which are exactly `(s + 1)` times the unsubdivided ones.
pub fn solve_tcstar_subdivided(inst: &TcStarInstance, s: usize) -> Result<SubdividedRun> {
    let h = build_h(inst, 1.0, 0)?;
    let originals = h.graph.node_count();
    let sub = subdivide(&h.graph, s);
    let mut max = 0;
    for src in 0..originals {
        let (dist, _) = bfs(&sub, src);
        for d in &dist[..originals] {
            match d {
                Some(d) => max = max.max(*d),
                None => return Err(Error::DiameterContract(None)),
            }
        }
    }
    let scale = (s + 1) as u32;
    if max != 3 * scale && max != 4 * scale {
        return Err(Error::DiameterContract(Some(max)));
    }
    Ok(SubdividedRun {
        answer: max == 4 * scale,
        interior: s,
        original_pair_diameter: max,
        node_count: sub.node_count(),
        edge_count: sub.edge_count(),
    })
}

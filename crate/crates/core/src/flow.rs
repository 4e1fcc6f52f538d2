//! Incremental s-t maximum flow under edge insertions.
//!
//! Insertions only add capacity, so the current flow stays feasible and the
//! engine only has to exhaust the new augmenting paths. Re-augmentation runs
//! shortest-path phases (BFS level graph plus blocking flow) in insertion
//! order.

use std::collections::VecDeque;

use crate::dyngraph::{DynGraph, EdgeId, NodeId};
use crate::error::{Error, Result};
use crate::oracles::FlowNetwork;

/// Largest capacity accepted per edge. Keeps every sum of capacities
/// comfortably inside `i64`.
pub const MAX_CAPACITY: i64 = 1 << 40;

#[derive(Debug, Clone)]
pub struct FlowEngine {
    graph: DynGraph,
    flow: Vec<i64>,
    s: NodeId,
    t: NodeId,
    value: i64,
}

impl Default for FlowEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl FlowEngine {
    /// A network holding only the terminals `s = 0` and `t = 1`.
    pub fn new() -> Self {
        let mut graph = DynGraph::flow_network();
        let s = graph.insert_node();
        let t = graph.insert_node();
        Self { graph, flow: Vec::new(), s, t, value: 0 }
    }

    /// Build an engine by inserting every edge of `g` in log order.
    pub fn from_graph(g: &DynGraph, s: NodeId, t: NodeId) -> Result<Self> {
        let net = FlowNetwork {
            node_count: g.node_count(),
            arcs: g.edges().iter().map(|e| (e.u, e.v, e.cap.unwrap_or(0))).collect(),
            s,
            t,
        };
        Self::from_network(&net)
    }

    /// Terminals of `net` are remapped onto handles 0 and 1.
    pub fn from_network(net: &FlowNetwork) -> Result<Self> {
        if net.s == net.t || net.s >= net.node_count || net.t >= net.node_count {
            return Err(Error::InvalidParameter("invalid terminals".into()));
        }
        let mut engine = Self::new();
        let mut map = vec![usize::MAX; net.node_count];
        map[net.s] = engine.s;
        map[net.t] = engine.t;
        for slot in map.iter_mut() {
            if *slot == usize::MAX {
                *slot = engine.add_node();
            }
        }
        for &(u, v, c) in &net.arcs {
            if c > 0 {
                engine.insert_edge(map[u], map[v], c)?;
            } else if c < 0 {
                return Err(Error::NegativeCapacity(c));
            }
        }
        Ok(engine)
    }

    pub fn source(&self) -> NodeId {
        self.s
    }

    pub fn sink(&self) -> NodeId {
        self.t
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn flow_on(&self, e: EdgeId) -> i64 {
        self.flow[e]
    }

    pub fn add_node(&mut self) -> NodeId {
        self.graph.insert_node()
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, cap: i64) -> Result<EdgeId> {
        if cap <= 0 {
            return Err(Error::NonPositiveCapacity(cap));
        }
        if cap > MAX_CAPACITY {
            return Err(Error::Overflow);
        }
        let id = self.graph.insert_edge(u, v, Some(cap))?;
        self.flow.push(0);
        self.reaugment()?;
        Ok(id)
    }

    /// Query: current maximum flow value.
    pub fn value(&mut self) -> i64 {
        self.graph.record_query();
        self.value
    }

    pub fn current_value(&self) -> i64 {
        self.value
    }

    pub fn to_network(&self) -> FlowNetwork {
        FlowNetwork {
            node_count: self.graph.node_count(),
            arcs: self.graph.edges().iter().map(|e| (e.u, e.v, e.cap.unwrap_or(0))).collect(),
            s: self.s,
            t: self.t,
        }
    }

    /// Nodes reachable from `from` along edges with positive capacity.
    pub fn reachable_from(&self, from: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.graph.node_count()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for &e in self.graph.incident(x) {
                let edge = self.graph.edge(e);
                if edge.u == x && !seen[edge.v] {
                    seen[edge.v] = true;
                    stack.push(edge.v);
                }
            }
        }
        seen
    }

    /// Capacity bounds, conservation away from the terminals, and
    /// `value == net outflow of s`.
    pub fn check_feasibility(&self) -> bool {
        let mut excess = vec![0i64; self.graph.node_count()];
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let f = self.flow[e];
            if f < 0 || f > edge.cap.unwrap_or(0) {
                return false;
            }
            excess[edge.u] -= f;
            excess[edge.v] += f;
        }
        excess
            .iter()
            .enumerate()
            .all(|(x, &ex)| x == self.s || x == self.t || ex == 0)
            && -excess[self.s] == self.value
    }

    fn residual_arc(&self, e: EdgeId, from: NodeId) -> Option<(NodeId, i64)> {
        let edge = self.graph.edge(e);
        if edge.u == edge.v {
            None
        } else if edge.u == from {
            Some((edge.v, edge.cap.unwrap_or(0) - self.flow[e]))
        } else {
            Some((edge.u, self.flow[e]))
        }
    }

    fn reaugment(&mut self) -> Result<()> {
        let n = self.graph.node_count();
        let mut steps = 0u64;
        loop {
            let mut level = vec![u32::MAX; n];
            level[self.s] = 0;
            let mut queue = VecDeque::from([self.s]);
            while let Some(x) = queue.pop_front() {
                for &e in self.graph.incident(x) {
                    steps += 1;
                    if let Some((y, r)) = self.residual_arc(e, x) {
                        if r > 0 && level[y] == u32::MAX {
                            level[y] = level[x] + 1;
                            queue.push_back(y);
                        }
                    }
                }
            }
            if level[self.t] == u32::MAX {
                break;
            }
            let mut cursor = vec![0usize; n];
            loop {
                let pushed = self.blocking_dfs(self.s, i64::MAX, &level, &mut cursor, &mut steps);
                if pushed == 0 {
                    break;
                }
                self.value = self.value.checked_add(pushed).ok_or(Error::Overflow)?;
            }
        }
        self.graph.charge(steps);
        Ok(())
    }

    fn blocking_dfs(&mut self, x: NodeId, limit: i64, level: &[u32], cursor: &mut [usize], steps: &mut u64) -> i64 {
        if x == self.t {
            return limit;
        }
        while cursor[x] < self.graph.incident(x).len() {
            let e = self.graph.incident(x)[cursor[x]];
            *steps += 1;
            if let Some((y, r)) = self.residual_arc(e, x) {
                if r > 0 && level[y] == level[x] + 1 {
                    let pushed = self.blocking_dfs(y, limit.min(r), level, cursor, steps);
                    if pushed > 0 {
                        if self.graph.edge(e).u == x {
                            self.flow[e] += pushed;
                        } else {
                            self.flow[e] -= pushed;
                        }
                        return pushed;
                    }
                }
            }
            cursor[x] += 1;
        }
        0
    }
}

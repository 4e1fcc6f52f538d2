//! Append-only dynamic graph with an operation log, exact rollback,
//! reverse-replay deletion schedules and operation counters.
//!
//! Every mutation goes through the log, so the graph is always equal to a
//! replay of its log from the empty graph. Deletions exist only as the
//! reverse of that log.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphKind {
    pub directed: bool,
    pub capacitated: bool,
}

impl GraphKind {
    pub const UNDIRECTED: Self = Self { directed: false, capacitated: false };
    pub const FLOW_NETWORK: Self = Self { directed: true, capacitated: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cap: Option<i64>,
}

impl Edge {
    /// The endpoint opposite `x`.
    pub fn other(&self, x: NodeId) -> NodeId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogEntry {
    InsertNode(NodeId),
    InsertEdge(EdgeId, Edge),
}

/// One step of a decremental schedule.
pub type Deletion = LogEntry;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounters {
    /// Edge insertions.
    pub insertions: u64,
    pub node_insertions: u64,
    pub queries: u64,
    /// Unit work charged by the graph itself and by engines driving it.
    pub elementary_steps: u64,
}

/// Immutable view of `(kind, nodes, edges)`, used for equality checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphSnapshot {
    pub kind: GraphKind,
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone)]
pub struct DynGraph {
    kind: GraphKind,
    node_count: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<EdgeId>>,
    log: Vec<LogEntry>,
    counters: OpCounters,
}

impl DynGraph {
    pub fn new(kind: GraphKind) -> Self {
        Self {
            kind,
            node_count: 0,
            edges: Vec::new(),
            adj: Vec::new(),
            log: Vec::new(),
            counters: OpCounters::default(),
        }
    }

    pub fn undirected() -> Self {
        Self::new(GraphKind::UNDIRECTED)
    }

    pub fn flow_network() -> Self {
        Self::new(GraphKind::FLOW_NETWORK)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    /// Ids of all edges incident to `u`, in insertion order. For directed
    /// graphs this includes both outgoing and incoming edges.
    pub fn incident(&self, u: NodeId) -> &[EdgeId] {
        &self.adj[u]
    }

    /// Endpoints adjacent to `u`, ignoring direction.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[u].iter().map(move |&e| self.edges[e].other(u))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        if u >= self.node_count || v >= self.node_count {
            return false;
        }
        let (probe, target) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[probe].iter().any(|&e| {
            let edge = self.edges[e];
            if self.kind.directed {
                edge.u == u && edge.v == v
            } else {
                edge.other(probe) == target
            }
        })
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn insert_node(&mut self) -> NodeId {
        let id = self.node_count;
        self.node_count += 1;
        self.adj.push(Vec::new());
        self.log.push(LogEntry::InsertNode(id));
        self.counters.node_insertions += 1;
        self.counters.elementary_steps += 1;
        id
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, cap: Option<i64>) -> Result<EdgeId> {
        for x in [u, v] {
            if x >= self.node_count {
                return Err(Error::UnknownNode(x));
            }
        }
        if cap.is_some() != self.kind.capacitated {
            return Err(Error::CapacityMismatch(cap));
        }
        if let Some(c) = cap {
            if c < 0 {
                return Err(Error::NegativeCapacity(c));
            }
        }
        let id = self.edges.len();
        let edge = Edge { u, v, cap };
        self.edges.push(edge);
        self.adj[u].push(id);
        if v != u {
            self.adj[v].push(id);
        }
        self.log.push(LogEntry::InsertEdge(id, edge));
        self.counters.insertions += 1;
        self.counters.elementary_steps += 1;
        Ok(id)
    }

    /// Undo the last `k` log entries. Counters are left untouched: work
    /// already spent stays spent.
    pub fn rollback(&mut self, k: usize) -> Result<()> {
        if k > self.log.len() {
            return Err(Error::RollbackTooFar { requested: k, available: self.log.len() });
        }
        for _ in 0..k {
            let entry = self.log.pop().expect("length checked");
            self.undo(entry);
        }
        Ok(())
    }

    fn undo(&mut self, entry: LogEntry) {
        match entry {
            LogEntry::InsertNode(id) => {
                debug_assert_eq!(id + 1, self.node_count);
                debug_assert!(self.adj[id].is_empty());
                self.adj.pop();
                self.node_count -= 1;
            }
            LogEntry::InsertEdge(id, edge) => {
                debug_assert_eq!(id + 1, self.edges.len());
                self.edges.pop();
                let popped = self.adj[edge.u].pop();
                debug_assert_eq!(popped, Some(id));
                if edge.v != edge.u {
                    let popped = self.adj[edge.v].pop();
                    debug_assert_eq!(popped, Some(id));
                }
            }
        }
    }

    /// The log's insertions in reverse order. Applying them in order with
    /// [`Self::apply_deletion`] walks back through every incremental state.
    pub fn reverse_replay(&self) -> Vec<Deletion> {
        self.log.iter().rev().copied().collect()
    }

    /// Delete the most recently inserted element, which must be `deletion`.
    pub fn apply_deletion(&mut self, deletion: &Deletion) -> Result<()> {
        match self.log.last() {
            Some(last) if last == deletion => {
                self.log.pop();
                self.undo(*deletion);
                Ok(())
            }
            _ => Err(Error::InvalidParameter(format!(
                "deletion {deletion:?} does not match the last insertion"
            ))),
        }
    }

    pub fn op_count(&self) -> OpCounters {
        self.counters
    }

    pub fn charge(&mut self, steps: u64) {
        self.counters.elementary_steps += steps;
    }

    pub fn record_query(&mut self) {
        self.counters.queries += 1;
    }

    pub fn reset_counters(&mut self) {
        self.counters = OpCounters::default();
    }

    pub fn snapshot(&self) -> GraphSnapshot {
        GraphSnapshot { kind: self.kind, node_count: self.node_count, edges: self.edges.clone() }
    }

    /// Rebuild a graph by replaying `log` from the empty graph.
    pub fn replay(kind: GraphKind, log: &[LogEntry]) -> Result<Self> {
        let mut g = Self::new(kind);
        for entry in log {
            match *entry {
                LogEntry::InsertNode(id) => {
                    let got = g.insert_node();
                    if got != id {
                        return Err(Error::Parse(format!("log allocates node {id}, replay gave {got}")));
                    }
                }
                LogEntry::InsertEdge(id, e) => {
                    let got = g.insert_edge(e.u, e.v, e.cap)?;
                    if got != id {
                        return Err(Error::Parse(format!("log allocates edge {id}, replay gave {got}")));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Line-oriented log text: `N` per node insertion, `E u v [cap]` per edge.
    pub fn to_log_text(&self) -> String {
        let mut out = String::new();
        for entry in &self.log {
            match entry {
                LogEntry::InsertNode(_) => out.push_str("N\n"),
                LogEntry::InsertEdge(_, e) => {
                    let _ = write!(out, "E {} {}", e.u, e.v);
                    if let Some(c) = e.cap {
                        let _ = write!(out, " {c}");
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn from_log_text(kind: GraphKind, text: &str) -> Result<Self> {
        let mut g = Self::new(kind);
        for (lineno, line) in text.lines().enumerate() {
            let bad = || Error::Parse(format!("line {}: malformed record `{line}`", lineno + 1));
            let mut parts = line.split_whitespace();
            match parts.next() {
                None => continue,
                Some("N") if parts.next().is_none() => {
                    g.insert_node();
                }
                Some("E") => {
                    let nums: Vec<i64> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                    let (u, v, cap) = match nums.as_slice() {
                        [u, v] => (*u, *v, None),
                        [u, v, c] => (*u, *v, Some(*c)),
                        _ => return Err(bad()),
                    };
                    if u < 0 || v < 0 {
                        return Err(bad());
                    }
                    g.insert_edge(u as usize, v as usize, cap)?;
                }
                _ => return Err(bad()),
            }
        }
        Ok(g)
    }
}

//! Incremental maximum-cardinality bipartite matching.
//!
//! Since one insertion raises the maximum by at most one, a single
//! alternating-path search after each insertion keeps the matching maximum.
//! Deletions (reverse replay only) are symmetric: removing a matched edge
//! drops the size by one, and one search restores it when possible.

use std::collections::VecDeque;

use crate::dyngraph::{Deletion, DynGraph, LogEntry, NodeId};
use crate::error::{Error, Result};
use crate::oracles::{BipartiteGraph, Side};

#[derive(Debug, Clone)]
pub struct MatchingEngine {
    graph: DynGraph,
    sides: Vec<Side>,
    mate: Vec<Option<NodeId>>,
    size: usize,
}

impl Default for MatchingEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl MatchingEngine {
    pub fn new() -> Self {
        Self { graph: DynGraph::undirected(), sides: Vec::new(), mate: Vec::new(), size: 0 }
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn side(&self, u: NodeId) -> Side {
        self.sides[u]
    }

    pub fn mate(&self, u: NodeId) -> Option<NodeId> {
        self.mate[u]
    }

    pub fn reset_counters(&mut self) {
        self.graph.reset_counters();
    }

    pub fn add_node(&mut self, side: Side) -> NodeId {
        let id = self.graph.insert_node();
        self.sides.push(side);
        self.mate.push(None);
        id
    }

    /// Insert `(u, v)` and run one augmentation attempt. Returns the new size.
    pub fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<usize> {
        for x in [u, v] {
            if x >= self.sides.len() {
                return Err(Error::UnknownNode(x));
            }
        }
        if self.sides[u] == self.sides[v] {
            return Err(Error::SameSide(u, v));
        }
        if self.graph.has_edge(u, v) {
            return Err(Error::DuplicateEdge(u, v));
        }
        self.graph.insert_edge(u, v, None)?;
        if self.mate[u].is_none() && self.mate[v].is_none() {
            self.mate[u] = Some(v);
            self.mate[v] = Some(u);
            self.size += 1;
        } else {
            self.augment_once();
        }
        Ok(self.size)
    }

    /// Query: the maintained maximum matching size.
    pub fn size(&mut self) -> usize {
        self.graph.record_query();
        self.size
    }

    /// Size without touching the query counter.
    pub fn current_size(&self) -> usize {
        self.size
    }

    /// Remove the most recent insertion, which must equal `deletion`.
    pub fn apply_deletion(&mut self, deletion: &Deletion) -> Result<()> {
        self.graph.apply_deletion(deletion)?;
        match *deletion {
            LogEntry::InsertNode(id) => {
                self.sides.pop();
                self.mate.pop();
                debug_assert_eq!(self.sides.len(), id);
            }
            LogEntry::InsertEdge(_, e) => {
                if self.mate[e.u] == Some(e.v) {
                    self.mate[e.u] = None;
                    self.mate[e.v] = None;
                    self.size -= 1;
                    self.augment_once();
                }
            }
        }
        Ok(())
    }

    pub fn to_bipartite(&self) -> BipartiteGraph {
        BipartiteGraph {
            sides: self.sides.clone(),
            edges: self.graph.edges().iter().map(|e| (e.u, e.v)).collect(),
        }
    }

    /// Layered BFS over alternating paths from every free left node, lowest
    /// handle first; flips the first augmenting path found.
    fn augment_once(&mut self) -> bool {
        let n = self.sides.len();
        let mut parent: Vec<Option<NodeId>> = vec![None; n];
        let mut visited = vec![false; n];
        let mut queue = VecDeque::new();
        for (l, side) in self.sides.iter().enumerate() {
            if *side == Side::Left && self.mate[l].is_none() && !self.graph.incident(l).is_empty() {
                visited[l] = true;
                queue.push_back(l);
            }
        }
        let mut steps = 0u64;
        let mut endpoint = None;
        'bfs: while let Some(l) = queue.pop_front() {
            for r in self.graph.neighbors(l) {
                steps += 1;
                if visited[r] {
                    continue;
                }
                visited[r] = true;
                parent[r] = Some(l);
                match self.mate[r] {
                    None => {
                        endpoint = Some(r);
                        break 'bfs;
                    }
                    Some(l2) => {
                        if !visited[l2] {
                            visited[l2] = true;
                            queue.push_back(l2);
                        }
                    }
                }
            }
        }
        self.graph.charge(steps);
        let Some(mut r) = endpoint else {
            return false;
        };
        loop {
            let l = parent[r].expect("path recorded");
            let next = self.mate[l];
            self.mate[l] = Some(r);
            self.mate[r] = Some(l);
            match next {
                Some(r2) => r = r2,
                None => break,
            }
        }
        self.size += 1;
        true
    }

    /// Check mate symmetry, that matched pairs are edges, and the size count.
    pub fn check_invariants(&self) -> bool {
        let mut pairs = 0;
        for (u, m) in self.mate.iter().enumerate() {
            if let Some(v) = *m {
                if self.mate[v] != Some(u) || !self.graph.has_edge(u, v) {
                    return false;
                }
                pairs += 1;
            }
        }
        pairs == 2 * self.size
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::max_matching_oracle;

    #[test]
    fn first_edge_matches() {
        let mut m = MatchingEngine::new();
        assert_eq!(m.size(), 0);
        let a = m.add_node(Side::Left);
        let b = m.add_node(Side::Right);
        assert_eq!(m.insert_edge(a, b).unwrap(), 1);
        assert_eq!(m.size(), 1);
        assert_eq!(m.graph().op_count().queries, 2);
    }

    #[test]
    fn same_side_and_duplicates_rejected() {
        let mut m = MatchingEngine::new();
        let a = m.add_node(Side::Left);
        let b = m.add_node(Side::Left);
        let c = m.add_node(Side::Right);
        assert_eq!(m.insert_edge(a, b), Err(Error::SameSide(a, b)));
        m.insert_edge(a, c).unwrap();
        assert_eq!(m.insert_edge(c, a), Err(Error::DuplicateEdge(c, a)));
    }

    #[test]
    fn edge_between_matched_nodes_without_augmenting_path() {
        // l0-r0, l1-r1, l2-r2 matched; then l0-r1 adds nothing.
        let mut m = MatchingEngine::new();
        let mut ls = Vec::new();
        let mut rs = Vec::new();
        for _ in 0..3 {
            ls.push(m.add_node(Side::Left));
            rs.push(m.add_node(Side::Right));
        }
        for i in 0..3 {
            m.insert_edge(ls[i], rs[i]).unwrap();
        }
        assert_eq!(m.insert_edge(ls[0], rs[1]).unwrap(), 3);
        assert_eq!(max_matching_oracle(&m.to_bipartite()).unwrap(), 3);
        assert!(m.check_invariants());
    }

    #[test]
    fn augmenting_through_matched_edge() {
        // path r0 - l0 - r1 - l1: insert l0-r1 first, then l0-r0 and l1-r1
        let mut m = MatchingEngine::new();
        let l0 = m.add_node(Side::Left);
        let l1 = m.add_node(Side::Left);
        let r0 = m.add_node(Side::Right);
        let r1 = m.add_node(Side::Right);
        m.insert_edge(l0, r1).unwrap();
        m.insert_edge(l1, r1).unwrap();
        assert_eq!(m.current_size(), 1);
        assert_eq!(m.insert_edge(l0, r0).unwrap(), 2);
        assert!(m.check_invariants());
    }

    #[test]
    fn reverse_deletions_track_oracle() {
        let mut m = MatchingEngine::new();
        let l0 = m.add_node(Side::Left);
        let l1 = m.add_node(Side::Left);
        let r0 = m.add_node(Side::Right);
        let r1 = m.add_node(Side::Right);
        m.insert_edge(l0, r1).unwrap();
        m.insert_edge(l1, r1).unwrap();
        m.insert_edge(l0, r0).unwrap();
        for d in m.graph().reverse_replay() {
            m.apply_deletion(&d).unwrap();
            assert_eq!(m.current_size(), max_matching_oracle(&m.to_bipartite()).unwrap());
            assert!(m.check_invariants());
        }
        assert_eq!(m.graph().node_count(), 0);
    }
}

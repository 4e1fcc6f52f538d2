//! Exact diameter and the 3-vs-4 distinguisher.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dyngraph::{DynGraph, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    Distinguisher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterAnswer {
    /// `None` when the graph is disconnected.
    pub value: Option<u32>,
    pub method: Method,
    /// Adjacency entries scanned.
    pub steps: u64,
}

/// BFS distances from `src`, ignoring edge direction. Returns the distances
/// and the number of adjacency entries scanned.
pub fn bfs(g: &DynGraph, src: NodeId) -> (Vec<Option<u32>>, u64) {
    let mut dist = vec![None; g.node_count()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    let mut steps = 0;
    while let Some(x) = queue.pop_front() {
        let next = dist[x].map(|d| d + 1);
        for y in g.neighbors(x) {
            steps += 1;
            if dist[y].is_none() {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
    (dist, steps)
}

/// Maximum eccentricity over all BFS sources; infinite iff disconnected.
pub fn exact_diameter(g: &DynGraph) -> DiameterAnswer {
    let mut value = Some(0);
    let mut steps = 0;
    for src in 0..g.node_count() {
        let (dist, s) = bfs(g, src);
        steps += s;
        for d in dist {
            value = match (value, d) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        if value.is_none() {
            break;
        }
    }
    DiameterAnswer { value, method: Method::Exact, steps }
}

/// Anything that separates diameter 3 from diameter 4. A
/// `(4/3 - eps)`-approximation qualifies: on a diameter-4 graph it must
/// report more than 3.
pub trait Distinguisher {
    fn distinguish(&mut self, g: &DynGraph) -> Result<(u32, u64)>;
}

/// Default distinguisher backed by [`exact_diameter`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactDistinguisher;

impl Distinguisher for ExactDistinguisher {
    fn distinguish(&mut self, g: &DynGraph) -> Result<(u32, u64)> {
        let ans = exact_diameter(g);
        match ans.value {
            Some(d @ (3 | 4)) => Ok((d, ans.steps)),
            other => Err(Error::DiameterContract(other)),
        }
    }
}

/// Decide whether the diameter is 3 or 4; the caller guarantees one holds.
pub fn distinguish_3_4(g: &DynGraph) -> Result<u32> {
    ExactDistinguisher.distinguish(g).map(|(d, _)| d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DynGraph {
        let mut g = DynGraph::undirected();
        for _ in 0..n {
            g.insert_node();
        }
        for &(u, v) in edges {
            g.insert_edge(u, v, None).unwrap();
        }
        g
    }

    #[test]
    fn complete_and_path() {
        let k4: Vec<_> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        assert_eq!(exact_diameter(&graph(4, &k4)).value, Some(1));
        let p5: Vec<_> = (0..4).map(|i| (i, i + 1)).collect();
        assert_eq!(exact_diameter(&graph(5, &p5)).value, Some(4));
        assert_eq!(exact_diameter(&graph(3, &[(0, 1)])).value, None);
    }

    #[test]
    fn star_with_pendant_and_cycle() {
        let mut star: Vec<_> = (1..6).map(|v| (0, v)).collect();
        star.push((1, 6));
        assert_eq!(distinguish_3_4(&graph(7, &star)).unwrap(), 3);
        let c8: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        assert_eq!(distinguish_3_4(&graph(8, &c8)).unwrap(), 4);
    }

    #[test]
    fn contract_breach_reported() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(distinguish_3_4(&p3), Err(Error::DiameterContract(Some(2))));
        assert_eq!(distinguish_3_4(&graph(2, &[])), Err(Error::DiameterContract(None)));
    }
}

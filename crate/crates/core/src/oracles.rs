//! Brute-force reference solvers. These deliberately use the naive textbook
//! algorithm and share no code with the incremental engines.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{CnfFormula, OuMvInstance, Slot, TcStarInstance};

pub const SAT_VAR_GUARD: usize = 24;

/// Limits for [`tcstar_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TcGuard {
    pub max_n: usize,
    pub max_delta: usize,
    pub max_p: usize,
}

impl Default for TcGuard {
    fn default() -> Self {
        Self { max_n: 16, max_delta: 4, max_p: 4 }
    }
}

/// `bit i = OR_{j,k} u^i_j & M_jk & v^i_k`.
pub fn oumv_oracle(inst: &OuMvInstance) -> Vec<bool> {
    let n = inst.n();
    let m = inst.matrix();
    inst.pairs()
        .iter()
        .map(|pair| (0..n).any(|j| (0..n).any(|k| pair.u[j] && m.get(j, k) && pair.v[k])))
        .collect()
}

pub fn sat_oracle(formula: &CnfFormula) -> Result<bool> {
    sat_oracle_with_guard(formula, SAT_VAR_GUARD)
}

pub fn sat_oracle_with_guard(formula: &CnfFormula, max_vars: usize) -> Result<bool> {
    if formula.num_vars() > max_vars.min(63) {
        return Err(Error::Guard(format!("{} variables exceeds limit {max_vars}", formula.num_vars())));
    }
    Ok((0u64..1 << formula.num_vars()).any(|a| formula.evaluate(a)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleReport {
    pub answer: bool,
    /// Triangle-free color triples `(a-color, b-color, c-color)`, sorted.
    pub witnesses: Vec<(usize, usize, usize)>,
}

pub fn tcstar_oracle(inst: &TcStarInstance) -> Result<TripleReport> {
    tcstar_oracle_with_guard(inst, TcGuard::default())
}

pub fn tcstar_oracle_with_guard(inst: &TcStarInstance, guard: TcGuard) -> Result<TripleReport> {
    if inst.n > guard.max_n || inst.delta > guard.max_delta || inst.p > guard.max_p {
        return Err(Error::Guard(format!(
            "TC* instance (n={}, delta={}, p={}) exceeds {guard:?}",
            inst.n, inst.delta, inst.p
        )));
    }
    // Explicit adjacency tests over every (a, b, c) node triple of the colors.
    let a_to_b = |i: usize, j: usize, b: Slot| b.j == j && inst.ab(i, j, b.color) == b.x;
    let a_to_c = |i: usize, j: usize, c: Slot| c.j == j && inst.ac(i, j, c.color) == c.x;
    let mut witnesses = Vec::new();
    for i in 0..inst.n {
        for alpha in 0..inst.n {
            for beta in 0..inst.n {
                let mut found = false;
                'search: for j in 0..inst.delta {
                    for jb in 0..inst.delta {
                        for x in 0..inst.p {
                            let b = Slot::new(alpha, jb, x);
                            if !a_to_b(i, j, b) {
                                continue;
                            }
                            for jc in 0..inst.delta {
                                for y in 0..inst.p {
                                    let c = Slot::new(beta, jc, y);
                                    if a_to_c(i, j, c) && inst.has_bc(b, c) {
                                        found = true;
                                        break 'search;
                                    }
                                }
                            }
                        }
                    }
                }
                if !found {
                    witnesses.push((i, alpha, beta));
                }
            }
        }
    }
    Ok(TripleReport { answer: !witnesses.is_empty(), witnesses })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Edge list with a declared bipartition.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub sides: Vec<Side>,
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn check(&self) -> Result<()> {
        for &(u, v) in &self.edges {
            if u >= self.sides.len() || v >= self.sides.len() {
                return Err(Error::UnknownNode(u.max(v)));
            }
            if self.sides[u] == self.sides[v] {
                return Err(Error::NotBipartite(u, v));
            }
        }
        Ok(())
    }

    /// Edges as `(left, right)` pairs.
    pub fn oriented_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .map(|&(u, v)| if self.sides[u] == Side::Left { (u, v) } else { (v, u) })
    }
}

/// Maximum matching size by repeated DFS augmentation from each left node.
pub fn max_matching_oracle(g: &BipartiteGraph) -> Result<usize> {
    g.check()?;
    let n = g.sides.len();
    let mut adj = vec![Vec::new(); n];
    for (l, r) in g.oriented_edges() {
        adj[l].push(r);
    }
    let mut mate_of_right: Vec<Option<usize>> = vec![None; n];

    fn try_kuhn(l: usize, adj: &[Vec<usize>], seen: &mut [bool], mate: &mut [Option<usize>]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if mate[r].is_none_or(|l2| try_kuhn(l2, adj, seen, mate)) {
                mate[r] = Some(l);
                return true;
            }
        }
        false
    }

    let mut size = 0;
    for l in (0..n).filter(|&x| g.sides[x] == Side::Left) {
        let mut seen = vec![false; n];
        if try_kuhn(l, &adj, &mut seen, &mut mate_of_right) {
            size += 1;
        }
    }
    Ok(size)
}

/// Directed network with integer capacities.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<(usize, usize, i64)>,
    pub s: usize,
    pub t: usize,
}

/// Ford–Fulkerson with depth-first augmenting paths on a fresh residual graph.
pub fn max_flow_oracle(net: &FlowNetwork) -> Result<i64> {
    if net.s == net.t {
        return Err(Error::InvalidParameter("source equals sink".into()));
    }
    for &x in [net.s, net.t].iter() {
        if x >= net.node_count {
            return Err(Error::UnknownNode(x));
        }
    }
    // residual arcs stored in pairs: 2k forward, 2k+1 reverse
    let mut to = Vec::new();
    let mut residual = Vec::new();
    let mut adj = vec![Vec::new(); net.node_count];
    for &(u, v, c) in &net.arcs {
        if c < 0 {
            return Err(Error::NegativeCapacity(c));
        }
        if u >= net.node_count || v >= net.node_count {
            return Err(Error::UnknownNode(u.max(v)));
        }
        adj[u].push(to.len());
        to.push(v);
        residual.push(c);
        adj[v].push(to.len());
        to.push(u);
        residual.push(0);
    }
    let mut total: i64 = 0;
    loop {
        let mut parent_arc = vec![usize::MAX; net.node_count];
        let mut visited = vec![false; net.node_count];
        let mut stack = vec![net.s];
        visited[net.s] = true;
        while let Some(x) = stack.pop() {
            if x == net.t {
                break;
            }
            for &a in &adj[x] {
                let y = to[a];
                if !visited[y] && residual[a] > 0 {
                    visited[y] = true;
                    parent_arc[y] = a;
                    stack.push(y);
                }
            }
        }
        if !visited[net.t] {
            return Ok(total);
        }
        let mut bottleneck = i64::MAX;
        let mut x = net.t;
        while x != net.s {
            let a = parent_arc[x];
            bottleneck = bottleneck.min(residual[a]);
            x = to[a ^ 1];
        }
        let mut x = net.t;
        while x != net.s {
            let a = parent_arc[x];
            residual[a] -= bottleneck;
            residual[a ^ 1] += bottleneck;
            x = to[a ^ 1];
        }
        total = total.checked_add(bottleneck).ok_or(Error::Overflow)?;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApspReport {
    /// `dist[u][v]`, `None` when unreachable.
    pub dist: Vec<Vec<Option<u32>>>,
    /// Maximum distance; `None` means infinite (disconnected).
    pub diameter: Option<u32>,
}

/// BFS from every node of an undirected graph.
pub fn apsp_bfs_oracle(node_count: usize, edges: &[(usize, usize)]) -> ApspReport {
    let mut adj = vec![Vec::new(); node_count];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = Vec::with_capacity(node_count);
    let mut diameter = Some(0);
    for src in 0..node_count {
        let mut d = vec![None; node_count];
        d[src] = Some(0u32);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let next = d[x].map(|v| v + 1);
            for &y in &adj[x] {
                if d[y].is_none() {
                    d[y] = next;
                    queue.push_back(y);
                }
            }
        }
        for &dv in &d {
            diameter = match (diameter, dv) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        dist.push(d);
    }
    ApspReport { dist, diameter }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_tcstar, plant_tcstar, BitMatrix, Literal, VectorPair};

    #[test]
    fn oumv_cases() {
        let zero = OuMvInstance::new(
            BitMatrix::zeros(2).unwrap(),
            vec![VectorPair { u: vec![true, true], v: vec![true, true] }; 2],
        )
        .unwrap();
        assert_eq!(oumv_oracle(&zero), vec![false, false]);

        let ones = OuMvInstance::new(
            BitMatrix::from_rows(&[vec![true; 2], vec![true; 2]]).unwrap(),
            vec![VectorPair { u: vec![true; 2], v: vec![true; 2] }; 2],
        )
        .unwrap();
        assert_eq!(oumv_oracle(&ones), vec![true, true]);

        let ident = BitMatrix::from_rows(&[vec![true, false], vec![false, true]]).unwrap();
        let inst = OuMvInstance::new(
            ident,
            vec![
                VectorPair { u: vec![true, false], v: vec![false, true] },
                VectorPair { u: vec![false, true], v: vec![false, true] },
            ],
        )
        .unwrap();
        assert_eq!(oumv_oracle(&inst), vec![false, true]);
    }

    #[test]
    fn sat_cases() {
        assert!(sat_oracle(&CnfFormula::new(2, vec![]).unwrap()).unwrap());
        let contra = CnfFormula::new(2, vec![vec![Literal::pos(0)], vec![Literal::neg(0)]]).unwrap();
        assert!(!sat_oracle(&contra).unwrap());
        let xor = CnfFormula::new(
            2,
            vec![vec![Literal::pos(0), Literal::pos(1)], vec![Literal::neg(0), Literal::neg(1)]],
        )
        .unwrap();
        assert!(sat_oracle(&xor).unwrap());
        assert!(xor.evaluate(0b01));
        let big = CnfFormula::new(26, vec![]).unwrap();
        assert!(matches!(sat_oracle(&big), Err(Error::Guard(_))));
    }

    #[test]
    fn tcstar_singletons() {
        let full = gen_tcstar(1, 1, 1, 1.0, 0).unwrap();
        let r = tcstar_oracle(&full).unwrap();
        assert!(!r.answer);
        assert!(r.witnesses.is_empty());
        let empty = gen_tcstar(1, 1, 1, 0.0, 0).unwrap();
        let r = tcstar_oracle(&empty).unwrap();
        assert!(r.answer);
        assert_eq!(r.witnesses, vec![(0, 0, 0)]);
    }

    #[test]
    fn tcstar_planted_triple_is_witness() {
        let inst = plant_tcstar(5, 2, 2, 11, (3, 1, 4)).unwrap();
        let r = tcstar_oracle(&inst).unwrap();
        assert!(r.witnesses.contains(&(3, 1, 4)));
    }

    #[test]
    fn tcstar_guard() {
        let inst = gen_tcstar(2, 5, 1, 0.5, 0).unwrap();
        assert!(matches!(tcstar_oracle(&inst), Err(Error::Guard(_))));
    }

    #[test]
    fn matching_cases() {
        assert_eq!(max_matching_oracle(&BipartiteGraph::default()).unwrap(), 0);
        let k = 4;
        let disjoint = BipartiteGraph {
            sides: (0..2 * k).map(|x| if x % 2 == 0 { Side::Left } else { Side::Right }).collect(),
            edges: (0..k).map(|i| (2 * i, 2 * i + 1)).collect(),
        };
        assert_eq!(max_matching_oracle(&disjoint).unwrap(), k);
        let path = BipartiteGraph {
            sides: vec![Side::Left, Side::Right, Side::Left, Side::Right],
            edges: vec![(0, 1), (1, 2), (2, 3)],
        };
        assert_eq!(max_matching_oracle(&path).unwrap(), 2);
        let bad = BipartiteGraph { sides: vec![Side::Left, Side::Left], edges: vec![(0, 1)] };
        assert_eq!(max_matching_oracle(&bad), Err(Error::NotBipartite(0, 1)));
    }

    #[test]
    fn flow_cases() {
        let none = FlowNetwork { node_count: 2, arcs: vec![], s: 0, t: 1 };
        assert_eq!(max_flow_oracle(&none).unwrap(), 0);
        let single = FlowNetwork { node_count: 2, arcs: vec![(0, 1, 7)], s: 0, t: 1 };
        assert_eq!(max_flow_oracle(&single).unwrap(), 7);
        // s=0, a=1, b=2, t=3
        let diamond = FlowNetwork {
            node_count: 4,
            arcs: vec![(0, 1, 3), (0, 2, 2), (1, 3, 2), (2, 3, 3)],
            s: 0,
            t: 3,
        };
        assert_eq!(max_flow_oracle(&diamond).unwrap(), 4);
        let neg = FlowNetwork { node_count: 2, arcs: vec![(0, 1, -1)], s: 0, t: 1 };
        assert_eq!(max_flow_oracle(&neg), Err(Error::NegativeCapacity(-1)));
        let same = FlowNetwork { node_count: 2, arcs: vec![], s: 1, t: 1 };
        assert!(max_flow_oracle(&same).is_err());
    }

    #[test]
    fn apsp_cases() {
        assert_eq!(apsp_bfs_oracle(1, &[]).diameter, Some(0));
        let path: Vec<_> = (0..4).map(|i| (i, i + 1)).collect();
        assert_eq!(apsp_bfs_oracle(5, &path).diameter, Some(4));
        assert_eq!(apsp_bfs_oracle(2, &[]).diameter, None);
    }
}

//! Oracles shared by the integration suites. Nothing here calls the checker
//! or the DFS enumerator; they are what those get compared against.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cyclecover::graph::{add_noise, generate_cycles};
use cyclecover::DirectedGraph;

pub const FIG1_EDGES: [(u64, u64); 11] = [
    (1, 2),
    (2, 5),
    (2, 6),
    (3, 4),
    (4, 3),
    (4, 7),
    (5, 1),
    (5, 6),
    (6, 3),
    (6, 7),
    (7, 6),
];

pub const FIG1_COVER: [(u64, u64); 7] = [(1, 2), (2, 5), (5, 1), (3, 4), (4, 7), (7, 6), (6, 3)];

pub fn fig1() -> DirectedGraph {
    DirectedGraph::from_labeled([], FIG1_EDGES).unwrap()
}

pub fn complete_digraph(n: u64) -> DirectedGraph {
    let edges: Vec<(u64, u64)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    DirectedGraph::from_labeled(0..n, edges).unwrap()
}

pub fn planted(n: usize, len: usize, noise: usize, seed: u64) -> DirectedGraph {
    add_noise(&generate_cycles(n, len).unwrap(), noise, seed).unwrap()
}

/// Subgraph of `g` keeping edge `k` (in sorted order) when bit `k` of `mask` is set.
pub fn subgraph_from_mask(g: &DirectedGraph, mask: u64) -> DirectedGraph {
    let edges = g.labeled_edges();
    g.subgraph(
        edges
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e),
    )
    .unwrap()
}

/// Definition-based validator: every vertex has exactly one outgoing and one
/// incoming edge, and following successors splits the vertices into cycles
/// of length at least 3.
pub fn is_cover_by_definition(sub: &DirectedGraph) -> bool {
    let n = sub.num_vertices();
    let mut succ = vec![usize::MAX; n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for &(i, j) in sub.edges() {
        outdeg[i] += 1;
        indeg[j] += 1;
        succ[i] = j;
    }
    if (0..n).any(|v| outdeg[v] != 1 || indeg[v] != 1) {
        return false;
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut v = s;
        while !seen[v] {
            seen[v] = true;
            len += 1;
            v = succ[v];
        }
        if len < 3 {
            return false;
        }
    }
    true
}

/// All 3-cycle covers of `g` by scanning every edge subset. `g` must have at
/// most ~20 edges.
pub fn covers_by_subsets(g: &DirectedGraph) -> BTreeSet<Vec<(u64, u64)>> {
    let m = g.num_edges();
    assert!(m <= 24);
    (0..1u64 << m)
        .filter(|mask| mask.count_ones() as usize == g.num_vertices())
        .map(|mask| subgraph_from_mask(g, mask))
        .filter(is_cover_by_definition)
        .map(|s| s.labeled_edges())
        .collect()
}

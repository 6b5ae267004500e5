//! Polynomial-time check that a subgraph partitions the vertex set into
//! directed cycles with at least three vertices each.
//!
//! The procedure repeatedly picks the smallest remaining vertex and walks
//! unique outgoing edges until it returns to the start:
//!
//! * a vertex on the walk with zero or several outgoing edges rejects;
//! * reaching a vertex already on the current walk (other than the start),
//!   or using up every remaining edge before closing the walk, rejects;
//! * a closed walk of two vertices rejects;
//! * a closed walk of three or more vertices is removed together with its
//!   edges, and the loop continues until vertices and edges are exhausted.
//!
//! Each outer iteration costs O(N_E) at most and there are at most N_V of
//! them.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    /// A vertex on the walk has no outgoing edge or more than one.
    NoUniqueOutEdge,
    /// The walk revisited a vertex or ran out of edges before closing.
    PrematureRevisit,
    TwoCycle,
    /// Edges remain after all vertices were covered.
    LeftoverMaterial,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::NoUniqueOutEdge => "vertex-without-unique-out-edge",
            RejectReason::PrematureRevisit => "premature-revisit-or-edge-exhaustion",
            RejectReason::TwoCycle => "two-cycle",
            RejectReason::LeftoverMaterial => "leftover-material",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverVerdict {
    Accepted,
    Rejected(RejectReason),
}

impl CoverVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, CoverVerdict::Accepted)
    }

    pub fn reason(&self) -> Option<RejectReason> {
        match self {
            CoverVerdict::Accepted => None,
            CoverVerdict::Rejected(r) => Some(*r),
        }
    }
}

impl fmt::Display for CoverVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverVerdict::Accepted => f.write_str("accepted"),
            CoverVerdict::Rejected(r) => write!(f, "rejected: {r}"),
        }
    }
}

/// Decides whether `sub` is a vertex 3-cycle cover of `g`.
///
/// `sub` must have the same vertex set as `g` and a subset of its edges;
/// anything else is an [`Error::Precondition`], not a negative verdict.
pub fn is_cycle_cover(g: &DirectedGraph, sub: &DirectedGraph) -> Result<CoverVerdict> {
    check_counted(g, sub).map(|(v, _)| v)
}

/// Like [`is_cycle_cover`], also returning the number of walk steps taken.
pub fn check_counted(g: &DirectedGraph, sub: &DirectedGraph) -> Result<(CoverVerdict, usize)> {
    if sub.labels() != g.labels() {
        return Err(Error::Precondition(
            "subgraph vertex set differs from the graph's".into(),
        ));
    }
    if !sub.is_spanning_subgraph_of(g) {
        return Err(Error::Precondition(
            "subgraph contains an edge that is not in the graph".into(),
        ));
    }
    Ok(walk(sub))
}

fn walk(sub: &DirectedGraph) -> (CoverVerdict, usize) {
    let n = sub.num_vertices();
    // Remaining vertex set V and, per vertex, its remaining out-edges in E'.
    let mut alive = vec![true; n];
    let mut alive_count = n;
    let mut out_alive = vec![true; n];
    let mut edges_left = sub.num_edges();
    let mut next_start = 0usize;
    let mut steps = 0usize;

    // Walk membership of the current C_V, stamped by outer iteration.
    let mut on_walk = vec![usize::MAX; n];
    let mut walk_vertices = Vec::new();

    let mut round = 0usize;
    while alive_count > 0 || edges_left > 0 {
        while next_start < n && !alive[next_start] {
            next_start += 1;
        }
        if next_start == n {
            return (CoverVerdict::Rejected(RejectReason::LeftoverMaterial), steps);
        }
        let start = next_start;
        walk_vertices.clear();
        let mut walk_edges = 0usize;
        let mut from = start;
        loop {
            steps += 1;
            let outs: &[usize] = if out_alive[from] {
                sub.out_neighbors(from)
            } else {
                &[]
            };
            let [to] = outs[..] else {
                return (CoverVerdict::Rejected(RejectReason::NoUniqueOutEdge), steps);
            };
            on_walk[from] = round;
            walk_vertices.push(from);
            walk_edges += 1;
            if to != start && (on_walk[to] == round || walk_edges == edges_left) {
                return (CoverVerdict::Rejected(RejectReason::PrematureRevisit), steps);
            }
            from = to;
            if to == start {
                break;
            }
        }
        match walk_vertices.len() {
            2 => return (CoverVerdict::Rejected(RejectReason::TwoCycle), steps),
            k if k >= 3 => {
                for &v in &walk_vertices {
                    alive[v] = false;
                    out_alive[v] = false;
                }
                alive_count -= k;
                edges_left -= walk_edges;
            }
            // A one-vertex walk needs a self-loop, which graphs cannot hold.
            _ => unreachable!("self-loop in a validated graph"),
        }
        round += 1;
    }
    (CoverVerdict::Accepted, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_cycles;

    fn fig1() -> DirectedGraph {
        DirectedGraph::from_labeled(
            [],
            [
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
            ],
        )
        .unwrap()
    }

    #[test]
    fn fig1_solution_accepted() {
        let g = fig1();
        let sub = g
            .subgraph([(1, 2), (2, 5), (5, 1), (3, 4), (4, 7), (7, 6), (6, 3)])
            .unwrap();
        assert_eq!(is_cycle_cover(&g, &sub).unwrap(), CoverVerdict::Accepted);
    }

    #[test]
    fn two_cycle_rejected() {
        let g = DirectedGraph::from_labeled([], [(0, 1), (1, 0)]).unwrap();
        assert_eq!(
            is_cycle_cover(&g, &g).unwrap(),
            CoverVerdict::Rejected(RejectReason::TwoCycle)
        );
    }

    #[test]
    fn triangle_accepted() {
        let g = generate_cycles(1, 3).unwrap();
        assert!(is_cycle_cover(&g, &g).unwrap().is_accepted());
    }

    #[test]
    fn whole_fig1_graph_rejected() {
        let g = fig1();
        assert_eq!(
            is_cycle_cover(&g, &g).unwrap(),
            CoverVerdict::Rejected(RejectReason::NoUniqueOutEdge)
        );
    }

    #[test]
    fn extra_in_edge_into_finished_cycle() {
        // 0->1->2->0 plus 3->1: vertex 3's walk exhausts E' without closing.
        let g = DirectedGraph::from_labeled([], [(0, 1), (1, 2), (2, 0), (3, 1)]).unwrap();
        assert_eq!(
            is_cycle_cover(&g, &g).unwrap(),
            CoverVerdict::Rejected(RejectReason::PrematureRevisit)
        );
    }

    #[test]
    fn tail_into_cycle() {
        // 0->1->2->3->1: revisit of 1 mid-walk.
        let g = DirectedGraph::from_labeled([], [(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(
            is_cycle_cover(&g, &g).unwrap(),
            CoverVerdict::Rejected(RejectReason::PrematureRevisit)
        );
    }

    #[test]
    fn empty_graph_is_vacuously_covered() {
        let g = DirectedGraph::from_labeled([], []).unwrap();
        assert!(is_cycle_cover(&g, &g).unwrap().is_accepted());
    }

    #[test]
    fn isolated_vertex_rejected() {
        let g = DirectedGraph::from_labeled([9], [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(
            is_cycle_cover(&g, &g).unwrap(),
            CoverVerdict::Rejected(RejectReason::NoUniqueOutEdge)
        );
    }

    #[test]
    fn preconditions() {
        let g = generate_cycles(1, 3).unwrap();
        let bigger = generate_cycles(1, 4).unwrap();
        assert!(matches!(is_cycle_cover(&g, &bigger), Err(Error::Precondition(_))));
        let foreign = DirectedGraph::from_labeled([], [(0, 2), (2, 1), (1, 0)]).unwrap();
        assert!(matches!(is_cycle_cover(&g, &foreign), Err(Error::Precondition(_))));
    }

    #[test]
    fn steps_bounded_by_edges() {
        let g = generate_cycles(5, 4).unwrap();
        let (v, steps) = check_counted(&g, &g).unwrap();
        assert!(v.is_accepted());
        assert_eq!(steps, 20);
    }
}

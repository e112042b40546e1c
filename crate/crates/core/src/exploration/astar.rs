use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{SearchInstance, SearchTrace};
use crate::error::Result;
use crate::graph::{distances_from, VertexId};
use crate::scalar::Scalar;

struct Open<S> {
    key: S,
    cost: S,
    vertex: VertexId,
}

impl<S: Scalar> PartialEq for Open<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Open<S> {}

impl<S: Scalar> PartialOrd for Open<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Open<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .partial_cmp(&other.key)
            .unwrap_or(Ordering::Equal)
            .then(self.vertex.cmp(&other.vertex))
    }
}

/// A* baseline with the predictions as heuristic.
///
/// This is not an exploration strategy: it sees the whole graph. The trace
/// lists vertices in order of first expansion (reopened vertices are not
/// repeated) and charges the true distance between consecutive ones, so the
/// cost of re-expansions is omitted. The goal is always last.
pub fn run_astar_order<S: Scalar>(inst: &SearchInstance<S>) -> Result<SearchTrace<S>> {
    let g = inst.graph();
    let f = inst.predictions();
    let n = g.n();
    let mut best = vec![S::infinity(); n];
    let mut closed = vec![false; n];
    let mut expanded = vec![false; n];
    let mut order = Vec::new();
    let mut open = BinaryHeap::new();
    best[inst.root().0] = S::zero();
    open.push(Reverse(Open {
        key: f.get(inst.root()),
        cost: S::zero(),
        vertex: inst.root(),
    }));
    while let Some(Reverse(Open { cost, vertex: u, .. })) = open.pop() {
        if closed[u.0] || cost > best[u.0] {
            continue;
        }
        closed[u.0] = true;
        if !expanded[u.0] {
            expanded[u.0] = true;
            order.push(u);
        }
        if u == inst.goal() {
            break;
        }
        for &(v, w) in g.neighbors(u) {
            let c = cost + w;
            if c < best[v.0] {
                best[v.0] = c;
                // reopen if it was already closed
                closed[v.0] = false;
                open.push(Reverse(Open {
                    key: c + f.get(v),
                    cost: c,
                    vertex: v,
                }));
            }
        }
    }
    let costs = order
        .windows(2)
        .map(|w| distances_from(g, w[0]).dist[w[1].0])
        .collect();
    Ok(SearchTrace::from_moves("astar".into(), inst, order, costs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::predictions::Prediction;

    #[test]
    fn perfect_heuristic_on_a_path() {
        let g = Graph::<f64>::path(6, 1.0);
        let inst = SearchInstance::with_exact_predictions(g, VertexId(2), VertexId(5)).unwrap();
        let t = run_astar_order(&inst).unwrap();
        assert_eq!(t.alg, t.opt);
        assert_eq!(*t.visits.last().unwrap(), VertexId(5));
    }

    #[test]
    fn misleading_heuristic_doubles_back() {
        // path 0-1-2-3-4, start 2, goal 4; vertex 1 looks attractive
        let g = Graph::<f64>::path(5, 1.0);
        let inst = SearchInstance::new(g, VertexId(2), VertexId(4), Prediction::new(vec![9.0, 0.0, 2.0, 1.0, 0.0])).unwrap();
        let t = run_astar_order(&inst).unwrap();
        assert_eq!(t.visits, vec![VertexId(2), VertexId(1), VertexId(3), VertexId(4)]);
        assert_eq!(t.alg, 1.0 + 2.0 + 1.0);
    }

    #[test]
    fn reopening_does_not_repeat_vertices() {
        // inconsistent heuristic forces vertex 2 to be reopened
        let g = Graph::<f64>::undirected(4, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0), (2, 3, 5.0)]).unwrap();
        let inst = SearchInstance::new(g, VertexId(0), VertexId(3), Prediction::new(vec![0.0, 10.0, 0.0, 0.0])).unwrap();
        let t = run_astar_order(&inst).unwrap();
        let mut seen = t.visits.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), t.visits.len());
        assert_eq!(*t.visits.last().unwrap(), VertexId(3));
    }
}

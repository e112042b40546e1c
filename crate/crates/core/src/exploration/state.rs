use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{dijkstra, Edge, Graph, ShortestPathTree, VertexId};
use crate::scalar::Scalar;

/// What the agent knows after visiting some vertices: the visited set in
/// visiting order, the frontier (unvisited out-neighbors of visited
/// vertices) and, implicitly, every edge with a visited tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservedState {
    visited: Vec<bool>,
    order: Vec<VertexId>,
    frontier: BTreeSet<VertexId>,
}

impl ObservedState {
    /// State after the agent is placed at `root`.
    pub fn init<S: Scalar>(g: &Graph<S>, root: VertexId) -> Result<Self> {
        g.check_vertex(root)?;
        let mut state = ObservedState {
            visited: vec![false; g.n()],
            order: Vec::new(),
            frontier: BTreeSet::new(),
        };
        state.mark(root, g);
        Ok(state)
    }

    fn mark<S: Scalar>(&mut self, v: VertexId, g: &Graph<S>) {
        self.visited[v.0] = true;
        self.order.push(v);
        self.frontier.remove(&v);
        for &(u, _) in g.neighbors(v) {
            if !self.visited[u.0] {
                self.frontier.insert(u);
            }
        }
    }

    /// Moves a frontier vertex into the visited set and reveals its edges.
    pub fn reveal<S: Scalar>(&mut self, v: VertexId, g: &Graph<S>) -> Result<()> {
        g.check_vertex(v)?;
        if !self.frontier.contains(&v) {
            return Err(Error::Protocol(format!("vertex {v} is not on the frontier")));
        }
        self.mark(v, g);
        Ok(())
    }

    /// Visited vertices in visiting order.
    pub fn visited(&self) -> &[VertexId] {
        &self.order
    }

    pub fn is_visited(&self, v: VertexId) -> bool {
        self.visited[v.0]
    }

    pub fn frontier(&self) -> &BTreeSet<VertexId> {
        &self.frontier
    }

    /// Visited or on the frontier.
    pub fn is_observed(&self, v: VertexId) -> bool {
        self.visited[v.0] || self.frontier.contains(&v)
    }

    /// Observed edges: those with a visited tail (either endpoint visited
    /// for undirected graphs).
    pub fn observed_edges<S: Scalar>(&self, g: &Graph<S>) -> Vec<Edge<S>> {
        g.edges()
            .iter()
            .copied()
            .filter(|e| self.visited[e.u.0] || (!g.is_directed() && self.visited[e.v.0]))
            .collect()
    }

    /// Shortest paths from `source` inside the observed graph.
    pub fn observed_distances<S: Scalar>(&self, g: &Graph<S>, source: VertexId) -> ShortestPathTree<S> {
        let directed = g.is_directed();
        let visited = &self.visited;
        dijkstra(g.n(), source, |u| {
            let from_visited = visited[u.0];
            g.neighbors(u)
                .iter()
                .copied()
                .filter(move |(w, _)| from_visited || (!directed && visited[w.0]))
        })
    }
}

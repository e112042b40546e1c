//! Weighted (di)graphs and the geometric routines built on them: shortest
//! paths, exact tours on small sets, diameters, Steiner trees and Euler walks.

mod paths;
mod steiner;
mod tour;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use paths::{
    all_pairs, dijkstra, distances_from, distances_to, shortest_path, DistanceMatrix,
    ShortestPathTree,
};
pub use steiner::{euler_walk, steiner_tree_approx, steiner_tree_exact_on_tree, EulerWalk, SubTree};
pub use tour::{diameter, tour_cost, TOUR_EXACT_CAP};

/// Dense vertex index in `[0, n)`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge<S> {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: S,
}

/// A weighted graph with non-negative finite weights.
///
/// Undirected graphs store each edge once in `edges`; the adjacency lists
/// hold both orientations. Directed graphs keep separate in-adjacency so that
/// distances *to* a vertex can be computed without building the reverse.
#[derive(Clone, Debug)]
pub struct Graph<S> {
    n: usize,
    directed: bool,
    edges: Vec<Edge<S>>,
    out_adj: Vec<Vec<(VertexId, S)>>,
    in_adj: Vec<Vec<(VertexId, S)>>,
}

impl<S: Scalar> Graph<S> {
    pub fn new<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = if directed { vec![Vec::new(); n] } else { Vec::new() };
        let mut stored = Vec::new();
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::InvalidVertex { id, n });
                }
            }
            if !(w.is_finite() && w >= S::zero()) {
                return Err(Error::Validation {
                    field: format!("edges[{i}]"),
                    message: format!("weight {w} must be finite and non-negative"),
                });
            }
            if u == v {
                return Err(Error::Validation {
                    field: format!("edges[{i}]"),
                    message: format!("self-loop at vertex {u}"),
                });
            }
            let (a, b) = (VertexId(u), VertexId(v));
            out_adj[u].push((b, w));
            if directed {
                in_adj[v].push((a, w));
            } else {
                out_adj[v].push((a, w));
            }
            stored.push(Edge { u: a, v: b, weight: w });
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_by_key(|x| x.0);
        }
        Ok(Graph {
            n,
            directed,
            edges: stored,
            out_adj,
            in_adj,
        })
    }

    pub fn undirected<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        Self::new(n, false, edges)
    }

    pub fn directed<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        Self::new(n, true, edges)
    }

    /// Undirected graph with every edge of weight one.
    pub fn unweighted<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(n, false, edges.into_iter().map(|(u, v)| (u, v, S::one())))
    }

    /// Path `0 - 1 - ... - (n-1)` with uniform weight.
    pub fn path(n: usize, weight: S) -> Self {
        Self::undirected(n, (1..n).map(|i| (i - 1, i, weight))).expect("path edges are valid")
    }

    /// Star with center `0` and leaves `1..n`.
    pub fn star(n: usize, weight: S) -> Self {
        Self::undirected(n, (1..n).map(|i| (0, i, weight))).expect("star edges are valid")
    }

    pub fn cycle(n: usize, weight: S) -> Self {
        Self::undirected(n, (0..n).map(|i| (i, (i + 1) % n, weight))).expect("cycle edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + Clone {
        (0..self.n).map(VertexId)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.0 < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { id: v.0, n: self.n })
        }
    }

    /// Out-neighbors (all neighbors when undirected), sorted by id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, S)] {
        &self.out_adj[v.0]
    }

    /// In-neighbors (all neighbors when undirected), sorted by id.
    pub fn in_neighbors(&self, v: VertexId) -> &[(VertexId, S)] {
        if self.directed {
            &self.in_adj[v.0]
        } else {
            &self.out_adj[v.0]
        }
    }

    /// Number of incident edges, counting both directions for digraphs.
    pub fn degree(&self, v: VertexId) -> usize {
        if self.directed {
            self.out_adj[v.0].len() + self.in_adj[v.0].len()
        } else {
            self.out_adj[v.0].len()
        }
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> S {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Weight of the lightest edge between `u` and `v`, if any.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<S> {
        self.out_adj[u.0]
            .iter()
            .filter(|(w, _)| *w == v)
            .map(|&(_, w)| w)
            .reduce(S::min)
    }

    /// Connectivity ignoring edge direction.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            let incident = self.neighbors(u).iter().chain(if self.directed {
                self.in_adj[u.0].iter()
            } else {
                [].iter()
            });
            for &(v, _) in incident {
                if !seen[v.0] {
                    seen[v.0] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Undirected, connected and with exactly `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        !self.directed && self.n > 0 && self.edges.len() == self.n - 1 && self.is_connected()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == S::one())
    }

    /// Converts every weight to another scalar type.
    pub fn cast<T: Scalar>(&self) -> Graph<T> {
        Graph::new(
            self.n,
            self.directed,
            self.edges
                .iter()
                .map(|e| (e.u.0, e.v.0, T::of(e.weight.as_f64()))),
        )
        .expect("casting preserves validity")
    }
}

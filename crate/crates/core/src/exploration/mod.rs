//! The exploration problem: the agent only sees the part of the graph
//! adjacent to the vertices it has visited.
//!
//! [`SearchInstance`] holds the hidden truth. Strategies interact with it
//! through an [`ObservedState`], which only exposes observed vertices and
//! edges, so decisions cannot peek at the rest of the graph.

mod astar;
mod state;
mod strategies;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{all_pairs, distances_to, Graph, VertexId};
use crate::predictions::{error_profile, ErrorProfile, Prediction};
use crate::scalar::Scalar;

pub use astar::run_astar_order;
pub use state::ObservedState;
pub use strategies::{
    run_beta_weighted, run_greedy, run_pruned_known_eps, run_smallest_prediction, run_strategy,
    RunOptions, Strategy, DEFAULT_BETA,
};

/// Graph, root, goal and predictions.
#[derive(Clone, Debug)]
pub struct SearchInstance<S> {
    graph: Graph<S>,
    root: VertexId,
    goal: VertexId,
    predictions: Prediction<S>,
    integer_distance: bool,
    embedding: Option<Vec<VertexId>>,
    dist_to_goal: Vec<S>,
}

impl<S: Scalar> SearchInstance<S> {
    /// Validates ids, prediction length and that the goal is reachable.
    pub fn new(graph: Graph<S>, root: VertexId, goal: VertexId, predictions: Prediction<S>) -> Result<Self> {
        graph.check_vertex(root)?;
        graph.check_vertex(goal)?;
        if predictions.len() != graph.n() {
            return Err(Error::Validation {
                field: "predictions".into(),
                message: format!("{} values for {} vertices", predictions.len(), graph.n()),
            });
        }
        if predictions.values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation {
                field: "predictions".into(),
                message: "predictions must be finite".into(),
            });
        }
        let dist_to_goal = distances_to(&graph, goal);
        if dist_to_goal[root.0].is_infinite() {
            return Err(Error::Input(format!("goal {goal} is unreachable from root {root}")));
        }
        Ok(SearchInstance {
            graph,
            root,
            goal,
            predictions,
            integer_distance: false,
            embedding: None,
            dist_to_goal,
        })
    }

    /// Instance with perfect predictions.
    pub fn with_exact_predictions(graph: Graph<S>, root: VertexId, goal: VertexId) -> Result<Self> {
        let d = distances_to(&graph, goal);
        Self::new(graph, root, goal, Prediction::exact(&d))
    }

    /// Sets the integer-distance flag, checking every pairwise distance.
    pub fn with_integer_distance(mut self, flag: bool) -> Result<Self> {
        if flag && !all_pairs(&self.graph).is_integral() {
            return Err(Error::Validation {
                field: "flags.integer_distance".into(),
                message: "some pairwise distance is not an integer".into(),
            });
        }
        self.integer_distance = flag;
        Ok(self)
    }

    /// Attaches an embedding into the path `0 - 1 - ... - (n-1)`:
    /// `embedding[v]` is the position of `v`.
    pub fn with_embedding(mut self, embedding: Option<Vec<VertexId>>) -> Result<Self> {
        if let Some(map) = &embedding {
            let n = self.graph.n();
            if map.len() != n {
                return Err(Error::Validation {
                    field: "embedding".into(),
                    message: format!("{} positions for {n} vertices", map.len()),
                });
            }
            let mut seen = vec![false; n];
            for (i, p) in map.iter().enumerate() {
                if p.0 >= n || std::mem::replace(&mut seen[p.0], true) {
                    return Err(Error::Validation {
                        field: format!("embedding[{i}]"),
                        message: format!("position {p} is out of range or reused"),
                    });
                }
            }
        }
        self.embedding = embedding;
        Ok(self)
    }

    /// Same graph, root and goal with different predictions.
    pub fn with_predictions(&self, predictions: Prediction<S>) -> Result<Self> {
        let mut inst = Self::new(self.graph.clone(), self.root, self.goal, predictions)?;
        inst.integer_distance = self.integer_distance;
        inst.embedding = self.embedding.clone();
        Ok(inst)
    }

    pub fn graph(&self) -> &Graph<S> {
        &self.graph
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn goal(&self) -> VertexId {
        self.goal
    }

    pub fn predictions(&self) -> &Prediction<S> {
        &self.predictions
    }

    pub fn integer_distance(&self) -> bool {
        self.integer_distance
    }

    pub fn embedding(&self) -> Option<&[VertexId]> {
        self.embedding.as_deref()
    }

    /// True distance from every vertex to the goal.
    pub fn dist_to_goal(&self) -> &[S] {
        &self.dist_to_goal
    }

    /// `d(root, goal)`.
    pub fn opt(&self) -> S {
        self.dist_to_goal[self.root.0]
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn profile(&self) -> ErrorProfile<S> {
        error_profile(&self.dist_to_goal, &self.predictions, self.goal)
    }
}

/// Record of one search: visited vertices in order and what each move cost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchTrace<S> {
    pub strategy: String,
    /// `v_0 = root, ..., v_T = goal`.
    pub visits: Vec<VertexId>,
    /// Cost of the move into `visits[i + 1]`.
    pub step_costs: Vec<S>,
    pub alg: S,
    pub opt: S,
    /// Progress of each move: `d(v_{i-1}, g) - d(v_i, g)`.
    pub deltas: Vec<S>,
    /// Set when a strategy ran outside the setting its guarantee covers.
    pub no_guarantee: bool,
}

impl<S: Scalar> SearchTrace<S> {
    pub(crate) fn from_moves(strategy: String, inst: &SearchInstance<S>, visits: Vec<VertexId>, step_costs: Vec<S>) -> Self {
        let d = inst.dist_to_goal();
        let deltas = visits.windows(2).map(|w| d[w[0].0] - d[w[1].0]).collect();
        SearchTrace {
            strategy,
            alg: step_costs.iter().copied().sum(),
            opt: inst.opt(),
            visits,
            step_costs,
            deltas,
            no_guarantee: false,
        }
    }

    pub fn ratio(&self) -> S {
        if self.opt > S::zero() {
            self.alg / self.opt
        } else if self.alg == S::zero() {
            S::one()
        } else {
            S::infinity()
        }
    }
}

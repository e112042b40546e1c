use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ObservedState, SearchInstance, SearchTrace};
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::scalar::{le_tol, Scalar};

/// Weight on travel distance used by the beta-weighted strategy unless
/// configured otherwise.
pub const DEFAULT_BETA: f64 = 2.0 / 3.0;

/// Online exploration strategies. Each step moves to the frontier vertex
/// minimizing the strategy's score, ties going to the smallest id.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// `d_obs(cur, v) + f(v)`.
    Greedy,
    /// Greedy restricted to `{v : d_obs(v, r) <= f(r) / (1 - eps)}`.
    Pruned { eps: f64 },
    /// `beta * d_obs(cur, v) + f(v)`.
    BetaWeighted { beta: f64 },
    /// `f(v)` alone.
    SmallestPrediction,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Greedy => write!(f, "greedy"),
            Strategy::Pruned { .. } => write!(f, "pruned"),
            Strategy::BetaWeighted { .. } => write!(f, "beta_weighted"),
            Strategy::SmallestPrediction => write!(f, "smallest_prediction"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Also visit unvisited vertices the agent walks through on its way to
    /// the chosen vertex. Off by default; the analyzed model only counts
    /// the chosen vertex as visited.
    pub opportunistic_reveal: bool,
}

pub fn run_greedy<S: Scalar>(inst: &SearchInstance<S>) -> Result<SearchTrace<S>> {
    run_strategy(inst, Strategy::Greedy, RunOptions::default())
}

pub fn run_pruned_known_eps<S: Scalar>(inst: &SearchInstance<S>, eps: f64) -> Result<SearchTrace<S>> {
    run_strategy(inst, Strategy::Pruned { eps }, RunOptions::default())
}

pub fn run_beta_weighted<S: Scalar>(inst: &SearchInstance<S>, beta: f64) -> Result<SearchTrace<S>> {
    run_strategy(inst, Strategy::BetaWeighted { beta }, RunOptions::default())
}

pub fn run_smallest_prediction<S: Scalar>(inst: &SearchInstance<S>) -> Result<SearchTrace<S>> {
    run_strategy(inst, Strategy::SmallestPrediction, RunOptions::default())
}

pub fn run_strategy<S: Scalar>(
    inst: &SearchInstance<S>,
    strategy: Strategy,
    opts: RunOptions,
) -> Result<SearchTrace<S>> {
    match strategy {
        Strategy::Pruned { eps } if !(0.0..1.0).contains(&eps) => {
            return Err(Error::Input(format!("pruning parameter {eps} outside [0, 1)")));
        }
        Strategy::BetaWeighted { beta } if !(beta > 0.0 && beta <= 1.0) => {
            return Err(Error::Input(format!("beta {beta} outside (0, 1]")));
        }
        _ => {}
    }
    let g = inst.graph();
    let f = inst.predictions();
    let root = inst.root();
    let mut state = ObservedState::init(g, root)?;
    let mut visits = vec![root];
    let mut costs = Vec::new();
    let mut cur = root;

    let radius = match strategy {
        Strategy::Pruned { eps } => Some(f.get(root) / (S::one() - S::of(eps))),
        _ => None,
    };

    while cur != inst.goal() {
        if state.frontier().is_empty() {
            return Err(Error::Disconnected);
        }
        let from_cur = state.observed_distances(g, cur);
        let from_root = radius.map(|_| state.observed_distances(g, root));

        let mut best: Option<(S, VertexId)> = None;
        let mut any_reachable = false;
        for &v in state.frontier() {
            let d = from_cur.dist[v.0];
            if d.is_infinite() {
                continue;
            }
            any_reachable = true;
            if let (Some(r), Some(tree)) = (radius, &from_root) {
                if !le_tol(tree.dist[v.0], r) {
                    continue;
                }
            }
            let score = match strategy {
                Strategy::Greedy | Strategy::Pruned { .. } => d + f.get(v),
                Strategy::BetaWeighted { beta } => S::of(beta) * d + f.get(v),
                Strategy::SmallestPrediction => f.get(v),
            };
            // frontier iterates in increasing id, so strict < keeps the smallest id
            if best.is_none_or(|(b, _)| score < b) {
                best = Some((score, v));
            }
        }
        let next = match best {
            Some((_, v)) => v,
            None if !any_reachable => return Err(Error::Disconnected),
            None => {
                return Err(Error::ModelViolation(
                    "no frontier vertex lies within the pruning radius; predictions violate the relative error bound".into(),
                ))
            }
        };

        let path = from_cur.path_to(next);
        if opts.opportunistic_reveal {
            let mut last = cur;
            for &w in &path[1..] {
                if state.is_visited(w) {
                    continue;
                }
                state.reveal(w, g)?;
                visits.push(w);
                costs.push(from_cur.dist[w.0] - from_cur.dist[last.0]);
                last = w;
                if w == inst.goal() {
                    break;
                }
            }
            cur = last;
        } else {
            state.reveal(next, g)?;
            visits.push(next);
            costs.push(from_cur.dist[next.0]);
            cur = next;
        }
    }

    let mut trace = SearchTrace::from_moves(strategy.to_string(), inst, visits, costs);
    trace.no_guarantee = matches!(strategy, Strategy::Pruned { .. }) && !g.is_tree();
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::predictions::Prediction;

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&i| VertexId(i)).collect()
    }

    fn p3(goal: usize) -> SearchInstance<f64> {
        let g = Graph::path(3, 5.0);
        SearchInstance::new(g, VertexId(1), VertexId(goal), Prediction::new(vec![0.0, 5.0, 0.0])).unwrap()
    }

    #[test]
    fn p3_worst_case() {
        let t = run_greedy(&p3(2)).unwrap();
        assert_eq!(t.visits, ids(&[1, 0, 2]));
        assert_eq!(t.step_costs, vec![5.0, 10.0]);
        assert_eq!(t.alg, 15.0);
        assert_eq!(run_smallest_prediction(&p3(2)).unwrap().alg, 15.0);
        assert_eq!(run_greedy(&p3(0)).unwrap().alg, 5.0);
    }

    #[test]
    fn deltas_sum_to_opt() {
        let t = run_greedy(&p3(2)).unwrap();
        assert_eq!(t.deltas, vec![-5.0, 10.0]);
        assert_eq!(t.deltas.iter().sum::<f64>(), t.opt);
    }

    #[test]
    fn trivial_instance() {
        let g = Graph::<f64>::path(2, 1.0);
        let inst = SearchInstance::with_exact_predictions(g, VertexId(1), VertexId(1)).unwrap();
        let t = run_greedy(&inst).unwrap();
        assert_eq!(t.visits, ids(&[1]));
        assert_eq!(t.alg, 0.0);
    }

    #[test]
    fn perfect_predictions_follow_a_shortest_path() {
        let g = Graph::<f64>::undirected(6, [(0, 1, 1.0), (1, 2, 2.0), (0, 3, 2.0), (3, 4, 2.0), (4, 2, 1.0), (2, 5, 1.0)]).unwrap();
        let inst = SearchInstance::with_exact_predictions(g, VertexId(0), VertexId(5)).unwrap();
        for s in [
            Strategy::Greedy,
            Strategy::Pruned { eps: 0.1 },
            Strategy::BetaWeighted { beta: DEFAULT_BETA },
            Strategy::SmallestPrediction,
        ] {
            let t = run_strategy(&inst, s, RunOptions::default()).unwrap();
            assert_eq!(t.alg, t.opt, "{s}");
        }
    }

    #[test]
    fn beta_one_is_greedy() {
        let g = Graph::<f64>::star(6, 1.0);
        let inst = SearchInstance::new(g, VertexId(0), VertexId(5), Prediction::new(vec![1.0, 3.0, 0.5, 2.0, 0.5, 1.0])).unwrap();
        let a = run_greedy(&inst).unwrap();
        let b = run_beta_weighted(&inst, 1.0).unwrap();
        assert_eq!(a.visits, b.visits);
        assert_eq!(a.alg, b.alg);
    }

    #[test]
    fn directed_dead_end_is_disconnected() {
        // 0 -> 1 (sink), 0 -> 2 -> 3; the sink looks closest
        let g = Graph::<f64>::directed(4, [(0, 1, 1.0), (0, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let inst = SearchInstance::new(g, VertexId(0), VertexId(3), Prediction::new(vec![2.0, 0.0, 1.0, 0.0])).unwrap();
        assert!(matches!(run_greedy(&inst), Err(Error::Disconnected)));
    }

    #[test]
    fn pruning_detects_model_violation() {
        // f(r) = 0 makes the pruning radius zero
        let g = Graph::<f64>::path(3, 1.0);
        let inst = SearchInstance::new(g, VertexId(0), VertexId(2), Prediction::new(vec![0.0, 1.0, 0.0])).unwrap();
        assert!(matches!(run_pruned_known_eps(&inst, 0.2), Err(Error::ModelViolation(_))));
        assert!(run_pruned_known_eps(&inst, 1.0).is_err());
    }

    #[test]
    fn opportunistic_reveal_counts_walked_through_vertices() {
        // triangle 0-1-2 plus 1-3, 2-4; visiting 1 then 2 via 0
        let g = Graph::<f64>::undirected(5, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 5.0), (2, 4, 1.0)]).unwrap();
        let inst = SearchInstance::new(g, VertexId(0), VertexId(4), Prediction::new(vec![2.0, 0.0, 3.0, 9.0, 0.0])).unwrap();
        let plain = run_greedy(&inst).unwrap();
        let opp = run_strategy(&inst, Strategy::Greedy, RunOptions { opportunistic_reveal: true }).unwrap();
        assert_eq!(plain.alg, opp.alg);
        assert_eq!(opp.alg, opp.step_costs.iter().sum::<f64>());
    }
}

//! Full-information planning: the graph and every prediction are known up
//! front, only the goal's identity is hidden.
//!
//! The planner works in rounds `lambda = 0, 1, 2, ...`. Round `lambda` takes the
//! sublevel set `L = {v : phi(v) <= 2^lambda}` of an implied-error function,
//! builds a Steiner tree over `L` (exact on trees, 2-approximate otherwise),
//! moves to the nearest vertex of `L` and walks the tree's Euler tour. The
//! run stops the moment the goal is stepped on.
//!
//! Entering each round at a vertex of `L` (rather than anywhere on the tree)
//! keeps the agent on a vertex that every later sublevel set contains, so
//! moves between rounds are free after the first one.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exploration::SearchInstance;
use crate::graph::{
    all_pairs, distances_from, euler_walk, DistanceMatrix, steiner_tree_approx, steiner_tree_exact_on_tree, SubTree, VertexId,
};
use crate::predictions::{implied_error_with, sublevel_set, ImpliedError, Phi};
use crate::scalar::Scalar;

/// Diagnostics for one round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanningRound<S> {
    pub lambda: u32,
    pub threshold: S,
    pub sublevel: Vec<VertexId>,
    /// Vertex count of the Steiner tree.
    pub tree_size: usize,
    pub tree_weight: S,
    /// Largest true distance between two sublevel vertices.
    pub sublevel_diameter: S,
    /// Distance walked in this round (transition plus tour).
    pub travel_cost: S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanningTrace<S> {
    pub which: Phi,
    pub rounds: Vec<PlanningRound<S>>,
    /// Every vertex stepped on, in order, starting at the root.
    pub visits: Vec<VertexId>,
    pub alg: S,
    pub opt: S,
    /// Value of the implied error at the goal.
    pub phi_goal: S,
}

impl<S: Scalar> PlanningTrace<S> {
    /// Thresholds of the rounds that ran, in order.
    pub fn thresholds(&self) -> Vec<S> {
        self.rounds.iter().map(|r| r.threshold).collect()
    }

    /// One CSV row per round.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "lambda",
            "threshold",
            "sublevel_size",
            "tree_size",
            "tree_weight",
            "sublevel_diameter",
            "travel_cost",
        ])?;
        for r in &self.rounds {
            w.write_record([
                r.lambda.to_string(),
                r.threshold.to_string(),
                r.sublevel.len().to_string(),
                r.tree_size.to_string(),
                r.tree_weight.to_string(),
                r.sublevel_diameter.to_string(),
                r.travel_cost.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Walker<'a, S: Scalar> {
    inst: &'a SearchInstance<S>,
    pos: VertexId,
    visits: Vec<VertexId>,
    alg: S,
    done: bool,
}

impl<S: Scalar> Walker<'_, S> {
    /// Steps onto `v` at cost `c`; returns true once the goal is reached.
    fn step(&mut self, v: VertexId, c: S) -> bool {
        self.alg = self.alg + c;
        self.pos = v;
        if self.visits.last() != Some(&v) {
            self.visits.push(v);
        }
        self.done = v == self.inst.goal();
        self.done
    }
}

fn steiner<S: Scalar>(inst: &SearchInstance<S>, terminals: &[VertexId]) -> Result<SubTree<S>> {
    if inst.graph().is_tree() {
        steiner_tree_exact_on_tree(inst.graph(), terminals)
    } else {
        steiner_tree_approx(inst.graph(), terminals)
    }
}

/// Runs the planner with the chosen implied-error function.
///
/// `phi0` requires an unweighted graph and `phi1` an instance flagged as
/// integer-distance.
pub fn run_full_info<S: Scalar>(inst: &SearchInstance<S>, which: Phi) -> Result<PlanningTrace<S>> {
    let g = inst.graph();
    if g.is_directed() {
        return Err(Error::Input("planning needs an undirected graph".into()));
    }
    match which {
        Phi::Phi0 if !g.is_unweighted() => {
            return Err(Error::Input("phi0 planning needs an unweighted graph".into()));
        }
        Phi::Phi1 if !inst.integer_distance() => {
            return Err(Error::Input("phi1 planning needs an integer-distance instance".into()));
        }
        _ => {}
    }
    let dist = all_pairs(g);
    let phi = implied_error_with(&dist, inst.predictions(), which)?;
    run_with_phi(inst, &phi, &dist)
}

/// Planner over a precomputed implied-error vector and distance matrix.
pub fn run_with_phi<S: Scalar>(
    inst: &SearchInstance<S>,
    phi: &ImpliedError<S>,
    dist: &DistanceMatrix<S>,
) -> Result<PlanningTrace<S>> {
    if !dist.matches(inst.graph()) {
        return Err(Error::Input("distance matrix belongs to a different graph".into()));
    }
    let g = inst.graph();
    let mut walker = Walker {
        inst,
        pos: inst.root(),
        visits: vec![inst.root()],
        alg: S::zero(),
        done: inst.root() == inst.goal(),
    };
    let mut rounds = Vec::new();
    let max_phi = phi.values.iter().copied().fold(S::zero(), S::max);
    let mut lambda = 0u32;
    while !walker.done {
        let threshold = S::of(2f64.powi(lambda as i32));
        let sublevel = sublevel_set(phi, threshold);
        if sublevel.is_empty() {
            if threshold > max_phi {
                return Err(Error::Infeasible("sublevel sets never become non-empty".into()));
            }
            lambda += 1;
            continue;
        }
        let tree = steiner(inst, &sublevel)?;
        let before = walker.alg;

        // move to the nearest sublevel vertex (smallest id on ties)
        let spt = distances_from(g, walker.pos);
        let entry = *sublevel
            .iter()
            .min_by(|a, b| spt.dist[a.0].partial_cmp(&spt.dist[b.0]).expect("finite").then(a.cmp(b)))
            .expect("non-empty");
        if spt.dist[entry.0].is_infinite() {
            return Err(Error::Infeasible(format!("sublevel vertex {entry} is unreachable")));
        }
        let path = spt.path_to(entry);
        for w in path.windows(2) {
            let c = spt.dist[w[1].0] - spt.dist[w[0].0];
            if walker.step(w[1], c) {
                break;
            }
        }
        if !walker.done {
            for (v, c) in euler_walk(&tree, entry)? {
                if walker.step(v, c) {
                    break;
                }
            }
        }

        let mut diam = S::zero();
        for &a in &sublevel {
            for &b in &sublevel {
                diam = diam.max(dist.get(a, b));
            }
        }
        rounds.push(PlanningRound {
            lambda,
            threshold,
            tree_size: tree.len(),
            tree_weight: tree.weight(),
            sublevel_diameter: diam,
            sublevel,
            travel_cost: walker.alg - before,
        });
        if !walker.done && threshold >= max_phi {
            return Err(Error::Infeasible("every vertex was toured without reaching the goal".into()));
        }
        lambda += 1;
    }
    Ok(PlanningTrace {
        which: phi.which,
        rounds,
        visits: walker.visits,
        alg: walker.alg,
        opt: inst.opt(),
        phi_goal: phi.get(inst.goal()),
    })
}

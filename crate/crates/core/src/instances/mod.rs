//! Random graph families, adversarial constructions and the instance file
//! format.

mod io;
mod lower_bounds;

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::scalar::Scalar;

pub use io::{instance_from_json, instance_to_json, load_instance, save_instance, Flags, InstanceFile};
pub use lower_bounds::{
    gen_lb_p3, gen_lb_planning_tree, gen_lb_relative_star, gen_lb_star, lb_relative_star_with_pendant,
    lb_star_with_goal, planning_tree_graph, PlanningTreeLayout,
};

/// Attempts allowed when rejecting disconnected Erdos-Renyi samples.
pub const ER_REJECTION_BUDGET: usize = 10_000;

fn one() -> u32 {
    1
}

fn half() -> f64 {
    0.5
}

/// A graph family together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    /// Uniform labelled tree; edge weights uniform integers in `1..=max_weight`.
    RandomTree {
        n: usize,
        #[serde(default = "one")]
        max_weight: u32,
    },
    /// Backbone path with first-level leaves (probability `p1` per new
    /// vertex) and second-level leaves (probability `p2` among those).
    RandomLobster {
        n: usize,
        #[serde(default = "half")]
        p1: f64,
        #[serde(default = "half")]
        p2: f64,
    },
    /// `G(n, p)` conditioned on being connected.
    ErdosRenyi { n: usize, p: f64 },
    /// Two `k`-cycles joined by a perfect matching (`2k` vertices, `3k` edges).
    CircularLadder { k: usize },
    LbP3 { w: f64 },
    LbStar { n: usize, einf: f64 },
    LbRelativeStar { n: usize, eps: f64 },
    LbPlanningTree { delta: usize, w: f64 },
}

impl FamilyParams {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::RandomTree { .. } => "random_tree",
            FamilyParams::RandomLobster { .. } => "random_lobster",
            FamilyParams::ErdosRenyi { .. } => "erdos_renyi",
            FamilyParams::CircularLadder { .. } => "circular_ladder",
            FamilyParams::LbP3 { .. } => "lb_p3",
            FamilyParams::LbStar { .. } => "lb_star",
            FamilyParams::LbRelativeStar { .. } => "lb_relative_star",
            FamilyParams::LbPlanningTree { .. } => "lb_planning_tree",
        }
    }

    pub fn is_lower_bound(&self) -> bool {
        matches!(
            self,
            FamilyParams::LbP3 { .. }
                | FamilyParams::LbStar { .. }
                | FamilyParams::LbRelativeStar { .. }
                | FamilyParams::LbPlanningTree { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub params: FamilyParams,
    #[serde(default)]
    pub seed: u64,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}

/// Graph of the given family; deterministic in `(params, seed)`.
pub fn gen_family<S: Scalar>(spec: &InstanceSpec) -> Result<Graph<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    gen_family_with(&spec.params, &mut rng)
}

pub fn gen_family_with<S: Scalar, R: Rng + ?Sized>(params: &FamilyParams, rng: &mut R) -> Result<Graph<S>> {
    match *params {
        FamilyParams::RandomTree { n, max_weight } => random_tree(n, max_weight, rng),
        FamilyParams::RandomLobster { n, p1, p2 } => random_lobster(n, p1, p2, rng),
        FamilyParams::ErdosRenyi { n, p } => erdos_renyi(n, p, rng),
        FamilyParams::CircularLadder { k } => circular_ladder(k),
        FamilyParams::LbP3 { w } => Ok(gen_lb_p3(S::of(w))?.0.graph().clone()),
        FamilyParams::LbStar { n, einf } => Ok(gen_lb_star(n, S::of(einf))?.graph().clone()),
        FamilyParams::LbRelativeStar { n, eps } => Ok(gen_lb_relative_star(n, S::of(eps))?.graph().clone()),
        FamilyParams::LbPlanningTree { delta, w } => Ok(gen_lb_planning_tree(delta, S::of(w))?.graph().clone()),
    }
}

/// Uniformly random labelled tree on `n` vertices, decoded from a random
/// Prufer sequence.
pub fn random_tree<S: Scalar, R: Rng + ?Sized>(n: usize, max_weight: u32, rng: &mut R) -> Result<Graph<S>> {
    if n == 0 {
        return Err(invalid("n", "a tree needs at least one vertex"));
    }
    if max_weight == 0 {
        return Err(invalid("max_weight", "weights must be positive"));
    }
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.random_range(0..n)).collect();
    let pairs = prufer_decode(n, &seq);
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, S::of(rng.random_range(1..=max_weight) as f64)))
        .collect();
    Graph::undirected(n, edges)
}

/// Edges of the labelled tree with the given Prufer sequence.
pub fn prufer_decode(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    if n <= 1 {
        return Vec::new();
    }
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let Reverse(leaf) = leaves.pop().expect("a Prufer step always has a leaf");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.push(Reverse(x));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    edges
}

/// Random lobster on exactly `n` vertices with unit weights.
///
/// Vertices are added one at a time. With probability `1 - p1` a vertex
/// extends the backbone path. Otherwise it becomes a leaf: with probability
/// `p2` (once first-level leaves exist) of a random first-level leaf, else of
/// a random backbone vertex. Labels are shuffled at the end.
pub fn random_lobster<S: Scalar, R: Rng + ?Sized>(n: usize, p1: f64, p2: f64, rng: &mut R) -> Result<Graph<S>> {
    if n == 0 {
        return Err(invalid("n", "a lobster needs at least one vertex"));
    }
    for (name, p) in [("p1", p1), ("p2", p2)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(name, format!("probability {p} outside [0, 1]")));
        }
    }
    let mut backbone = vec![0usize];
    let mut level1 = Vec::new();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let parent = if rng.random_bool(p1) {
            if !level1.is_empty() && rng.random_bool(p2) {
                *level1.choose(rng).expect("non-empty")
            } else {
                level1.push(i);
                *backbone.choose(rng).expect("non-empty")
            }
        } else {
            let last = *backbone.last().expect("non-empty");
            backbone.push(i);
            last
        };
        edges.push((parent, i));
    }
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    Graph::unweighted(n, edges.into_iter().map(|(u, v)| (label[u], label[v])))
}

/// `G(n, p)` with unit weights, resampled until connected.
pub fn erdos_renyi<S: Scalar, R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph<S>> {
    if n == 0 {
        return Err(invalid("n", "need at least one vertex"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", format!("edge probability {p} outside (0, 1]")));
    }
    for _ in 0..ER_REJECTION_BUDGET {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::unweighted(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no connected G({n}, {p}) sample in {ER_REJECTION_BUDGET} attempts"
    )))
}

/// Circular ladder on `2k` vertices: outer cycle `0..k`, inner cycle
/// `k..2k`, and rungs `i - (k + i)`.
pub fn circular_ladder<S: Scalar>(k: usize) -> Result<Graph<S>> {
    if k < 3 {
        return Err(invalid("k", "a circular ladder needs k >= 3"));
    }
    let mut edges = Vec::with_capacity(3 * k);
    for i in 0..k {
        edges.push((i, (i + 1) % k));
        edges.push((k + i, k + (i + 1) % k));
        edges.push((i, k + i));
    }
    Graph::unweighted(2 * k, edges)
}

/// Uniformly random ordered pair of distinct vertices.
pub fn random_endpoints<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(VertexId, VertexId)> {
    if n < 2 {
        return Err(Error::Input("need two vertices to pick distinct endpoints".into()));
    }
    let root = rng.random_range(0..n);
    let mut goal = rng.random_range(0..n - 1);
    if goal >= root {
        goal += 1;
    }
    Ok((VertexId(root), VertexId(goal)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(params: FamilyParams, seed: u64) -> InstanceSpec {
        InstanceSpec { params, seed }
    }

    #[test]
    fn circular_ladder_counts() {
        let g = circular_ladder::<f64>(3).unwrap();
        assert_eq!((g.n(), g.edges().len()), (6, 9));
        assert_eq!(g.max_degree(), 3);
        assert!(g.is_connected());
        assert!(circular_ladder::<f64>(2).is_err());
    }

    #[test]
    fn random_tree_is_a_tree() {
        for seed in 0..20 {
            let g: Graph<f64> = gen_family(&spec(FamilyParams::RandomTree { n: 100, max_weight: 1 }, seed)).unwrap();
            assert_eq!(g.edges().len(), 99);
            assert!(g.is_tree());
        }
        let g: Graph<f64> = gen_family(&spec(FamilyParams::RandomTree { n: 1, max_weight: 1 }, 0)).unwrap();
        assert!(g.is_tree());
    }

    #[test]
    fn prufer_known_sequence() {
        // sequence (3, 3, 3, 4) on 6 vertices: star around 3 plus 4-5
        let mut e = prufer_decode(6, &[3, 3, 3, 4]);
        e.sort();
        assert_eq!(e, vec![(0, 3), (1, 3), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn prufer_is_uniform_on_four_vertices() {
        // Cayley: 16 labelled trees on 4 vertices, each should appear.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..16_000 {
            let g: Graph<f64> = random_tree(4, 1, &mut rng).unwrap();
            let mut e: Vec<_> = g.edges().iter().map(|e| (e.u.0.min(e.v.0), e.u.0.max(e.v.0))).collect();
            e.sort();
            *counts.entry(e).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 16);
        assert!(counts.values().all(|&c| (800..1200).contains(&c)));
    }

    #[test]
    fn lobster_shape() {
        for seed in 0..20 {
            let g: Graph<f64> = gen_family(&spec(FamilyParams::RandomLobster { n: 60, p1: 0.5, p2: 0.5 }, seed)).unwrap();
            assert!(g.is_tree());
            // removing leaves twice leaves a path (or nothing)
            let mut alive = vec![true; g.n()];
            for _ in 0..2 {
                let deg: Vec<usize> = g
                    .vertices()
                    .map(|v| g.neighbors(v).iter().filter(|(w, _)| alive[w.0]).count())
                    .collect();
                let leaves: Vec<_> = g.vertices().filter(|v| alive[v.0] && deg[v.0] <= 1).collect();
                let remaining = alive.iter().filter(|&&a| a).count();
                if remaining > 2 {
                    leaves.iter().for_each(|v| alive[v.0] = false);
                }
            }
            for v in g.vertices().filter(|v| alive[v.0]) {
                assert!(g.neighbors(v).iter().filter(|(w, _)| alive[w.0]).count() <= 2);
            }
        }
    }

    #[test]
    fn erdos_renyi_connected() {
        for seed in 0..5 {
            let g: Graph<f64> = gen_family(&spec(FamilyParams::ErdosRenyi { n: 100, p: 0.1 }, seed)).unwrap();
            assert!(g.is_connected());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(erdos_renyi::<f64, _>(200, 0.0001, &mut rng), Err(Error::Generation(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let s = spec(FamilyParams::RandomLobster { n: 40, p1: 0.5, p2: 0.5 }, 17);
        let a: Graph<f64> = gen_family(&s).unwrap();
        let b: Graph<f64> = gen_family(&s).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn spec_json_shape() {
        let s: InstanceSpec = serde_json::from_str(r#"{"family":"random_tree","n":10,"seed":4}"#).unwrap();
        assert_eq!(s.params, FamilyParams::RandomTree { n: 10, max_weight: 1 });
        assert_eq!(s.seed, 4);
    }

    #[test]
    fn endpoints_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (r, g) = random_endpoints(3, &mut rng).unwrap();
            assert_ne!(r, g);
        }
    }
}

//! Adversarial instances on which greedy-style search pays its worst case.
//!
//! Goals sit where the smallest-id tie-break hurts most, so a single
//! deterministic run realizes the worst case.

use crate::error::{Error, Result};
use crate::exploration::SearchInstance;
use crate::graph::{Graph, VertexId};
use crate::predictions::Prediction;
use crate::scalar::{is_integral, Scalar};

fn positive<S: Scalar>(name: &str, x: S) -> Result<()> {
    if x.is_finite() && x > S::zero() {
        Ok(())
    } else {
        Err(Error::Validation {
            field: name.into(),
            message: format!("{x} must be positive and finite"),
        })
    }
}

fn at_least(name: &str, x: usize, min: usize) -> Result<()> {
    if x >= min {
        Ok(())
    } else {
        Err(Error::Validation {
            field: name.into(),
            message: format!("{x} is below the minimum {min}"),
        })
    }
}

fn flag_integral<S: Scalar>(inst: SearchInstance<S>, w: S) -> Result<SearchInstance<S>> {
    let integral = is_integral(w);
    inst.with_integer_distance(integral)
}

/// Path `0 - 1 - 2` with weight `w`, root `1` and predictions `(0, w, 0)`.
///
/// Returns `(worst, benign)`: goal at `2` (greedy visits `0` first and pays
/// `3w`) and goal at `0` (greedy pays `w`).
pub fn gen_lb_p3<S: Scalar>(w: S) -> Result<(SearchInstance<S>, SearchInstance<S>)> {
    positive("w", w)?;
    let g = Graph::path(3, w);
    let f = Prediction::new(vec![S::zero(), w, S::zero()]);
    let worst = SearchInstance::new(g.clone(), VertexId(1), VertexId(2), f.clone())?;
    let benign = SearchInstance::new(g, VertexId(1), VertexId(0), f)?;
    Ok((flag_integral(worst, w)?, flag_integral(benign, w)?))
}

/// Star with center `0` (the root) and edge weight `einf / 2`. Every leaf
/// predicts `einf` and the root predicts `einf / 2`, so only the goal leaf
/// is wrong. The goal is the last leaf.
pub fn gen_lb_star<S: Scalar>(n: usize, einf: S) -> Result<SearchInstance<S>> {
    lb_star_with_goal(n, einf, VertexId(n.saturating_sub(1)))
}

/// [`gen_lb_star`] with the goal on an arbitrary leaf.
pub fn lb_star_with_goal<S: Scalar>(n: usize, einf: S, goal: VertexId) -> Result<SearchInstance<S>> {
    at_least("n", n, 4)?;
    positive("einf", einf)?;
    if goal.0 == 0 || goal.0 >= n {
        return Err(Error::Input(format!("goal {goal} is not a leaf of the star")));
    }
    let w = einf / S::of(2.0);
    let mut f = vec![einf; n];
    f[0] = w;
    let inst = SearchInstance::new(Graph::star(n, w), VertexId(0), goal, Prediction::new(f))?;
    flag_integral(inst, w)
}

/// Star with unit edges around root `0` and leaves `1..n-1`; the goal `n-1`
/// hangs off leaf `n-2` by an edge of weight `(1 - eps) / eps`. Every leaf
/// predicts `(1 - eps)(2 + w2)`, within the relative band of its true
/// distance.
pub fn gen_lb_relative_star<S: Scalar>(n: usize, eps: S) -> Result<SearchInstance<S>> {
    lb_relative_star_with_pendant(n, eps, VertexId(n.saturating_sub(2)))
}

/// [`gen_lb_relative_star`] with the goal hung off an arbitrary leaf.
pub fn lb_relative_star_with_pendant<S: Scalar>(n: usize, eps: S, leaf: VertexId) -> Result<SearchInstance<S>> {
    at_least("n", n, 6)?;
    if !(eps > S::zero() && eps < S::one()) {
        return Err(Error::Validation {
            field: "eps".into(),
            message: format!("{eps} outside (0, 1)"),
        });
    }
    if leaf.0 == 0 || leaf.0 >= n - 1 {
        return Err(Error::Input(format!("{leaf} is not a leaf of the star")));
    }
    let w1 = S::one();
    let w2 = (S::one() - eps) / eps;
    let goal = n - 1;
    let edges = (1..goal).map(|i| (0, i, w1)).chain([(leaf.0, goal, w2)]);
    let g = Graph::undirected(n, edges)?;
    let leaf_f = (S::one() - eps) * (S::of(2.0) * w1 + w2);
    let mut f = vec![leaf_f; n];
    f[0] = w1 + w2;
    f[goal] = S::zero();
    let inst = SearchInstance::new(g, VertexId(0), VertexId(goal), Prediction::new(f))?;
    flag_integral(inst, w2)
}

/// Vertex ids of the planning tree: root `r`; hubs `v_i` (`i = 1..=delta`);
/// under each hub `delta - 1` vertices `u_ij`, each with one pendant `w_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanningTreeLayout {
    delta: usize,
}

impl PlanningTreeLayout {
    pub fn new(delta: usize) -> Self {
        PlanningTreeLayout { delta }
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// `2 delta^2 - delta + 1`.
    pub fn n(&self) -> usize {
        1 + self.delta + 2 * self.delta * (self.delta - 1)
    }

    pub fn root(&self) -> VertexId {
        VertexId(0)
    }

    pub fn v(&self, i: usize) -> VertexId {
        debug_assert!((1..=self.delta).contains(&i));
        VertexId(i)
    }

    pub fn u(&self, i: usize, j: usize) -> VertexId {
        debug_assert!((1..self.delta).contains(&j));
        VertexId(1 + self.delta + (i - 1) * (self.delta - 1) + (j - 1))
    }

    pub fn w(&self, i: usize, j: usize) -> VertexId {
        VertexId(self.u(i, j).0 + self.delta * (self.delta - 1))
    }
}

/// The planning tree: unit edges `r - v_i - u_ij`, pendant edges `u_ij - w_ij`
/// of weight `w`.
pub fn planning_tree_graph<S: Scalar>(delta: usize, w: S) -> Graph<S> {
    let l = PlanningTreeLayout::new(delta);
    let mut edges = Vec::new();
    for i in 1..=delta {
        edges.push((l.root().0, l.v(i).0, S::one()));
        for j in 1..delta {
            edges.push((l.v(i).0, l.u(i, j).0, S::one()));
            edges.push((l.u(i, j).0, l.w(i, j).0, w));
        }
    }
    Graph::undirected(l.n(), edges).expect("planning tree edges are valid")
}

/// Planning tree with goal `w_11`. Every hub subtree gets the same
/// predictions, the true distances for a goal hidden in some *other*
/// subtree, so the goal's subtree looks like all the rest. The root's
/// prediction is exact.
pub fn gen_lb_planning_tree<S: Scalar>(delta: usize, w: S) -> Result<SearchInstance<S>> {
    at_least("delta", delta, 2)?;
    positive("w", w)?;
    let l = PlanningTreeLayout::new(delta);
    let g = planning_tree_graph(delta, w);
    let two = S::of(2.0);
    let mut f = vec![S::zero(); l.n()];
    f[l.root().0] = w + two;
    for i in 1..=delta {
        f[l.v(i).0] = w + S::of(3.0);
        for j in 1..delta {
            f[l.u(i, j).0] = w + S::of(4.0);
            f[l.w(i, j).0] = two * w + S::of(4.0);
        }
    }
    let inst = SearchInstance::new(g, l.root(), l.w(1, 1), Prediction::new(f))?;
    flag_integral(inst, w)
}

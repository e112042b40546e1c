//! Closed-form performance guarantees and checks of the structural
//! properties that their proofs rely on.
//!
//! The `check_*` functions return `Err(description)` naming the first
//! violated property, so callers can report or dump the instance.

use crate::exploration::{SearchInstance, SearchTrace};
use crate::graph::{distances_from, VertexId};
use crate::predictions::ErrorProfile;
use crate::scalar::{eq_tol, le_tol, Scalar};

type Check = std::result::Result<(), String>;

/// Greedy search on any (directed, weighted) graph:
/// `opt + E1^- + n * Einf^+`.
pub fn greedy_bound<S: Scalar>(opt: S, p: &ErrorProfile<S>, n: usize) -> S {
    opt + p.e1_minus + S::of(n as f64) * p.einf_plus
}

/// Greedy search with admissible predictions: `opt + E1`.
pub fn admissible_greedy_bound<S: Scalar>(opt: S, e1: S) -> S {
    opt + e1
}

/// Competitive ratio of pruned search on trees with relative error `eps`.
pub fn pruned_ratio_bound(eps: f64, n: usize) -> f64 {
    let n = n as f64;
    1.0 / (1.0 - eps) + 4.0 * n * eps / (1.0 - eps).powi(2)
}

/// Pruned search when predictions also never overestimate.
pub fn pruned_admissible_ratio_bound(eps: f64, n: usize) -> f64 {
    1.0 + 2.0 * n as f64 * eps / (1.0 - eps)
}

/// Competitive ratio of beta-weighted search with `beta = 2/3`, valid for
/// `eps < 1/3` on trees.
pub fn beta_ratio_bound(eps: f64, n: usize) -> f64 {
    let n = n as f64;
    let q = 1.0 - 3.0 * eps;
    2.0 + 6.0 * eps / q + 6.0 * eps * (5.0 + 3.0 * eps) * n / (q * q)
}

/// Multiple of `opt` bounding how far from the goal beta-weighted search
/// ever goes; requires `beta < 1 - eps`.
pub fn beta_radius_factor(eps: f64, beta: f64) -> f64 {
    (1.0 + eps + beta) / (1.0 - (eps + beta))
}

/// Planning with `phi0` on unit-weight paths: `opt + 17 E0 + 1`.
pub fn planning_path_bound<S: Scalar>(opt: S, e0: usize) -> S {
    opt + S::of(17.0 * e0 as f64 + 1.0)
}

/// Planning with `phi1` on integer trees of maximum degree `delta`:
/// `opt + (delta / 3)(16 E1^2 - 1) + (E1 + 1) / 2`.
pub fn planning_tree_bound<S: Scalar>(opt: S, e1: S, delta: usize) -> S {
    let d = S::of(delta as f64);
    opt + d / S::of(3.0) * (S::of(16.0) * e1 * e1 - S::one()) + (e1 + S::one()) / S::of(2.0)
}

/// Structural invariants every exploration trace satisfies: starts at the
/// root, ends at the goal, visits are distinct, costs add up, progress
/// telescopes to `opt` and `alg >= opt`.
pub fn check_trace<S: Scalar>(inst: &SearchInstance<S>, t: &SearchTrace<S>) -> Check {
    if t.visits.first() != Some(&inst.root()) {
        return Err("trace does not start at the root".into());
    }
    if t.visits.last() != Some(&inst.goal()) {
        return Err("trace does not end at the goal".into());
    }
    let mut seen = vec![false; inst.n()];
    for v in &t.visits {
        if std::mem::replace(&mut seen[v.0], true) {
            return Err(format!("vertex {v} visited twice"));
        }
    }
    if t.step_costs.len() + 1 != t.visits.len() || t.deltas.len() != t.step_costs.len() {
        return Err("trace lengths are inconsistent".into());
    }
    let sum: S = t.step_costs.iter().copied().sum();
    if !eq_tol(sum, t.alg) {
        return Err(format!("alg {} differs from the sum of step costs {sum}", t.alg));
    }
    let progress: S = t.deltas.iter().copied().sum();
    if !eq_tol(progress, t.opt) {
        return Err(format!("progress {progress} does not add up to opt {}", t.opt));
    }
    if !le_tol(t.opt, t.alg) {
        return Err(format!("alg {} is below opt {}", t.alg, t.opt));
    }
    Ok(())
}

/// Membership in the pruning set `{v : d(v, r) <= f(r) / (1 - eps)}` using
/// true distances.
pub fn pruning_set<S: Scalar>(inst: &SearchInstance<S>, eps: f64) -> Vec<bool> {
    let radius = inst.predictions().get(inst.root()) / (S::one() - S::of(eps));
    distances_from(inst.graph(), inst.root())
        .dist
        .iter()
        .map(|&d| le_tol(d, radius))
        .collect()
}

/// The five properties of the pruning set on trees, checked for every
/// visited vertex (and, for the first, every vertex of the graph).
pub fn check_pruning_properties<S: Scalar>(inst: &SearchInstance<S>, eps: f64, t: &SearchTrace<S>) -> Check {
    let g = inst.graph();
    let opt = inst.opt();
    let set = pruning_set(inst, eps);
    let from_root = distances_from(g, inst.root()).dist;
    let to_goal = distances_from(g, inst.goal());
    let e = S::of(eps);

    for v in g.vertices() {
        if !set[v.0] && from_root[v.0] <= opt {
            return Err(format!("(i) vertex {v} outside the set has d(v, r) <= opt"));
        }
    }
    let in_set_path = |v: VertexId| to_goal.path_to(v).iter().all(|u| set[u.0]);
    if !in_set_path(inst.root()) {
        return Err("(iv) the root-goal path leaves the set".into());
    }
    for &v in &t.visits {
        if !set[v.0] {
            return Err(format!("visited vertex {v} is outside the set"));
        }
        if !le_tol(from_root[v.0], (S::one() + e) / (S::one() - e) * opt) {
            return Err(format!("(ii) visited vertex {v} is too far from the root"));
        }
        if !le_tol(to_goal.dist[v.0], S::of(2.0) / (S::one() - e) * opt) {
            return Err(format!("(iii) visited vertex {v} is too far from the goal"));
        }
        if !in_set_path(v) {
            return Err(format!("(v) the path from {v} to the goal leaves the set"));
        }
    }
    Ok(())
}

/// Per-step bound of pruned search on trees:
/// `(1 - eps) step_i <= delta_i + 2 eps d(v_i, g)`.
pub fn check_pruned_steps<S: Scalar>(inst: &SearchInstance<S>, eps: f64, t: &SearchTrace<S>) -> Check {
    let d = inst.dist_to_goal();
    let e = S::of(eps);
    for (i, (&c, &delta)) in t.step_costs.iter().zip(&t.deltas).enumerate() {
        let v = t.visits[i + 1];
        let lhs = (S::one() - e) * c;
        let rhs = delta + S::of(2.0) * e * d[v.0];
        if !le_tol(lhs, rhs) {
            return Err(format!("step {} into {v}: {lhs} > {rhs}", i + 1));
        }
    }
    Ok(())
}

/// Every vertex visited by beta-weighted search lies within
/// [`beta_radius_factor`]` * opt` of the goal.
pub fn check_beta_radius<S: Scalar>(inst: &SearchInstance<S>, eps: f64, beta: f64, t: &SearchTrace<S>) -> Check {
    let limit = S::of(beta_radius_factor(eps, beta)) * inst.opt();
    let d = inst.dist_to_goal();
    for &v in &t.visits {
        if !le_tol(d[v.0], limit) {
            return Err(format!("visited vertex {v} is {} from the goal, limit {limit}", d[v.0]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(pruned_ratio_bound(0.0, 50), 1.0);
        assert_eq!(pruned_admissible_ratio_bound(0.0, 50), 1.0);
        assert_eq!(beta_ratio_bound(0.0, 50), 2.0);
        // beta = 2/3 gives (5 + 3 eps) / (1 - 3 eps)
        let eps = 0.1;
        assert!((beta_radius_factor(eps, 2.0 / 3.0) - (5.0 + 3.0 * eps) / (1.0 - 3.0 * eps)).abs() < 1e-12);
        assert!((pruned_ratio_bound(0.2, 10) - (1.25 + 8.0 / 0.64)).abs() < 1e-12);
        assert_eq!(planning_path_bound(3.0, 2), 38.0);
        assert_eq!(planning_tree_bound(0.0, 1.0, 3), 15.0 + 1.0);
    }
}

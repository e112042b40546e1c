use std::collections::BTreeSet;

use super::{distances_from, Graph, VertexId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest vertex set for which [`tour_cost`] runs the exact DP.
pub const TOUR_EXACT_CAP: usize = 12;

fn distinct(g: &Graph<impl Scalar>, s: &[VertexId]) -> Result<Vec<VertexId>> {
    for &v in s {
        g.check_vertex(v)?;
    }
    Ok(s.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Worst-start shortest covering walk of `s`.
///
/// For every start `v` in `s` this computes the shortest walk from `v` that
/// visits all of `s` (a shortest Hamiltonian path in the metric closure,
/// by Held-Karp DP over `(subset, endpoint)`) and returns the maximum.
pub fn tour_cost<S: Scalar>(g: &Graph<S>, s: &[VertexId]) -> Result<S> {
    let set = distinct(g, s)?;
    let k = set.len();
    if k == 0 {
        return Err(Error::Input("tour of an empty vertex set".into()));
    }
    if k > TOUR_EXACT_CAP {
        return Err(Error::Capacity {
            what: "tour vertex set",
            size: k,
            limit: TOUR_EXACT_CAP,
        });
    }
    let mut d = vec![vec![S::zero(); k]; k];
    for (i, &a) in set.iter().enumerate() {
        let row = distances_from(g, a).dist;
        for (j, &b) in set.iter().enumerate() {
            if row[b.0].is_infinite() {
                return Err(Error::Infeasible(format!("{b} is unreachable from {a}")));
            }
            d[i][j] = row[b.0];
        }
    }

    let full = (1usize << k) - 1;
    let mut dp = vec![S::infinity(); (1 << k) * k];
    let mut worst = S::zero();
    for start in 0..k {
        dp.iter_mut().for_each(|x| *x = S::infinity());
        dp[(1 << start) * k + start] = S::zero();
        for mask in 1..=full {
            if mask & (1 << start) == 0 {
                continue;
            }
            for last in 0..k {
                let cur = dp[mask * k + last];
                if cur.is_infinite() {
                    continue;
                }
                for next in 0..k {
                    if mask & (1 << next) != 0 {
                        continue;
                    }
                    let slot = &mut dp[(mask | (1 << next)) * k + next];
                    let cand = cur + d[last][next];
                    if cand < *slot {
                        *slot = cand;
                    }
                }
            }
        }
        let best = (0..k)
            .map(|last| dp[full * k + last])
            .fold(S::infinity(), S::min);
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Largest pairwise distance within `s` (`+inf` if some pair is unreachable).
pub fn diameter<S: Scalar>(g: &Graph<S>, s: &[VertexId]) -> Result<S> {
    let set = distinct(g, s)?;
    if set.is_empty() {
        return Err(Error::Input("diameter of an empty vertex set".into()));
    }
    let mut best = S::zero();
    for &a in &set {
        let row = distances_from(g, a).dist;
        for &b in &set {
            best = best.max(row[b.0]);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&i| VertexId(i)).collect()
    }

    /// Max over starts of the min over visiting orders, by enumerating
    /// permutations.
    fn brute_force_tour(g: &Graph<f64>, s: &[VertexId]) -> f64 {
        fn perms(rest: &mut Vec<VertexId>, cur: VertexId, m: &crate::graph::DistanceMatrix<f64>, acc: f64, best: &mut f64) {
            if rest.is_empty() {
                *best = best.min(acc);
                return;
            }
            for i in 0..rest.len() {
                let nxt = rest.remove(i);
                perms(rest, nxt, m, acc + m.get(cur, nxt), best);
                rest.insert(i, nxt);
            }
        }
        let m = crate::graph::all_pairs(g);
        let mut worst = 0.0f64;
        for &start in s {
            let mut rest: Vec<_> = s.iter().copied().filter(|&x| x != start).collect();
            let mut best = f64::INFINITY;
            perms(&mut rest, start, &m, 0.0, &mut best);
            worst = worst.max(best);
        }
        worst
    }

    #[test]
    fn singleton_is_free() {
        let g = Graph::<f64>::star(4, 1.0);
        assert_eq!(tour_cost(&g, &ids(&[2])).unwrap(), 0.0);
        assert_eq!(diameter(&g, &ids(&[2])).unwrap(), 0.0);
    }

    #[test]
    fn unit_path_examples() {
        let g = Graph::<f64>::path(3, 1.0);
        assert_eq!(tour_cost(&g, &ids(&[0, 2])).unwrap(), 2.0);
        assert_eq!(brute_force_tour(&g, &ids(&[0, 2])), 2.0);
        // worst start is the middle vertex
        assert_eq!(tour_cost(&g, &ids(&[0, 1, 2])).unwrap(), 3.0);
        assert_eq!(brute_force_tour(&g, &ids(&[0, 1, 2])), 3.0);
        assert_eq!(diameter(&g, &ids(&[0, 2])).unwrap(), 2.0);
    }

    #[test]
    fn star_leaves_diameter() {
        let g = Graph::<f64>::star(5, 2.0);
        assert_eq!(diameter(&g, &ids(&[1, 2, 3, 4])).unwrap(), 4.0);
    }

    #[test]
    fn errors() {
        let g = Graph::<f64>::path(14, 1.0);
        let all: Vec<_> = g.vertices().collect();
        assert!(matches!(tour_cost(&g, &all), Err(Error::Capacity { size: 14, .. })));
        assert!(matches!(tour_cost(&g, &[]), Err(Error::Input(_))));
        let split = Graph::<f64>::undirected(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(tour_cost(&split, &ids(&[0, 2])), Err(Error::Infeasible(_))));
        assert!(diameter(&split, &ids(&[0, 2])).unwrap().is_infinite());
    }

    #[test]
    fn matches_permutation_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.random_range(2..=9);
            let mut edges: Vec<_> = (1..n).map(|i| (rng.random_range(0..i), i, rng.random_range(1..5) as f64)).collect();
            for _ in 0..rng.random_range(0..4) {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a != b {
                    edges.push((a, b, rng.random_range(1..5) as f64));
                }
            }
            let g = Graph::undirected(n, edges).unwrap();
            let s: Vec<_> = g.vertices().filter(|_| rng.random_bool(0.6)).collect();
            if s.is_empty() {
                continue;
            }
            assert_eq!(tour_cost(&g, &s).unwrap(), brute_force_tour(&g, &s));
        }
    }
}

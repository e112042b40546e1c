use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::DefaultHasher;
use std::collections::BinaryHeap;
use std::hash::{Hash, Hasher};

use super::{Graph, VertexId};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
struct Entry<S> {
    dist: S,
    vertex: VertexId,
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .partial_cmp(&other.dist)
            .unwrap_or(Ordering::Equal)
            .then(self.vertex.cmp(&other.vertex))
    }
}

/// Single-source shortest-path distances with predecessor links.
#[derive(Clone, Debug)]
pub struct ShortestPathTree<S> {
    pub source: VertexId,
    pub dist: Vec<S>,
    pub pred: Vec<Option<VertexId>>,
}

impl<S: Scalar> ShortestPathTree<S> {
    /// Vertices from the source to `target`, or empty if unreachable.
    pub fn path_to(&self, target: VertexId) -> Vec<VertexId> {
        if self.dist[target.0].is_infinite() {
            return Vec::new();
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur.0] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Dijkstra over an arbitrary adjacency function.
///
/// `neighbors(u)` yields the arcs leaving `u`; this lets callers run the
/// search on restricted views of a graph (e.g. the explored subgraph).
pub fn dijkstra<S, F, I>(n: usize, source: VertexId, mut neighbors: F) -> ShortestPathTree<S>
where
    S: Scalar,
    F: FnMut(VertexId) -> I,
    I: IntoIterator<Item = (VertexId, S)>,
{
    let mut dist = vec![S::infinity(); n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source.0] = S::zero();
    heap.push(Reverse(Entry {
        dist: S::zero(),
        vertex: source,
    }));
    while let Some(Reverse(Entry { dist: d, vertex: u })) = heap.pop() {
        if done[u.0] {
            continue;
        }
        done[u.0] = true;
        for (v, w) in neighbors(u) {
            let nd = d + w;
            if nd < dist[v.0] {
                dist[v.0] = nd;
                pred[v.0] = Some(u);
                heap.push(Reverse(Entry { dist: nd, vertex: v }));
            }
        }
    }
    ShortestPathTree { source, dist, pred }
}

/// Distances from `source` to every vertex.
pub fn distances_from<S: Scalar>(g: &Graph<S>, source: VertexId) -> ShortestPathTree<S> {
    dijkstra(g.n(), source, |u| g.neighbors(u).iter().copied())
}

/// Distances from every vertex to `target` (follows in-arcs on digraphs).
pub fn distances_to<S: Scalar>(g: &Graph<S>, target: VertexId) -> Vec<S> {
    dijkstra(g.n(), target, |u| g.in_neighbors(u).iter().copied()).dist
}

/// Shortest `u`-`v` path. Unreachable targets give `(+inf, [])`.
pub fn shortest_path<S: Scalar>(
    g: &Graph<S>,
    u: VertexId,
    v: VertexId,
) -> Result<(S, Vec<VertexId>)> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let tree = distances_from(g, u);
    Ok((tree.dist[v.0], tree.path_to(v)))
}

/// All-pairs shortest-path distances, `+inf` for unreachable pairs.
#[derive(Clone, Debug)]
pub struct DistanceMatrix<S> {
    n: usize,
    data: Vec<S>,
    fingerprint: u64,
}

impl<S: Scalar> DistanceMatrix<S> {
    #[inline]
    pub fn get(&self, u: VertexId, v: VertexId) -> S {
        self.data[u.0 * self.n + v.0]
    }

    pub fn row(&self, u: VertexId) -> &[S] {
        &self.data[u.0 * self.n..(u.0 + 1) * self.n]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Identifies the graph this matrix was computed from.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn matches(&self, g: &Graph<S>) -> bool {
        self.fingerprint == fingerprint(g)
    }

    /// True when every finite distance is within tolerance of an integer.
    pub fn is_integral(&self) -> bool {
        self.data
            .iter()
            .all(|&d| d.is_infinite() || crate::scalar::is_integral(d))
    }

    /// Largest finite distance (0 for an empty or singleton matrix).
    pub fn max_finite(&self) -> S {
        self.data
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(S::zero(), S::max)
    }
}

fn fingerprint<S: Scalar>(g: &Graph<S>) -> u64 {
    let mut h = DefaultHasher::new();
    g.n().hash(&mut h);
    g.is_directed().hash(&mut h);
    for e in g.edges() {
        e.u.hash(&mut h);
        e.v.hash(&mut h);
        e.weight.as_f64().to_bits().hash(&mut h);
    }
    h.finish()
}

pub fn all_pairs<S: Scalar>(g: &Graph<S>) -> DistanceMatrix<S> {
    let n = g.n();
    let mut data = Vec::with_capacity(n * n);
    for u in g.vertices() {
        data.extend(distances_from(g, u).dist);
    }
    DistanceMatrix {
        n,
        data,
        fingerprint: fingerprint(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn v(i: usize) -> VertexId {
        VertexId(i)
    }

    /// Minimum over all simple paths, by exhaustive DFS.
    fn brute_force_distance(g: &Graph<f64>, s: VertexId, t: VertexId) -> f64 {
        fn go(g: &Graph<f64>, u: VertexId, t: VertexId, seen: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if u == t {
                *best = best.min(acc);
                return;
            }
            for &(w, c) in g.neighbors(u) {
                if !seen[w.0] {
                    seen[w.0] = true;
                    go(g, w, t, seen, acc + c, best);
                    seen[w.0] = false;
                }
            }
        }
        let mut seen = vec![false; g.n()];
        seen[s.0] = true;
        let mut best = f64::INFINITY;
        go(g, s, t, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn path_graph() {
        // vertices 1,2,3 of the path are ids 0,1,2
        let g = Graph::<f64>::path(3, 1.0);
        let (d, p) = shortest_path(&g, v(0), v(2)).unwrap();
        assert_eq!(d, 2.0);
        assert_eq!(p, vec![v(0), v(1), v(2)]);
    }

    #[test]
    fn identity_query() {
        let g = Graph::<f64>::star(4, 3.0);
        assert_eq!(shortest_path(&g, v(2), v(2)).unwrap(), (0.0, vec![v(2)]));
    }

    #[test]
    fn star_leaf_to_leaf() {
        let g = Graph::<f64>::star(5, 2.0);
        let (d, _) = shortest_path(&g, v(1), v(4)).unwrap();
        assert_eq!(d, brute_force_distance(&g, v(1), v(4)));
        assert_eq!(d, 4.0);
    }

    #[test]
    fn unreachable_and_invalid() {
        let g = Graph::<f64>::undirected(3, [(0, 1, 1.0)]).unwrap();
        let (d, p) = shortest_path(&g, v(0), v(2)).unwrap();
        assert!(d.is_infinite());
        assert!(p.is_empty());
        assert!(matches!(
            shortest_path(&g, v(0), v(7)),
            Err(Error::InvalidVertex { id: 7, .. })
        ));
    }

    #[test]
    fn directed_distances_to() {
        let g = Graph::<f64>::directed(3, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 5.0)]).unwrap();
        let to2 = distances_to(&g, v(2));
        assert_eq!(to2, vec![3.0, 2.0, 0.0]);
        let m = all_pairs(&g);
        assert_eq!(m.get(v(2), v(1)), 6.0);
        assert_eq!(m.get(v(1), v(2)), 2.0);
        assert!(m.matches(&g));
    }

    #[test]
    fn single_vertex_matrix() {
        let g = Graph::<f64>::undirected(1, []).unwrap();
        let m = all_pairs(&g);
        assert_eq!(m.row(v(0)), &[0.0]);
    }

    #[test]
    fn brute_force_agreement_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.random_range(2..=8);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(0.4) {
                        edges.push((a, b, rng.random_range(0..6) as f64));
                    }
                }
            }
            let g = Graph::undirected(n, edges).unwrap();
            let m = all_pairs(&g);
            for a in g.vertices() {
                for b in g.vertices() {
                    assert_eq!(m.get(a, b), brute_force_distance(&g, a, b));
                }
            }
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::{distances_from, Edge, Graph, VertexId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A tree embedded in some host graph: its vertex set and edges.
#[derive(Clone, Debug, PartialEq)]
pub struct SubTree<S> {
    vertices: BTreeSet<VertexId>,
    edges: Vec<Edge<S>>,
    adj: BTreeMap<VertexId, Vec<(VertexId, S)>>,
}

impl<S: Scalar> SubTree<S> {
    fn build(vertices: BTreeSet<VertexId>, edges: Vec<Edge<S>>) -> Self {
        let mut adj: BTreeMap<VertexId, Vec<(VertexId, S)>> =
            vertices.iter().map(|&v| (v, Vec::new())).collect();
        for e in &edges {
            adj.get_mut(&e.u).expect("edge endpoint in tree").push((e.v, e.weight));
            adj.get_mut(&e.v).expect("edge endpoint in tree").push((e.u, e.weight));
        }
        for list in adj.values_mut() {
            list.sort_by_key(|a| a.0);
        }
        SubTree { vertices, edges, adj }
    }

    pub fn singleton(v: VertexId) -> Self {
        Self::build(BTreeSet::from([v]), Vec::new())
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn weight(&self) -> S {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, S)] {
        self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn terminal_set<S: Scalar>(g: &Graph<S>, terminals: &[VertexId]) -> Result<BTreeSet<VertexId>> {
    for &t in terminals {
        g.check_vertex(t)?;
    }
    let set: BTreeSet<_> = terminals.iter().copied().collect();
    if set.is_empty() {
        return Err(Error::Input("Steiner tree needs at least one terminal".into()));
    }
    Ok(set)
}

/// The unique minimal subtree of a tree spanning `terminals`.
pub fn steiner_tree_exact_on_tree<S: Scalar>(
    g: &Graph<S>,
    terminals: &[VertexId],
) -> Result<SubTree<S>> {
    if !g.is_tree() {
        return Err(Error::Input("graph is not a tree".into()));
    }
    let terms = terminal_set(g, terminals)?;
    let root = *terms.iter().next().expect("non-empty");

    // Iterative DFS from a terminal; an edge (parent, child) belongs to the
    // Steiner tree iff the child's subtree contains a terminal.
    let n = g.n();
    let mut parent: Vec<Option<(VertexId, S)>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root.0] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &(v, w) in g.neighbors(u) {
            if !seen[v.0] {
                seen[v.0] = true;
                parent[v.0] = Some((u, w));
                stack.push(v);
            }
        }
    }
    let mut has_terminal: Vec<bool> = (0..n).map(|i| terms.contains(&VertexId(i))).collect();
    let mut vertices = BTreeSet::from([root]);
    let mut edges = Vec::new();
    for &u in order.iter().rev() {
        if let Some((p, w)) = parent[u.0] {
            if has_terminal[u.0] {
                has_terminal[p.0] = true;
                vertices.insert(u);
                edges.push(Edge { u: p, v: u, weight: w });
            }
        }
    }
    Ok(SubTree::build(vertices, edges))
}

/// Minimum spanning forest (Kruskal) over an explicit edge list.
fn kruskal<S: Scalar>(n: usize, mut edges: Vec<Edge<S>>) -> Vec<Edge<S>> {
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    edges.sort_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.u, a.v).cmp(&(b.u, b.v)))
    });
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for e in edges {
        let (a, b) = (find(&mut p, e.u.0), find(&mut p, e.v.0));
        if a != b {
            p[a] = b;
            out.push(e);
        }
    }
    out
}

/// Metric-closure MST heuristic (Kou, Markowsky and Berman): weight at most
/// twice the minimum Steiner tree.
///
/// MST of the terminals' distance graph, expanded into shortest paths, then
/// an MST of the resulting subgraph with non-terminal leaves pruned.
pub fn steiner_tree_approx<S: Scalar>(g: &Graph<S>, terminals: &[VertexId]) -> Result<SubTree<S>> {
    if g.is_directed() {
        return Err(Error::Input("Steiner trees require an undirected graph".into()));
    }
    let terms: Vec<_> = terminal_set(g, terminals)?.into_iter().collect();
    if terms.len() == 1 {
        return Ok(SubTree::singleton(terms[0]));
    }
    let spts: Vec<_> = terms.iter().map(|&t| distances_from(g, t)).collect();
    let mut closure = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let d = spts[i].dist[terms[j].0];
            if d.is_infinite() {
                return Err(Error::Infeasible(format!(
                    "terminal {} is unreachable from {}",
                    terms[j], terms[i]
                )));
            }
            closure.push(Edge {
                u: VertexId(i),
                v: VertexId(j),
                weight: d,
            });
        }
    }
    let mst = kruskal(terms.len(), closure);

    let mut expanded: BTreeMap<(VertexId, VertexId), S> = BTreeMap::new();
    for e in mst {
        let path = spts[e.u.0].path_to(terms[e.v.0]);
        for pair in path.windows(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            let w = g.edge_weight(a, b).expect("consecutive path vertices are adjacent");
            expanded.insert((a, b), w);
        }
    }
    let sub_edges: Vec<_> = expanded
        .into_iter()
        .map(|((u, v), weight)| Edge { u, v, weight })
        .collect();
    let mut tree_edges = kruskal(g.n(), sub_edges);

    let is_terminal: BTreeSet<_> = terms.iter().copied().collect();
    loop {
        let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in &tree_edges {
            *degree.entry(e.u).or_default() += 1;
            *degree.entry(e.v).or_default() += 1;
        }
        let before = tree_edges.len();
        tree_edges.retain(|e| {
            !([e.u, e.v]
                .iter()
                .any(|x| degree[x] == 1 && !is_terminal.contains(x)))
        });
        if tree_edges.len() == before {
            break;
        }
    }
    let mut vertices = is_terminal;
    for e in &tree_edges {
        vertices.insert(e.u);
        vertices.insert(e.v);
    }
    Ok(SubTree::build(vertices, tree_edges))
}

/// Lazy depth-first double traversal of a tree.
///
/// Yields `(vertex, step_cost)` pairs: first `(start, 0)`, then every move
/// along a tree edge, ending back at `start`. Children are entered in
/// increasing id order. The full walk crosses every edge twice.
#[derive(Debug)]
pub struct EulerWalk<'a, S> {
    tree: &'a SubTree<S>,
    // (vertex, parent, index of next neighbor to try, cost of the edge to parent)
    stack: Vec<(VertexId, Option<VertexId>, usize, S)>,
    started: bool,
}

impl<S: Scalar> Iterator for EulerWalk<'_, S> {
    type Item = (VertexId, S);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return self.stack.last().map(|&(v, _, _, _)| (v, S::zero()));
        }
        loop {
            let (u, parent, idx, up_cost) = *self.stack.last()?;
            let nbrs = self.tree.neighbors(u);
            if idx < nbrs.len() {
                self.stack.last_mut().expect("non-empty").2 += 1;
                let (v, w) = nbrs[idx];
                if Some(v) == parent {
                    continue;
                }
                self.stack.push((v, Some(u), 0, w));
                return Some((v, w));
            }
            self.stack.pop();
            return parent.map(|p| (p, up_cost));
        }
    }
}

pub fn euler_walk<S: Scalar>(tree: &SubTree<S>, start: VertexId) -> Result<EulerWalk<'_, S>> {
    if !tree.contains(start) {
        return Err(Error::Input(format!("start vertex {start} is not in the tree")));
    }
    Ok(EulerWalk {
        tree,
        stack: vec![(start, None, 0, S::zero())],
        started: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&i| VertexId(i)).collect()
    }

    /// Minimum Steiner weight: min over vertex supersets of the terminals of
    /// the induced subgraph's MST weight.
    fn brute_force_steiner(g: &Graph<f64>, terminals: &[VertexId]) -> f64 {
        let n = g.n();
        let tmask: usize = terminals.iter().map(|t| 1 << t.0).sum();
        let mut best = f64::INFINITY;
        for mask in 0..(1usize << n) {
            if mask & tmask != tmask {
                continue;
            }
            let edges: Vec<_> = g
                .edges()
                .iter()
                .copied()
                .filter(|e| mask & (1 << e.u.0) != 0 && mask & (1 << e.v.0) != 0)
                .collect();
            let forest = kruskal(n, edges);
            if forest.len() + 1 == mask.count_ones() as usize {
                best = best.min(forest.iter().map(|e| e.weight).sum());
            }
        }
        best
    }

    fn delta_w_tree() -> Graph<f64> {
        crate::instances::planning_tree_graph(3, 4.0)
    }

    #[test]
    fn single_terminal() {
        let g = Graph::<f64>::path(3, 1.0);
        let t = steiner_tree_exact_on_tree(&g, &ids(&[1])).unwrap();
        assert_eq!(t.vertices().len(), 1);
        assert!(t.edges().is_empty());
        let a = steiner_tree_approx(&g, &ids(&[1])).unwrap();
        assert_eq!(a, t);
    }

    #[test]
    fn path_terminals_span_path() {
        let g = Graph::<f64>::path(3, 1.0);
        let t = steiner_tree_exact_on_tree(&g, &ids(&[0, 2])).unwrap();
        assert_eq!(t.vertices(), &ids(&[0, 1, 2]).into_iter().collect());
        assert_eq!(t.weight(), 2.0);
    }

    #[test]
    fn planning_tree_pair_of_leaves() {
        let g = delta_w_tree();
        let layout = crate::instances::PlanningTreeLayout::new(3);
        let (w11, w12) = (layout.w(1, 1), layout.w(1, 2));
        let t = steiner_tree_exact_on_tree(&g, &[w11, w12]).unwrap();
        let expected: BTreeSet<_> =
            [w11, layout.u(1, 1), layout.v(1), layout.u(1, 2), w12].into_iter().collect();
        assert_eq!(t.vertices(), &expected);
        assert_eq!(t.weight(), 4.0 + 1.0 + 1.0 + 4.0);
    }

    #[test]
    fn exact_rejects_non_tree() {
        let g = Graph::<f64>::cycle(4, 1.0);
        assert!(matches!(steiner_tree_exact_on_tree(&g, &ids(&[0])), Err(Error::Input(_))));
    }

    #[test]
    fn approx_on_unit_cycle() {
        let g = Graph::<f64>::cycle(4, 1.0);
        let all = ids(&[0, 1, 2, 3]);
        assert_eq!(brute_force_steiner(&g, &all), 3.0);
        assert_eq!(steiner_tree_approx(&g, &all).unwrap().weight(), 3.0);
    }

    #[test]
    fn approx_unreachable() {
        let g = Graph::<f64>::undirected(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(steiner_tree_approx(&g, &ids(&[0, 2])), Err(Error::Infeasible(_))));
    }

    #[test]
    fn approx_within_factor_two_and_exact_on_trees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..80 {
            let n = rng.random_range(2..=10);
            let mut edges: Vec<_> = (1..n)
                .map(|i| (rng.random_range(0..i), i, rng.random_range(1..6) as f64))
                .collect();
            let tree_only = trial % 2 == 0;
            if !tree_only {
                for _ in 0..rng.random_range(1..6) {
                    let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
                    if a != b {
                        edges.push((a, b, rng.random_range(1..6) as f64));
                    }
                }
            }
            let g = Graph::undirected(n, edges).unwrap();
            let terms: Vec<_> = g.vertices().filter(|_| rng.random_bool(0.5)).collect();
            if terms.is_empty() {
                continue;
            }
            let approx = steiner_tree_approx(&g, &terms).unwrap();
            for t in &terms {
                assert!(approx.contains(*t));
            }
            assert_eq!(approx.edges().len() + 1, approx.len());
            let opt = brute_force_steiner(&g, &terms);
            assert!(approx.weight() <= 2.0 * opt + 1e-9);
            if g.is_tree() {
                let exact = steiner_tree_exact_on_tree(&g, &terms).unwrap();
                assert_eq!(exact.weight(), opt);
                assert_eq!(approx.weight(), exact.weight());
            }
        }
    }

    #[test]
    fn euler_walk_examples() {
        let g = Graph::<f64>::undirected(1, []).unwrap();
        let t = steiner_tree_exact_on_tree(&g, &ids(&[0])).unwrap();
        let walk: Vec<_> = euler_walk(&t, VertexId(0)).unwrap().map(|s| s.0).collect();
        assert_eq!(walk, ids(&[0]));

        let g = Graph::<f64>::path(3, 1.0);
        let t = steiner_tree_exact_on_tree(&g, &ids(&[0, 1, 2])).unwrap();
        let steps: Vec<_> = euler_walk(&t, VertexId(1)).unwrap().collect();
        let walk: Vec<_> = steps.iter().map(|s| s.0).collect();
        assert_eq!(&walk[..4], &ids(&[1, 0, 1, 2])[..]);
        assert_eq!(steps.iter().map(|s| s.1).sum::<f64>(), 4.0);

        let g = Graph::<f64>::star(6, 3.0);
        let t = steiner_tree_exact_on_tree(&g, &g.vertices().collect::<Vec<_>>()).unwrap();
        let steps: Vec<_> = euler_walk(&t, VertexId(0)).unwrap().collect();
        let seen: BTreeSet<_> = steps.iter().map(|s| s.0).collect();
        assert_eq!(seen.len(), 6);
        assert_eq!(steps.iter().map(|s| s.1).sum::<f64>(), 2.0 * 5.0 * 3.0);

        assert!(euler_walk(&t, VertexId(9)).is_err());
    }

    #[test]
    fn euler_walk_is_lazy() {
        let g = Graph::<f64>::path(50, 1.0);
        let t = steiner_tree_exact_on_tree(&g, &g.vertices().collect::<Vec<_>>()).unwrap();
        let prefix: Vec<_> = euler_walk(&t, VertexId(0)).unwrap().take(3).map(|s| s.0).collect();
        assert_eq!(prefix, ids(&[0, 1, 2]));
    }
}

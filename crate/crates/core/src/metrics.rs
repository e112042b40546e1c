//! Embedding distortion, doubling constants and the tour-transfer check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{all_pairs, tour_cost, DistanceMatrix, Graph, VertexId};
use crate::scalar::{le_tol, Scalar};

/// Largest graph accepted by [`doubling_constant_exact`].
pub const DOUBLING_EXACT_CAP: usize = 20;

/// An injective map from the vertices of `source` into those of `target`.
#[derive(Clone, Debug)]
pub struct Embedding<'a, S> {
    source: &'a Graph<S>,
    target: &'a Graph<S>,
    map: Vec<VertexId>,
}

impl<'a, S: Scalar> Embedding<'a, S> {
    pub fn new(source: &'a Graph<S>, target: &'a Graph<S>, map: Vec<VertexId>) -> Result<Self> {
        if map.len() != source.n() {
            return Err(Error::Input(format!(
                "embedding maps {} vertices but the source has {}",
                map.len(),
                source.n()
            )));
        }
        let mut used = vec![false; target.n()];
        for &t in &map {
            target.check_vertex(t)?;
            if std::mem::replace(&mut used[t.0], true) {
                return Err(Error::Input(format!("embedding is not injective: {t} is hit twice")));
            }
        }
        Ok(Embedding { source, target, map })
    }

    pub fn source(&self) -> &Graph<S> {
        self.source
    }

    pub fn target(&self) -> &Graph<S> {
        self.target
    }

    pub fn map(&self) -> &[VertexId] {
        &self.map
    }

    pub fn image(&self, v: VertexId) -> VertexId {
        self.map[v.0]
    }
}

/// Unit-weight path `0 - 1 - ... - (n-1)`, the target of path embeddings.
pub fn unit_path<S: Scalar>(n: usize) -> Graph<S> {
    Graph::path(n, S::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistortionReport<S> {
    /// Largest expansion `d_Y(tu, tv) / d_X(u, v)`.
    pub lip_forward: S,
    /// Largest contraction `d_X(u, v) / d_Y(tu, tv)`.
    pub lip_inverse: S,
    pub distortion: S,
}

/// Lipschitz constants of the embedding and its inverse. A graph with a
/// single vertex has no pairs and gets the identity report.
pub fn distortion<S: Scalar>(e: &Embedding<'_, S>) -> Result<DistortionReport<S>> {
    let dx = all_pairs(e.source);
    let dy = all_pairs(e.target);
    let mut fwd = S::zero();
    let mut inv = S::zero();
    let mut any = false;
    for u in e.source.vertices() {
        for v in e.source.vertices() {
            if u == v {
                continue;
            }
            let a = dx.get(u, v);
            let b = dy.get(e.image(u), e.image(v));
            if a.is_infinite() || b.is_infinite() {
                return Err(Error::Input(format!("distance between {u} and {v} is not finite")));
            }
            if a == S::zero() || b == S::zero() {
                return Err(Error::DegenerateMetric(u, v));
            }
            fwd = fwd.max(b / a);
            inv = inv.max(a / b);
            any = true;
        }
    }
    if !any {
        fwd = S::one();
        inv = S::one();
    }
    Ok(DistortionReport {
        lip_forward: fwd,
        lip_inverse: inv,
        distortion: fwd * inv,
    })
}

/// Fixed-width bitset over vertex ids.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn minus(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

fn ball<S: Scalar>(d: &DistanceMatrix<S>, center: usize, radius: S) -> Bits {
    let mut b = Bits::empty(d.n());
    for (v, &x) in d.row(VertexId(center)).iter().enumerate() {
        if le_tol(x, radius) {
            b.set(v);
        }
    }
    b
}

/// Every distinct positive pairwise distance. Ball memberships only change
/// at these radii.
fn radii<S: Scalar>(d: &DistanceMatrix<S>) -> Vec<S> {
    let mut r: Vec<S> = (0..d.n())
        .flat_map(|u| d.row(VertexId(u)).to_vec())
        .filter(|x| x.is_finite() && *x > S::zero())
        .collect();
    r.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    r.dedup();
    r
}

fn greedy_cover(target: &Bits, balls: &[Bits]) -> usize {
    let mut left = target.clone();
    let mut used = 0;
    while !left.is_empty() {
        let best = balls
            .iter()
            .max_by_key(|b| b.and(&left).count())
            .expect("every point lies in its own ball");
        left = left.minus(best);
        used += 1;
    }
    used
}

/// Is `left` coverable by at most `k` of `balls`?
fn cover_within(left: &Bits, balls: &[Bits], k: usize) -> bool {
    let Some(p) = left.first() else {
        return true;
    };
    if k == 0 {
        return false;
    }
    balls
        .iter()
        .filter(|b| b.get(p))
        .any(|b| cover_within(&left.minus(b), balls, k - 1))
}

fn check_connected<S: Scalar>(g: &Graph<S>) -> Result<()> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Input("doubling constants need a non-empty connected graph".into()));
    }
    Ok(())
}

/// For every center `u` and radius `R`, the number of radius-`R/2` balls a
/// greedy cover of `B(u, R)` uses; returns the maximum. This is an upper
/// bound on the doubling constant.
pub fn doubling_constant_upper<S: Scalar>(g: &Graph<S>) -> Result<usize> {
    check_connected(g)?;
    let d = all_pairs(g);
    let mut best = 1;
    for r in radii(&d) {
        let half: Vec<Bits> = (0..g.n()).map(|c| ball(&d, c, r / S::of(2.0))).collect();
        for u in 0..g.n() {
            best = best.max(greedy_cover(&ball(&d, u, r), &half));
        }
    }
    Ok(best)
}

/// The doubling constant: the largest, over centers and radii, minimum
/// number of half-radius balls (centered anywhere) covering a ball.
/// Exhaustive search, limited to [`DOUBLING_EXACT_CAP`] vertices.
pub fn doubling_constant_exact<S: Scalar>(g: &Graph<S>) -> Result<usize> {
    if g.n() > DOUBLING_EXACT_CAP {
        return Err(Error::Capacity {
            what: "doubling constant graph",
            size: g.n(),
            limit: DOUBLING_EXACT_CAP,
        });
    }
    check_connected(g)?;
    let d = all_pairs(g);
    let mut best = 1;
    for r in radii(&d) {
        let half: Vec<Bits> = (0..g.n()).map(|c| ball(&d, c, r / S::of(2.0))).collect();
        for u in 0..g.n() {
            let target = ball(&d, u, r);
            // the exact value can only beat `best` if the greedy one does
            if greedy_cover(&target, &half) <= best {
                continue;
            }
            let local: Vec<Bits> = half.iter().map(|b| b.and(&target)).filter(|b| !b.is_empty()).collect();
            let mut k = best + 1;
            while !cover_within(&target, &local, k - 1) {
                best = k;
                k += 1;
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TourTransfer<S> {
    pub lhs: S,
    pub rhs: S,
    pub holds: bool,
}

/// Compares `tour_G(s)` with `lip_inverse * tour_G'(image of s)`.
pub fn tour_transfer_check<S: Scalar>(e: &Embedding<'_, S>, s: &[VertexId]) -> Result<TourTransfer<S>> {
    for &v in s {
        e.source.check_vertex(v)?;
    }
    let report = distortion(e)?;
    let lhs = tour_cost(e.source, s)?;
    let image: Vec<_> = s.iter().map(|&v| e.image(v)).collect();
    let rhs = report.lip_inverse * tour_cost(e.target, &image)?;
    Ok(TourTransfer {
        lhs,
        rhs,
        holds: le_tol(lhs, rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&i| VertexId(i)).collect()
    }

    /// Center 0 with leaves a=1, b=2, d=3 placed on the path as a, c, b, d.
    fn star_into_path() -> (Graph<f64>, Graph<f64>, Vec<VertexId>) {
        (Graph::star(4, 1.0), unit_path(4), ids(&[1, 0, 2, 3]))
    }

    #[test]
    fn identity_is_an_isometry() {
        let g = Graph::<f64>::path(5, 1.0);
        let e = Embedding::new(&g, &g, g.vertices().collect()).unwrap();
        let r = distortion(&e).unwrap();
        assert_eq!((r.lip_forward, r.lip_inverse, r.distortion), (1.0, 1.0, 1.0));
        let t = tour_transfer_check(&e, &ids(&[0, 2, 4])).unwrap();
        assert_eq!(t.lhs, t.rhs);
        assert!(t.holds);
    }

    #[test]
    fn scaling_target_keeps_distortion() {
        let (s, _, map) = star_into_path();
        let t3 = Graph::<f64>::path(4, 3.0);
        let t1 = unit_path(4);
        let a = distortion(&Embedding::new(&s, &t1, map.clone()).unwrap()).unwrap();
        let b = distortion(&Embedding::new(&s, &t3, map).unwrap()).unwrap();
        assert!((a.distortion - b.distortion).abs() < 1e-12);
    }

    #[test]
    fn star_into_path_distortion() {
        let (s, t, map) = star_into_path();
        let e = Embedding::new(&s, &t, map).unwrap();
        let r = distortion(&e).unwrap();
        assert_eq!((r.lip_forward, r.lip_inverse, r.distortion), (2.0, 2.0, 4.0));
        let single = tour_transfer_check(&e, &ids(&[2])).unwrap();
        assert_eq!((single.lhs, single.rhs), (0.0, 0.0));
        assert!(tour_transfer_check(&e, &ids(&[1, 2, 3])).unwrap().holds);
    }

    #[test]
    fn embedding_errors() {
        let (s, t, _) = star_into_path();
        assert!(matches!(Embedding::new(&s, &t, ids(&[0, 0, 1, 2])), Err(Error::Input(_))));
        assert!(Embedding::new(&s, &t, ids(&[0, 1])).is_err());
        let zero = Graph::<f64>::path(2, 0.0);
        let e = Embedding::new(&zero, &t, ids(&[0, 1])).unwrap();
        assert!(matches!(distortion(&e), Err(Error::DegenerateMetric(..))));
    }

    #[test]
    fn doubling_small_cases() {
        let one = Graph::<f64>::undirected(1, []).unwrap();
        assert_eq!(doubling_constant_upper(&one).unwrap(), 1);
        assert_eq!(doubling_constant_exact(&one).unwrap(), 1);
        // B(1, 1) = {0, 1, 2} and radius-1/2 balls around vertices are singletons
        assert_eq!(doubling_constant_exact(&Graph::<f64>::path(6, 1.0)).unwrap(), 3);
        assert_eq!(doubling_constant_upper(&Graph::<f64>::path(10, 1.0)).unwrap(), 3);
        let star = Graph::<f64>::star(5, 1.0);
        let exact = doubling_constant_exact(&star).unwrap();
        // B(center, 1) is the whole star and radius-1/2 balls are singletons
        assert_eq!(exact, 5);
        assert!(doubling_constant_upper(&star).unwrap() >= exact);
    }

    #[test]
    fn doubling_of_planning_tree() {
        // B(r, W + 2) is everything; a radius-(W/2 + 1) ball holds at most one
        // pendant, and the root's ball covers the rest
        let g = crate::instances::planning_tree_graph(3, 4.0f64);
        assert_eq!(doubling_constant_exact(&g).unwrap(), 7);
        assert!(doubling_constant_upper(&g).unwrap() >= 7);
    }

    #[test]
    fn doubling_cap() {
        let g = Graph::<f64>::path(DOUBLING_EXACT_CAP + 1, 1.0);
        assert!(matches!(doubling_constant_exact(&g), Err(Error::Capacity { .. })));
    }
}

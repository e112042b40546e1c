//! Prediction vectors, error metrics, random error generators and the
//! implied-error functions used by the planning algorithm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{all_pairs, DistanceMatrix, Graph, VertexId};
use crate::scalar::{eq_tol, le_tol, Scalar};

/// Predicted distance to the goal for every vertex. Values may be negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prediction<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> Prediction<S> {
    pub fn new(values: Vec<S>) -> Self {
        Prediction { values }
    }

    /// Perfect predictions: a copy of the true distances.
    pub fn exact(d_to_goal: &[S]) -> Self {
        Prediction::new(d_to_goal.to_vec())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> S {
        self.values[v.0]
    }
}

/// Error metrics of a prediction vector against the true goal distances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile<S> {
    /// Number of vertices whose prediction is wrong.
    pub e0: usize,
    /// Sum of absolute errors.
    pub e1: S,
    /// Sum of underestimates, `max(0, d - f)`.
    pub e1_minus: S,
    /// Largest overestimate, `max(0, f - d)`.
    pub einf_plus: S,
    /// Largest relative error `|f - d| / d` over non-goal vertices
    /// (`+inf` when the goal itself is mispredicted).
    pub eps_max: S,
}

/// Error profile of `f` against `d_to_goal`, where `goal` is the vertex with
/// true distance zero that the relative error excludes.
pub fn error_profile<S: Scalar>(d_to_goal: &[S], f: &Prediction<S>, goal: VertexId) -> ErrorProfile<S> {
    let mut p = ErrorProfile {
        e0: 0,
        e1: S::zero(),
        e1_minus: S::zero(),
        einf_plus: S::zero(),
        eps_max: S::zero(),
    };
    for (i, (&d, &fv)) in d_to_goal.iter().zip(&f.values).enumerate() {
        if !eq_tol(fv, d) {
            p.e0 += 1;
        }
        let err = fv - d;
        p.e1 = p.e1 + err.abs();
        if err < S::zero() {
            p.e1_minus = p.e1_minus - err;
        } else {
            p.einf_plus = p.einf_plus.max(err);
        }
        let rel = if i == goal.0 {
            if fv == S::zero() {
                S::zero()
            } else {
                S::infinity()
            }
        } else if d > S::zero() {
            err.abs() / d
        } else if err == S::zero() {
            S::zero()
        } else {
            S::infinity()
        };
        p.eps_max = p.eps_max.max(rel);
    }
    p
}

/// Absolute-error predictions with `||f - d||_1 = e1`.
///
/// Error magnitudes are uniform on the scaled simplex (normalized exponential
/// variates) and each gets an independent fair sign. No clamping is applied,
/// so predictions can be negative.
pub fn gen_absolute_error<S: Scalar>(d_to_goal: &[S], e1: S, seed: u64) -> Prediction<S> {
    absolute_error_with(d_to_goal, e1, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn absolute_error_with<S: Scalar, R: Rng + ?Sized>(d_to_goal: &[S], e1: S, rng: &mut R) -> Prediction<S> {
    let x = simplex_weights(d_to_goal.len(), rng);
    let values = d_to_goal
        .iter()
        .zip(x)
        .map(|(&d, xi)| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            d + S::of(sign * xi) * e1
        })
        .collect();
    Prediction::new(values)
}

/// Uniform point on the probability simplex.
fn simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = x.iter().sum();
    if total > 0.0 {
        x.iter_mut().for_each(|xi| *xi /= total);
    } else if n > 0 {
        x.iter_mut().for_each(|xi| *xi = 1.0 / n as f64);
    }
    x
}

/// Admissible predictions: `0 <= f <= d` and `sum(d - f) = e1`.
///
/// A simplex sample is scaled to `e1`; coordinates that would exceed their
/// cap `d(v)` are saturated and the excess redistributed proportionally
/// over the rest.
pub fn gen_admissible_error<S: Scalar>(d_to_goal: &[S], e1: S, seed: u64) -> Result<Prediction<S>> {
    admissible_error_with(d_to_goal, e1, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn admissible_error_with<S: Scalar, R: Rng + ?Sized>(
    d_to_goal: &[S],
    e1: S,
    rng: &mut R,
) -> Result<Prediction<S>> {
    let x = simplex_weights(d_to_goal.len(), rng);
    admissible_from_weights(d_to_goal, e1, &x)
}

/// Deterministic core of [`gen_admissible_error`]: distributes `e1` over the
/// vertices proportionally to `weights`, capped at `d(v)`.
pub fn admissible_from_weights<S: Scalar>(d_to_goal: &[S], e1: S, weights: &[f64]) -> Result<Prediction<S>> {
    if e1 < S::zero() {
        return Err(Error::Input(format!("negative error budget {e1}")));
    }
    let caps: Vec<f64> = d_to_goal.iter().map(|d| d.as_f64().max(0.0)).collect();
    let capacity: f64 = caps.iter().sum();
    let budget = e1.as_f64();
    if !le_tol(budget, capacity) {
        return Err(Error::Input(format!(
            "error budget {budget} exceeds the total distance {capacity} available to admissible predictions"
        )));
    }
    let budget = budget.min(capacity);
    let mut alloc = vec![0.0f64; caps.len()];
    let mut active: Vec<usize> = (0..caps.len()).filter(|&i| caps[i] > 0.0).collect();
    let mut remaining = budget;
    while remaining > 0.0 && !active.is_empty() {
        // Zero-weight coordinates only receive mass once nothing else can.
        let uniform = active.iter().all(|&i| weights[i] <= 0.0);
        let w = |i: usize| if uniform { 1.0 } else { weights[i].max(0.0) };
        let total_w: f64 = active.iter().map(|&i| w(i)).sum();
        let share = |i: usize| remaining * w(i) / total_w;
        let saturated: Vec<usize> = active.iter().copied().filter(|&i| share(i) >= caps[i]).collect();
        if saturated.is_empty() {
            for &i in &active {
                alloc[i] = share(i);
            }
            break;
        }
        for &i in &saturated {
            alloc[i] = caps[i];
            remaining -= caps[i];
        }
        active.retain(|i| !saturated.contains(i));
        remaining = remaining.max(0.0);
    }
    let values = d_to_goal
        .iter()
        .zip(&alloc)
        .map(|(&d, &a)| {
            let f = d - S::of(a);
            if f < S::zero() {
                S::zero()
            } else {
                f
            }
        })
        .collect();
    Ok(Prediction::new(values))
}

/// Relative-error predictions `f(v) = (1 + e_v) d(v)` with `e_v` drawn from
/// `N(0, eps/2)` conditioned on `|e_v| <= eps` (rejection sampling).
pub fn gen_relative_error<S: Scalar>(d_to_goal: &[S], eps: S, seed: u64) -> Result<Prediction<S>> {
    relative_error_with(d_to_goal, eps, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn relative_error_with<S: Scalar, R: Rng + ?Sized>(
    d_to_goal: &[S],
    eps: S,
    rng: &mut R,
) -> Result<Prediction<S>> {
    if !(eps >= S::zero() && eps < S::one()) {
        return Err(Error::Input(format!("relative error {eps} outside [0, 1)")));
    }
    let values = d_to_goal
        .iter()
        .map(|&d| d * (S::one() + S::of(truncated_normal(eps.as_f64(), rng))))
        .collect();
    Ok(Prediction::new(values))
}

/// Sample of `N(0, eps/2)` conditioned on `[-eps, eps]`.
pub fn truncated_normal<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, eps / 2.0).expect("positive standard deviation");
    loop {
        let x: f64 = normal.sample(rng);
        if x.abs() <= eps {
            return x;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phi {
    /// Count of vertices whose prediction disagrees with `v` being the goal.
    Phi0,
    /// Total absolute disagreement with `v` being the goal.
    Phi1,
}

/// Per-vertex implied error: how inconsistent the predictions are with each
/// vertex being the goal.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpliedError<S> {
    pub which: Phi,
    pub values: Vec<S>,
}

impl<S: Scalar> ImpliedError<S> {
    #[inline]
    pub fn get(&self, v: VertexId) -> S {
        self.values[v.0]
    }
}

pub fn implied_error<S: Scalar>(g: &Graph<S>, f: &Prediction<S>, which: Phi) -> Result<ImpliedError<S>> {
    implied_error_with(&all_pairs(g), f, which)
}

/// [`implied_error`] over precomputed distances. `phi(v)` compares `f(u)`
/// against `d(u, v)` for every `u`.
pub fn implied_error_with<S: Scalar>(
    dist: &DistanceMatrix<S>,
    f: &Prediction<S>,
    which: Phi,
) -> Result<ImpliedError<S>> {
    let n = dist.n();
    if f.len() != n {
        return Err(Error::Input(format!("{} predictions for {n} vertices", f.len())));
    }
    let mut values = vec![S::zero(); n];
    for u in 0..n {
        let row = dist.row(VertexId(u));
        let fu = f.values[u];
        for (v, &d) in row.iter().enumerate() {
            values[v] = values[v]
                + match which {
                    Phi::Phi0 if eq_tol(fu, d) => S::zero(),
                    Phi::Phi0 => S::one(),
                    Phi::Phi1 => (fu - d).abs(),
                };
        }
    }
    Ok(ImpliedError { which, values })
}

/// `{v : phi(v) <= threshold}` in increasing id order.
pub fn sublevel_set<S: Scalar>(phi: &ImpliedError<S>, threshold: S) -> Vec<VertexId> {
    phi.values
        .iter()
        .enumerate()
        .filter(|&(_, &x)| le_tol(x, threshold))
        .map(|(i, _)| VertexId(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::distances_to;

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn perfect_predictions_have_zero_profile() {
        let d = [3.0, 2.0, 0.0, 1.0];
        let p = error_profile(&d, &Prediction::exact(&d), VertexId(2));
        assert_eq!((p.e0, p.e1, p.e1_minus, p.einf_plus, p.eps_max), (0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn p3_profile() {
        // path 0 - 1 - 2 with w = 5, goal at 2
        let d = [10.0, 5.0, 0.0];
        let f = Prediction::new(vec![0.0, 5.0, 0.0]);
        let p = error_profile(&d, &f, VertexId(2));
        assert_eq!(p.e1_minus, 10.0);
        assert_eq!(p.einf_plus, 0.0);
        assert_eq!(p.e0, 1);
        assert_eq!(p.eps_max, 1.0);
    }

    #[test]
    fn mispredicted_goal_has_infinite_relative_error() {
        let p = error_profile(&[1.0f64, 0.0], &Prediction::new(vec![1.0, 0.5]), VertexId(1));
        assert!(p.eps_max.is_infinite());
        assert_eq!(p.einf_plus, 0.5);
    }

    #[test]
    fn absolute_error_hits_requested_norm() {
        let d = [4.0f64, 1.0, 0.0];
        assert_eq!(gen_absolute_error(&d, 0.0, 3).values, d.to_vec());
        for seed in 0..50 {
            let f = gen_absolute_error(&d, 7.5, seed);
            // recompute the norm independently
            let norm: f64 = f.values.iter().zip(&d).map(|(a, b)| (a - b).abs()).sum();
            assert!((norm - 7.5).abs() < 1e-6);
            assert_eq!(f, gen_absolute_error(&d, 7.5, seed));
        }
    }

    #[test]
    fn absolute_error_uses_both_signs() {
        let d = vec![10.0; 200];
        let f = gen_absolute_error(&d, 50.0, 1);
        assert!(f.values.iter().any(|&x| x > 10.0));
        assert!(f.values.iter().any(|&x| x < 10.0));
    }

    #[test]
    fn admissible_error_respects_caps() {
        let d = [6.0f64, 3.0, 0.0, 1.0, 2.0];
        assert_eq!(gen_admissible_error(&d, 0.0, 0).unwrap().values, d.to_vec());
        for seed in 0..50 {
            let f = gen_admissible_error(&d, 9.0, seed).unwrap();
            let mut total = 0.0;
            for (fv, dv) in f.values.iter().zip(&d) {
                assert!(*fv >= 0.0 && *fv <= *dv);
                total += dv - fv;
            }
            assert!((total - 9.0).abs() < 1e-9);
        }
        // the whole mass forces f = 0
        let f = gen_admissible_error(&d, 12.0, 4).unwrap();
        assert!(f.values.iter().all(|&x| x.abs() < 1e-12));
        assert!(matches!(gen_admissible_error(&d, 12.5, 4), Err(Error::Input(_))));
    }

    #[test]
    fn admissible_concentrated_on_far_end_of_p3() {
        // goal at 0, root at 1: d = (0, 5, 10); all error mass on vertex 2
        let d = [0.0, 5.0, 10.0];
        let f = admissible_from_weights(&d, 10.0, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.values, vec![0.0, 5.0, 0.0]);
    }

    #[test]
    fn relative_error_within_band() {
        let d = [0.0, 1.0, 2.0, 7.0, 30.0];
        assert_eq!(gen_relative_error(&d, 0.0, 9).unwrap().values, d.to_vec());
        for seed in 0..100 {
            let f = gen_relative_error(&d, 0.3, seed).unwrap();
            assert_eq!(f.values[0], 0.0);
            for (fv, dv) in f.values.iter().zip(&d) {
                assert!(*fv >= 0.7 * dv - 1e-12 && *fv <= 1.3 * dv + 1e-12);
            }
        }
        assert!(gen_relative_error(&d, 1.0, 0).is_err());
    }

    #[test]
    fn truncated_normal_matches_reference_spread() {
        // reference: explicit Box-Muller rejection sampler
        let eps = 0.2;
        let sigma = eps / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let reference: Vec<f64> = std::iter::from_fn(|| {
            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.random();
            Some(sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
        })
        .filter(|x: &f64| x.abs() <= eps)
        .take(100_000)
        .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let ours: Vec<f64> = (0..100_000).map(|_| truncated_normal(eps, &mut rng)).collect();
        let sd = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
        };
        assert!((sd(&ours) - sd(&reference)).abs() < 0.002);
        assert!(ours.iter().all(|x| x.abs() <= eps));
    }

    #[test]
    fn phi_on_unit_path() {
        let g = Graph::<f64>::path(3, 1.0);
        let f = Prediction::exact(&distances_to(&g, VertexId(2)));
        assert_eq!(f.values, vec![2.0, 1.0, 0.0]);
        let phi0 = implied_error(&g, &f, Phi::Phi0).unwrap();
        assert_eq!(phi0.values, vec![2.0, 3.0, 0.0]);
        let phi1 = implied_error(&g, &f, Phi::Phi1).unwrap();
        assert_eq!(phi1.values[0], 4.0);
        assert_eq!(phi1.values[2], 0.0);
        assert_eq!(sublevel_set(&phi0, 1.0), ids(&[2]));
        assert_eq!(sublevel_set(&phi0, 3.0), ids(&[0, 1, 2]));
        assert!(sublevel_set(&phi0, 0.0).contains(&VertexId(2)));
    }

    #[test]
    fn phi_at_goal_matches_profile() {
        let g = Graph::<f64>::cycle(7, 1.0);
        let goal = VertexId(3);
        let d = distances_to(&g, goal);
        let f = gen_absolute_error(&d, 6.0, 12);
        let p = error_profile(&d, &f, goal);
        let phi0 = implied_error(&g, &f, Phi::Phi0).unwrap();
        let phi1 = implied_error(&g, &f, Phi::Phi1).unwrap();
        assert_eq!(phi0.get(goal), p.e0 as f64);
        assert!((phi1.get(goal) - p.e1).abs() < 1e-9);
    }
}

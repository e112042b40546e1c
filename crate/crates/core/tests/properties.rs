use predsearch::bounds::{check_trace, greedy_bound};
use predsearch::experiments::{run_single, sample_trial, Family, Regime, SweepStrategy};
use predsearch::exploration::{run_greedy, SearchInstance};
use predsearch::graph::{all_pairs, steiner_tree_exact_on_tree, tour_cost};
use predsearch::instances::{instance_from_json, instance_to_json, random_tree};
use predsearch::metrics::{distortion, unit_path, Embedding};
use predsearch::planning::run_full_info;
use predsearch::predictions::{
    error_profile, gen_absolute_error, gen_admissible_error, gen_relative_error, Phi, Prediction,
};
use predsearch::{Instance32, VertexId};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family(i: usize) -> Family {
    Family::standard()[i % 4]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn exact(fam: usize, half_n: usize, seed: u64) -> SearchInstance<f64> {
    sample_trial(&family(fam), 2 * half_n, Regime::Absolute, 0.0, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shortest_paths_form_a_metric(fam in 0usize..4, half_n in 3usize..15, seed: u64) {
        let inst = exact(fam, half_n, seed);
        let d = all_pairs(inst.graph());
        for u in inst.graph().vertices() {
            prop_assert_eq!(d.get(u, u), 0.0);
            for v in inst.graph().vertices() {
                prop_assert_eq!(d.get(u, v), d.get(v, u));
                for w in inst.graph().vertices() {
                    prop_assert!(d.get(u, w) <= d.get(u, v) + d.get(v, w) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn absolute_error_has_requested_norm(fam in 0usize..4, half_n in 3usize..30, e1 in 0.0f64..200.0, seed: u64) {
        let inst = exact(fam, half_n, seed);
        let f = gen_absolute_error(inst.dist_to_goal(), e1, seed);
        let p = error_profile(inst.dist_to_goal(), &f, inst.goal());
        prop_assert!(close(p.e1, e1));
        prop_assert!(p.e1_minus <= p.e1 + 1e-9);
    }

    #[test]
    fn admissible_error_never_overestimates(fam in 0usize..4, half_n in 3usize..30, frac in 0.0f64..1.0, seed: u64) {
        let inst = exact(fam, half_n, seed);
        let d = inst.dist_to_goal();
        let e1 = frac * d.iter().sum::<f64>();
        let f = gen_admissible_error(d, e1, seed).unwrap();
        for v in inst.graph().vertices() {
            prop_assert!(f.get(v) >= 0.0 && f.get(v) <= d[v.0]);
        }
        let p = error_profile(d, &f, inst.goal());
        prop_assert_eq!(p.einf_plus, 0.0);
        prop_assert!(close(p.e1, e1));
    }

    #[test]
    fn relative_error_stays_in_band(fam in 0usize..4, half_n in 3usize..30, eps in 0.0f64..0.9, seed: u64) {
        let inst = exact(fam, half_n, seed);
        let f = gen_relative_error(inst.dist_to_goal(), eps, seed).unwrap();
        let p = error_profile(inst.dist_to_goal(), &f, inst.goal());
        prop_assert!(p.eps_max <= eps + 1e-12);
        prop_assert_eq!(f.get(inst.goal()), 0.0);
    }

    #[test]
    fn every_strategy_yields_a_consistent_trace(
        fam in 0usize..4,
        half_n in 3usize..25,
        regime in prop_oneof![Just(Regime::Absolute), Just(Regime::Admissible), Just(Regime::Relative)],
        mag in 0.0f64..1.0,
        seed: u64,
    ) {
        // unit weights give admissible errors a budget of at least n - 1
        let magnitude = match regime {
            Regime::Relative => 0.3 * mag,
            Regime::Admissible => (2 * half_n - 1) as f64 * mag,
            Regime::Absolute => 20.0 * mag,
        };
        let inst = sample_trial(&family(fam), 2 * half_n, regime, magnitude, seed).unwrap();
        let mut strategies = vec![
            SweepStrategy::Greedy,
            SweepStrategy::BetaWeighted { beta: 2.0 / 3.0 },
            SweepStrategy::SmallestPrediction,
            SweepStrategy::Astar,
        ];
        // pruning refuses predictions outside its error band
        if regime == Regime::Relative {
            strategies.push(SweepStrategy::Pruned { eps: Some(0.3) });
        }
        for s in strategies {
            let t = run_single(&inst, s).unwrap();
            prop_assert!(check_trace(&inst, &t).is_ok(), "{}: {:?}", s.name(), check_trace(&inst, &t));
        }
        let t = run_greedy(&inst).unwrap();
        let bound = greedy_bound(inst.opt(), &inst.profile(), inst.n());
        prop_assert!(t.alg <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn trials_are_reproducible_and_serializable(fam in 0usize..4, half_n in 3usize..30, seed: u64) {
        let a = sample_trial(&family(fam), 2 * half_n, Regime::Absolute, 10.0, seed).unwrap();
        let b = sample_trial(&family(fam), 2 * half_n, Regime::Absolute, 10.0, seed).unwrap();
        let text = instance_to_json(&a);
        prop_assert_eq!(&text, &instance_to_json(&b));
        let back: SearchInstance<f64> = instance_from_json(&text).unwrap();
        prop_assert_eq!(instance_to_json(&back), text);
    }

    #[test]
    fn embeddings_never_shrink_distortion_below_one(n in 2usize..12, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree::<f64, _>(n, 3, &mut rng).unwrap();
        let p = unit_path::<f64>(n);
        let mut map: Vec<VertexId> = (0..n).map(VertexId).collect();
        map.shuffle(&mut rng);
        let r = distortion(&Embedding::new(&g, &p, map).unwrap()).unwrap();
        prop_assert!(r.distortion >= 1.0 - 1e-12);
        prop_assert!(close(r.distortion, r.lip_forward * r.lip_inverse));
    }

    #[test]
    fn tree_tours_lie_between_one_and_two_steiner_weights(n in 2usize..30, k in 1usize..9, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree::<f64, _>(n, 4, &mut rng).unwrap();
        let mut all: Vec<VertexId> = g.vertices().collect();
        all.shuffle(&mut rng);
        let s = &all[..k.min(n)];
        let w = steiner_tree_exact_on_tree(&g, s).unwrap().weight();
        let tour = tour_cost(&g, s).unwrap();
        prop_assert!(w <= tour + 1e-9 && tour <= 2.0 * w + 1e-9);
    }

    #[test]
    fn planning_reaches_the_goal_with_doubling_thresholds(n in 2usize..25, e1 in 0.0f64..10.0, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree::<f64, _>(n, 1, &mut rng).unwrap();
        let inst = SearchInstance::with_exact_predictions(g, VertexId(0), VertexId(n - 1))
            .and_then(|i| i.with_integer_distance(true))
            .unwrap();
        let f = gen_absolute_error(inst.dist_to_goal(), e1, seed);
        let inst = inst.with_predictions(f).unwrap();
        for which in [Phi::Phi0, Phi::Phi1] {
            let t = run_full_info(&inst, which).unwrap();
            prop_assert_eq!(t.visits.first(), Some(&inst.root()));
            prop_assert_eq!(t.visits.last(), Some(&inst.goal()));
            prop_assert!(t.alg >= t.opt - 1e-9);
            for w in t.thresholds().windows(2) {
                prop_assert_eq!(w[1], 2.0 * w[0]);
            }
        }
    }

    #[test]
    fn single_precision_search_agrees_with_double(half_n in 3usize..25, seed: u64) {
        let inst = exact(0, half_n, seed);
        let f = gen_absolute_error(inst.dist_to_goal(), 5.0, seed);
        let inst = inst.with_predictions(f.clone()).unwrap();
        let values = (0..inst.n()).map(|i| f.get(VertexId(i)) as f32).collect();
        let single: Instance32 =
            SearchInstance::new(inst.graph().cast(), inst.root(), inst.goal(), Prediction::new(values)).unwrap();
        let t = run_greedy(&single).unwrap();
        prop_assert!(check_trace(&single, &t).is_ok());
        prop_assert!((t.opt as f64 - inst.opt()).abs() < 1e-3);
    }
}

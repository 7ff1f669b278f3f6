use didpr::assort::EdgeMixMatrix;
use didpr::generators::{gen_dpa, DpaParams};
use didpr::lp::Simplex;
use didpr::rewire::{acceptance_probability, balance_ratio, rewire, AssortTracker, RewiringConfig};
use didpr::{
    assortativity_of_graph, coefficient_bounds, solve_target_eta, AssortProfile, DirectedGraph, EtaMethod, EtaProblem,
    TypePair,
};
mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph_strategy() -> impl Strategy<Value = DirectedGraph> {
    (3usize..12).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32), 4..40)
            .prop_map(move |edges| DirectedGraph::from_edges(n, edges))
    })
}

/// Pearson correlation over edges of the source's `a` degree and the
/// target's `b` degree, straight from the edge list.
fn edge_pearson(g: &DirectedGraph, pair: TypePair) -> Option<f64> {
    let deg = |ty: didpr::DegreeType, v: u32| match ty {
        didpr::DegreeType::Out => g.out_degrees()[v as usize] as f64,
        didpr::DegreeType::In => g.in_degrees()[v as usize] as f64,
    };
    let xs: Vec<f64> = g.edges().iter().map(|&(s, _)| deg(pair.source(), s)).collect();
    let ys: Vec<f64> = g.edges().iter().map(|&(_, t)| deg(pair.target(), t)).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / m;
    let vx = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / m;
    let vy = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / m;
    (vx > 1e-12 && vy > 1e-12).then(|| cov / (vx * vy).sqrt())
}

fn random_swaps(g: &mut DirectedGraph, rng: &mut ChaCha8Rng, count: usize) {
    let m = g.num_edges();
    for _ in 0..count {
        let (a, b) = (rng.random_range(0..m), rng.random_range(0..m));
        if a != b {
            g.swap_edges(a, b).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coefficients_match_edge_pearson(g in graph_strategy()) {
        let Ok(r) = assortativity_of_graph(&g) else { return Ok(()) };
        for pair in TypePair::ALL {
            let oracle = edge_pearson(&g, pair).unwrap();
            prop_assert!((r.get(pair) - oracle).abs() < 1e-10, "{pair}: {} vs {oracle}", r.get(pair));
        }
    }

    #[test]
    fn swaps_preserve_degrees_and_tracker_stays_exact(g in graph_strategy(), seed in any::<u64>()) {
        prop_assume!(assortativity_of_graph(&g).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = g.clone();
        let mut tracker = AssortTracker::new(&h).unwrap();
        for _ in 0..50 {
            let m = h.num_edges();
            let (a, b) = (rng.random_range(0..m), rng.random_range(0..m));
            if a == b {
                continue;
            }
            tracker.apply(AssortTracker::swap_delta(&h, a, b));
            h.swap_edges(a, b).unwrap();
        }
        prop_assert_eq!(h.out_degrees(), g.out_degrees());
        prop_assert_eq!(h.in_degrees(), g.in_degrees());
        prop_assert_eq!(h.degree_pair_dist().unwrap(), g.degree_pair_dist().unwrap());
        let fresh = assortativity_of_graph(&h).unwrap();
        prop_assert!(tracker.profile().max_abs_diff(&fresh) < 1e-10);
    }

    #[test]
    fn acceptance_in_unit_interval_and_balanced(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (eta, s, t) = common::random_eta(&mut rng);
        let mut pick = |v: &[didpr::DegreePair]| v[rng.random_range(0..v.len())];
        let pairs = [pick(&s), pick(&t), pick(&s), pick(&t)];
        let p = acceptance_probability(&eta, pairs).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let get = |a, b| eta.get(a, b).unwrap();
        let [p1, p2, p3, p4] = pairs;
        let expect = get(p1, p4) * get(p3, p2) / (get(p1, p2) * get(p3, p4));
        let got = balance_ratio(&eta, pairs).unwrap();
        prop_assert!((got - expect).abs() <= 1e-12 * expect.max(1.0), "{got} vs {expect}");
    }

    #[test]
    fn observed_profile_lies_within_bounds(g in graph_strategy(), seed in any::<u64>()) {
        let Ok(p) = EtaProblem::from_graph(&g) else { return Ok(()) };
        let Ok(b) = coefficient_bounds(&p, &TypePair::ALL, &Simplex::default()) else { return Ok(()) };
        let mut h = g.clone();
        random_swaps(&mut h, &mut ChaCha8Rng::seed_from_u64(seed), 30);
        for graph in [&g, &h] {
            let r = assortativity_of_graph(graph).unwrap();
            for pair in TypePair::ALL {
                let (lo, hi) = b.get(pair).unwrap();
                prop_assert!(lo - 1e-7 <= r.get(pair) && r.get(pair) <= hi + 1e-7);
            }
        }
    }

    #[test]
    fn solved_eta_reproduces_feasible_targets(g in graph_strategy(), seed in any::<u64>(), lambda in 0.0f64..1.0) {
        prop_assume!(assortativity_of_graph(&g).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut a, mut b) = (g.clone(), g.clone());
        random_swaps(&mut a, &mut rng, 40);
        random_swaps(&mut b, &mut rng, 40);
        // Convex combinations of attainable profiles are attainable.
        let (ra, rb) = (assortativity_of_graph(&a).unwrap(), assortativity_of_graph(&b).unwrap());
        let targets = AssortProfile::from_array(
            std::array::from_fn(|k| lambda * ra.to_array()[k] + (1.0 - lambda) * rb.to_array()[k]),
        );
        let p = EtaProblem::from_graph(&g).unwrap().with_targets(targets);
        let lp = p.assemble_constraints().unwrap();
        for method in [EtaMethod::MaxEntropy, EtaMethod::Vertex] {
            let eta = solve_target_eta(&p, method, &Simplex::default()).unwrap().solved().unwrap();
            prop_assert!(eta.assortativity().unwrap().max_abs_diff(&targets) <= 1e-4);
            let x = p.witness_vector(&eta).unwrap();
            let res = lp.residuals(&x);
            prop_assert!(res.max_eq <= 1e-7 && res.max_negative <= 1e-12, "{method:?}: {res:?}");
        }
    }
}

#[test]
fn rewiring_keeps_dpa_degrees() {
    let dpa = gen_dpa(&DpaParams::new(0.3, 0.4, 1.0, 3000, 5)).unwrap();
    let g = dpa.graph;
    let eta = EdgeMixMatrix::from_graph(&g).unwrap();
    let cfg = RewiringConfig { max_steps: 20_000, seed: 9, ..RewiringConfig::default() };
    let (h, trace) = rewire(&g, &eta, &cfg).unwrap();
    assert_eq!(h.out_degrees(), g.out_degrees());
    assert_eq!(h.in_degrees(), g.in_degrees());
    assert!(trace.checkpoints.windows(2).all(|w| w[0].step < w[1].step));
    assert!(trace.checkpoints.iter().all(|c| (0.0..=1.0).contains(&c.acc_rate)));
    let last = trace.last().unwrap().profile();
    assert!(last.max_abs_diff(&assortativity_of_graph(&h).unwrap()) < 1e-10);
}

mod common;

use didpr::lp::{LinearProgram, LpBackend, LpStatus, Simplex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check(lp: &LinearProgram) -> Result<(), TestCaseError> {
    let (status, best) = common::vertex_enumeration(lp);
    let sol = Simplex::default().solve(lp).unwrap();
    prop_assert_eq!(sol.status, status, "{}", lp.dump());
    if let Some(best) = best {
        prop_assert!((sol.objective_value - best).abs() <= 1e-9, "{} vs {best}\n{}", sol.objective_value, lp.dump());
        prop_assert!(lp.residuals(&sol.x).acceptable());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_matches_vertex_enumeration(seed in any::<u64>()) {
        let lp = common::random_small_lp(&mut ChaCha8Rng::seed_from_u64(seed));
        check(&lp)?;
    }

    #[test]
    fn warm_start_does_not_change_the_answer(seed in any::<u64>(), hint in proptest::collection::vec(0.0f64..3.0, 6)) {
        let lp = common::random_small_lp(&mut ChaCha8Rng::seed_from_u64(seed));
        let cold = Simplex::default().solve(&lp).unwrap();
        let warm = Simplex::default().solve_from(&lp, &hint[..lp.num_vars]).unwrap();
        prop_assert_eq!(cold.status, warm.status);
        if cold.status == LpStatus::Optimal {
            prop_assert!((cold.objective_value - warm.objective_value).abs() <= 1e-9);
            prop_assert!(lp.residuals(&warm.x).acceptable());
        }
    }
}

#[test]
fn textbook_degenerate_lp() {
    // Beale's cycling example: Dantzig's rule with a naive ratio test cycles.
    let mut lp = LinearProgram::feasibility(4);
    lp.objective = vec![-0.75, 150.0, -0.02, 6.0];
    lp.add_ub([(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], 0.0);
    lp.add_ub([(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], 0.0);
    lp.add_ub([(2, 1.0)], 1.0);
    let sol = Simplex::default().solve(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective_value + 0.05).abs() < 1e-12);
    let (status, best) = common::vertex_enumeration(&lp);
    assert_eq!(status, LpStatus::Optimal);
    assert!((best.unwrap() + 0.05).abs() < 1e-12);
}

#[test]
fn oracle_sees_all_statuses() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut seen = [0usize; 3];
    for _ in 0..300 {
        let (s, _) = common::vertex_enumeration(&common::random_small_lp(&mut rng));
        seen[s as usize] += 1;
    }
    assert!(seen.iter().all(|&c| c >= 10), "{seen:?}");
}

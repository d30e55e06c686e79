//! Property tests for the structural invariants of the maps, the targeting
//! problem, and the search.

use chaos_target::harness::mean_curve;
use chaos_target::maps::{ChaoticMap, State2};
use chaos_target::problem::{ControlSequence, TargetingProblem};
use chaos_target::tlbo::{
    initialize_population, learning_phase, optimize, teaching_phase, RandomWeights, TlboConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn attractor_state() -> impl Strategy<Value = State2> {
    (-1.5f64..1.5, -0.5f64..0.5).prop_map(|(x1, x2)| State2::new(x1, x2))
}

fn any_map() -> impl Strategy<Value = ChaoticMap> {
    prop_oneof![
        Just(ChaoticMap::henon_default()),
        Just(ChaoticMap::ushio_default()),
    ]
}

fn henon_problem(horizon: usize, mu: f64) -> TargetingProblem {
    TargetingProblem::new(
        ChaoticMap::henon_default(),
        State2::new(0.0, 0.0),
        State2::new(0.63135, 0.18941),
        horizon,
        mu,
        0.001,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn second_component_coupling_is_exact(map in any_map(), s in attractor_state()) {
        let (_, x2) = map.image(s);
        let coupling = match map {
            ChaoticMap::Henon { q, .. } => q,
            ChaoticMap::Ushio { beta, .. } => beta,
        };
        prop_assert_eq!(x2, coupling * s.x1);
    }

    #[test]
    fn zero_perturbation_matches_uncontrolled_bitwise(
        map in any_map(),
        x0 in attractor_state(),
        horizon in 1usize..12,
    ) {
        let problem = TargetingProblem::new(
            map, x0, State2::new(0.0, 0.0), horizon, 0.01, 0.001,
        ).unwrap();
        let zeros = ControlSequence::new(vec![0.0; horizon]);
        let Ok(trajectory) = problem.controlled_trajectory(&zeros) else {
            // Overflow: the uncontrolled iteration must fail identically.
            let mut state = x0;
            let mut failed = false;
            for _ in 0..horizon {
                match map.step(state) {
                    Ok(next) => state = next,
                    Err(_) => { failed = true; break; }
                }
            }
            prop_assert!(failed);
            return Ok(());
        };
        let mut state = x0;
        for expected in &trajectory[1..] {
            state = map.step(state).unwrap();
            prop_assert_eq!(state, *expected);
        }
    }

    #[test]
    fn clamp_is_idempotent_and_feasible(
        values in prop::collection::vec(-10.0f64..10.0, 0..16),
        mu in 1e-6f64..1.0,
    ) {
        let u = ControlSequence::new(values);
        let once = u.clamp_to_bounds(mu).unwrap();
        prop_assert!(once.values().iter().all(|v| v.abs() <= mu));
        let twice = once.clamp_to_bounds(mu).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn objective_is_non_negative(
        values in prop::collection::vec(-0.01f64..=0.01, 1..10),
    ) {
        let problem = henon_problem(values.len(), 0.01);
        prop_assert!(problem.objective(&values) >= 0.0);
    }

    #[test]
    fn second_component_never_depends_on_control(
        values in prop::collection::vec(-0.01f64..=0.01, 1..10),
    ) {
        let problem = henon_problem(values.len(), 0.01);
        let trajectory = problem
            .controlled_trajectory(&ControlSequence::new(values))
            .unwrap();
        for pair in trajectory.windows(2) {
            prop_assert_eq!(pair[1].x2, 0.3 * pair[0].x1);
        }
    }

    #[test]
    fn random_weights_stay_in_range(dimension in 1usize..32, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = RandomWeights::draw(dimension, &mut rng);
        prop_assert!(weights.r.iter().all(|r| (0.0..=1.0).contains(r)));
        prop_assert!(weights.t_factor.iter().all(|t| *t == 1 || *t == 2));
    }

    #[test]
    fn phases_preserve_feasibility_and_elitism(
        seed in any::<u64>(),
        horizon in 1usize..8,
        population_size in 2usize..8,
    ) {
        let problem = henon_problem(horizon, 0.01);
        let cfg = TlboConfig::new(population_size, 1, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pop = initialize_population(&problem, &cfg, &mut rng);
        let mut best = pop.best().fitness;
        for _ in 0..5 {
            teaching_phase(&mut pop, &problem, &mut rng);
            prop_assert!(pop.best().fitness <= best);
            best = pop.best().fitness;
            learning_phase(&mut pop, &problem, &mut rng);
            prop_assert!(pop.best().fitness <= best);
            best = pop.best().fitness;
            for learner in &pop.learners {
                prop_assert!(learner.position.iter().all(|u| u.abs() <= problem.mu));
            }
        }
    }

    #[test]
    fn optimize_accounting_determinism_and_curve(
        seed in any::<u64>(),
        horizon in 1usize..6,
        population_size in 2usize..8,
        generations in 1usize..10,
    ) {
        let problem = henon_problem(horizon, 0.01);
        let cfg = TlboConfig::new(population_size, generations, seed).unwrap();
        let record = optimize(&problem, &cfg);
        prop_assert_eq!(
            record.evaluations_used,
            population_size + 2 * population_size * generations
        );
        prop_assert_eq!(record.best_fitness_per_generation.len(), generations);
        for pair in record.best_fitness_per_generation.windows(2) {
            prop_assert!(pair[1] <= pair[0]);
        }
        let replay = optimize(&problem, &cfg);
        prop_assert_eq!(record, replay);
    }

    #[test]
    fn mean_curves_of_real_runs_are_non_increasing(
        seed in any::<u64>(),
        horizon in 2usize..6,
    ) {
        let problem = henon_problem(horizon, 0.01);
        let records: Vec<_> = (0..3)
            .map(|i| {
                let cfg = TlboConfig::new(5, 15, seed.wrapping_add(i)).unwrap();
                optimize(&problem, &cfg)
            })
            .collect();
        let curve = mean_curve(&records).unwrap();
        for pair in curve.windows(2) {
            prop_assert!(pair[1].mean_best_fitness <= pair[0].mean_best_fitness);
        }
    }
}

//! Teaching-learning-based optimization over bounded perturbation sequences.
//!
//! Each generation applies a teaching phase (move towards the best member,
//! weighted against the population mean) followed by a learning phase
//! (pairwise difference moves), both with one-to-one greedy selection that
//! keeps the incumbent unless the candidate is strictly better. The best
//! member and the population mean are frozen at teaching-phase entry, and
//! learning partners are read from a snapshot taken at learning-phase entry,
//! so per-learner update order never changes the semantics.
//!
//! Randomness is fully determined by the config seed. Draw order per learner:
//! teaching draws the d weight values then the d teaching factors; learning
//! draws the partner index then the d weight values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::problem::{ControlSequence, TargetingProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TlboError {
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("max_generations must be at least 1")]
    NoGenerations,
}

/// Search parameters. `seed` fully determines a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TlboConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub seed: u64,
}

impl TlboConfig {
    pub fn new(
        population_size: usize,
        max_generations: usize,
        seed: u64,
    ) -> Result<Self, TlboError> {
        let cfg = Self {
            population_size,
            max_generations,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), TlboError> {
        if self.population_size < 2 {
            return Err(TlboError::PopulationTooSmall(self.population_size));
        }
        if self.max_generations < 1 {
            return Err(TlboError::NoGenerations);
        }
        Ok(())
    }
}

/// A candidate solution: feasible position plus its cached objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct Learner {
    pub position: Vec<f64>,
    pub fitness: f64,
}

/// The learner group; `best_index` points at the minimal fitness, ties broken
/// by lowest index.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub learners: Vec<Learner>,
    pub best_index: usize,
}

impl Population {
    pub fn best(&self) -> &Learner {
        &self.learners[self.best_index]
    }

    fn refresh_best(&mut self) {
        let mut best = 0;
        for (i, learner) in self.learners.iter().enumerate().skip(1) {
            if learner.fitness < self.learners[best].fitness {
                best = i;
            }
        }
        self.best_index = best;
    }
}

/// Per-dimension random weights for one teaching update: `r` uniform in
/// [0, 1], `t_factor` drawn from {1, 2} with equal probability.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomWeights {
    pub r: Vec<f64>,
    pub t_factor: Vec<u8>,
}

impl RandomWeights {
    pub fn draw(dimension: usize, rng: &mut impl Rng) -> Self {
        let mut weights = Self {
            r: vec![0.0; dimension],
            t_factor: vec![0; dimension],
        };
        weights.refill(rng);
        weights
    }

    // All r values first, then all teaching factors.
    fn refill(&mut self, rng: &mut impl Rng) {
        for r in &mut self.r {
            *r = rng.random::<f64>();
        }
        for t in &mut self.t_factor {
            *t = rng.random_range(1..=2u8);
        }
    }
}

/// Outcome of a single search run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub best_position: ControlSequence,
    pub best_fitness: f64,
    /// Population-best objective after each full generation; non-increasing.
    pub best_fitness_per_generation: Vec<f64>,
    pub evaluations_used: usize,
    /// First 1-based generation whose recorded best beat the problem epsilon.
    pub success_generation: Option<usize>,
}

/// NP learners drawn i.i.d. uniform on the feasible box [−μ, μ]^N.
pub fn initialize_population(
    problem: &TargetingProblem,
    cfg: &TlboConfig,
    rng: &mut impl Rng,
) -> Population {
    let dimension = problem.horizon;
    let mu = problem.mu;
    let learners = (0..cfg.population_size)
        .map(|_| {
            let position: Vec<f64> = (0..dimension).map(|_| rng.random_range(-mu..=mu)).collect();
            let fitness = problem.objective(&position);
            Learner { position, fitness }
        })
        .collect();
    let mut pop = Population {
        learners,
        best_index: 0,
    };
    pop.refresh_best();
    pop
}

/// Elementwise arithmetic mean of all learner positions.
pub fn mean_position(pop: &Population) -> Vec<f64> {
    let dimension = pop.learners[0].position.len();
    let mut mean = vec![0.0; dimension];
    for learner in &pop.learners {
        for (m, &x) in mean.iter_mut().zip(&learner.position) {
            *m += x;
        }
    }
    let np = pop.learners.len() as f64;
    for m in &mut mean {
        *m /= np;
    }
    mean
}

fn teaching_candidate(
    position: &[f64],
    best: &[f64],
    mean: &[f64],
    weights: &RandomWeights,
    mu: f64,
    out: &mut [f64],
) {
    for j in 0..position.len() {
        let tf = f64::from(weights.t_factor[j]);
        out[j] = (weights.r[j] * (best[j] - tf * mean[j]) + position[j]).clamp(-mu, mu);
    }
}

fn learning_candidate(
    own: &[f64],
    partner: &[f64],
    own_is_better: bool,
    rand_weights: &[f64],
    mu: f64,
    out: &mut [f64],
) {
    for j in 0..own.len() {
        let diff = if own_is_better {
            own[j] - partner[j]
        } else {
            partner[j] - own[j]
        };
        out[j] = (own[j] + rand_weights[j] * diff).clamp(-mu, mu);
    }
}

/// Teaching phase with one-to-one selection. The best position and the mean
/// are frozen at entry. Returns the number of objective evaluations (= NP).
pub fn teaching_phase(
    pop: &mut Population,
    problem: &TargetingProblem,
    rng: &mut impl Rng,
) -> usize {
    let dimension = problem.horizon;
    let best = pop.best().position.clone();
    let mean = mean_position(pop);
    let mut weights = RandomWeights {
        r: vec![0.0; dimension],
        t_factor: vec![0; dimension],
    };
    let mut candidate = vec![0.0; dimension];
    for learner in &mut pop.learners {
        weights.refill(rng);
        teaching_candidate(
            &learner.position,
            &best,
            &mean,
            &weights,
            problem.mu,
            &mut candidate,
        );
        let fitness = problem.objective(&candidate);
        if fitness < learner.fitness {
            learner.position.copy_from_slice(&candidate);
            learner.fitness = fitness;
        }
    }
    pop.refresh_best();
    pop.learners.len()
}

/// Learning phase with greedy replacement. Partner positions and fitness come
/// from a snapshot of the population at phase entry. Returns the number of
/// objective evaluations (= NP).
pub fn learning_phase(
    pop: &mut Population,
    problem: &TargetingProblem,
    rng: &mut impl Rng,
) -> usize {
    let np = pop.learners.len();
    let dimension = problem.horizon;
    // Flat entry snapshot: one allocation for positions, one for fitness.
    let mut snapshot_positions = Vec::with_capacity(np * dimension);
    let mut snapshot_fitness = Vec::with_capacity(np);
    for learner in &pop.learners {
        snapshot_positions.extend_from_slice(&learner.position);
        snapshot_fitness.push(learner.fitness);
    }
    let mut rand_weights = vec![0.0; dimension];
    let mut candidate = vec![0.0; dimension];
    for i in 0..np {
        let mut partner = rng.random_range(0..np - 1);
        if partner >= i {
            partner += 1;
        }
        for w in &mut rand_weights {
            *w = rng.random::<f64>();
        }
        let partner_position = &snapshot_positions[partner * dimension..(partner + 1) * dimension];
        let own = &pop.learners[i];
        let own_is_better = own.fitness < snapshot_fitness[partner];
        learning_candidate(
            &own.position,
            partner_position,
            own_is_better,
            &rand_weights,
            problem.mu,
            &mut candidate,
        );
        let fitness = problem.objective(&candidate);
        let learner = &mut pop.learners[i];
        if fitness < learner.fitness {
            learner.position.copy_from_slice(&candidate);
            learner.fitness = fitness;
        }
    }
    pop.refresh_best();
    np
}

/// Runs the full generation loop: initialize, then teaching + learning for
/// exactly `cfg.max_generations` generations (no early stopping; the curve
/// data is wanted in full).
pub fn optimize(problem: &TargetingProblem, cfg: &TlboConfig) -> RunRecord {
    cfg.validate().expect("invalid TLBO configuration");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = initialize_population(problem, cfg, &mut rng);
    let mut evaluations = pop.learners.len();
    let mut curve = Vec::with_capacity(cfg.max_generations);
    for _ in 0..cfg.max_generations {
        evaluations += teaching_phase(&mut pop, problem, &mut rng);
        evaluations += learning_phase(&mut pop, problem, &mut rng);
        curve.push(pop.best().fitness);
    }
    let success_generation = curve
        .iter()
        .position(|&f| f < problem.epsilon)
        .map(|i| i + 1);
    let best = pop.best();
    RunRecord {
        best_position: ControlSequence::new(best.position.clone()),
        best_fitness: best.fitness,
        best_fitness_per_generation: curve,
        evaluations_used: evaluations,
        success_generation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{henon_fixed_point, ChaoticMap, State2};

    fn henon_problem(horizon: usize, mu: f64, epsilon: f64) -> TargetingProblem {
        let fp = henon_fixed_point(1.4, 0.3).unwrap();
        TargetingProblem::new(
            ChaoticMap::henon_default(),
            State2::new(0.0, 0.0),
            fp,
            horizon,
            mu,
            epsilon,
        )
        .unwrap()
    }

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn config_validation() {
        assert!(TlboConfig::new(1, 10, 0).is_err());
        assert!(TlboConfig::new(2, 0, 0).is_err());
        assert!(TlboConfig::new(2, 1, 0).is_ok());
    }

    #[test]
    fn initialization_respects_bounds() {
        let p = henon_problem(1, 0.01, 0.001);
        let cfg = TlboConfig::new(2, 1, 9).unwrap();
        let pop = initialize_population(&p, &cfg, &mut seeded(cfg.seed));
        assert_eq!(pop.learners.len(), 2);
        for learner in &pop.learners {
            assert_eq!(learner.position.len(), 1);
            assert!(learner.position[0].abs() <= 0.01);
            assert_eq!(learner.fitness, p.objective(&learner.position));
        }
    }

    #[test]
    fn initialization_same_seed_bit_identical() {
        let p = henon_problem(4, 0.01, 0.001);
        let cfg = TlboConfig::new(10, 1, 1234).unwrap();
        let a = initialize_population(&p, &cfg, &mut seeded(cfg.seed));
        let b = initialize_population(&p, &cfg, &mut seeded(cfg.seed));
        assert_eq!(a, b);
    }

    #[test]
    fn initialization_element_mean_matches_uniform_law() {
        // 10^4 seeds, NP=50, N=9: the grand element mean must sit within 3
        // standard errors of 0 for uniform(−μ, μ) draws.
        let p = henon_problem(9, 0.01, 0.001);
        let cfg = TlboConfig::new(50, 1, 0).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..10_000u64 {
            let pop = initialize_population(&p, &cfg, &mut seeded(seed));
            for learner in &pop.learners {
                for &x in &learner.position {
                    sum += x;
                    count += 1;
                }
            }
        }
        let mean = sum / count as f64;
        let sigma = 2.0 * 0.01 / 12f64.sqrt();
        let standard_error = sigma / (count as f64).sqrt();
        assert!(
            mean.abs() < 3.0 * standard_error,
            "mean {mean} vs 3·SE {}",
            3.0 * standard_error
        );
    }

    #[test]
    fn mean_position_cases() {
        let make = |positions: &[&[f64]]| Population {
            learners: positions
                .iter()
                .map(|p| Learner {
                    position: p.to_vec(),
                    fitness: 0.0,
                })
                .collect(),
            best_index: 0,
        };
        assert_eq!(mean_position(&make(&[&[0.01], &[-0.01]])), vec![0.0]);
        assert_eq!(
            mean_position(&make(&[&[0.003, -0.2], &[0.003, -0.2]])),
            vec![0.003, -0.2]
        );
        assert_eq!(
            mean_position(&make(&[&[0.002], &[0.004], &[0.006]])),
            vec![0.004]
        );
    }

    #[test]
    fn teaching_candidate_pinned_weights() {
        // R=0.5, T=1, best=0.01, mean=0, x=0 -> 0.5·(0.01 − 0) + 0 = 0.005
        let weights = RandomWeights {
            r: vec![0.5],
            t_factor: vec![1],
        };
        let mut out = vec![0.0];
        teaching_candidate(&[0.0], &[0.01], &[0.0], &weights, 0.01, &mut out);
        assert_eq!(out, vec![0.005]);
    }

    #[test]
    fn teaching_candidate_degenerate_population() {
        // All learners identical and equal to the best with T = 1: the
        // difference vector vanishes, so the candidate equals the learner.
        let weights = RandomWeights {
            r: vec![0.7, 0.2],
            t_factor: vec![1, 1],
        };
        let x = [0.004, -0.002];
        let mut out = vec![0.0; 2];
        teaching_candidate(&x, &x, &x, &weights, 0.01, &mut out);
        assert_eq!(out, x);
    }

    #[test]
    fn learning_candidate_pinned_weights() {
        // better-learner branch: 0.002 + 0.5·(0.002 − 0.006) = 0.0
        let mut out = vec![1.0];
        learning_candidate(&[0.002], &[0.006], true, &[0.5], 0.01, &mut out);
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn learning_candidate_identical_positions() {
        let u = [0.003, -0.007];
        let mut out = vec![0.0; 2];
        learning_candidate(&u, &u, true, &[0.9, 0.1], 0.01, &mut out);
        assert_eq!(out, u);
        learning_candidate(&u, &u, false, &[0.9, 0.1], 0.01, &mut out);
        assert_eq!(out, u);
    }

    #[test]
    fn phases_keep_incumbent_on_ties() {
        // With every learner at the zero vector, both teaching (best and mean
        // both zero, so V = X for any T) and learning (zero difference) yield
        // candidates identical to the incumbents; equal fitness must keep the
        // incumbent, leaving the population unchanged.
        let p = henon_problem(2, 0.01, 0.001);
        let position = vec![0.0, 0.0];
        let fitness = p.objective(&position);
        let mut pop = Population {
            learners: (0..4)
                .map(|_| Learner {
                    position: position.clone(),
                    fitness,
                })
                .collect(),
            best_index: 0,
        };
        let before = pop.clone();
        let mut rng = seeded(5);
        teaching_phase(&mut pop, &p, &mut rng);
        assert_eq!(pop, before);
        learning_phase(&mut pop, &p, &mut rng);
        assert_eq!(pop, before);
    }

    #[test]
    fn phases_never_worsen_best_and_stay_feasible() {
        let p = henon_problem(5, 0.01, 0.001);
        let cfg = TlboConfig::new(8, 1, 77).unwrap();
        let mut rng = seeded(cfg.seed);
        let mut pop = initialize_population(&p, &cfg, &mut rng);
        let mut best = pop.best().fitness;
        for _ in 0..50 {
            teaching_phase(&mut pop, &p, &mut rng);
            assert!(pop.best().fitness <= best);
            best = pop.best().fitness;
            learning_phase(&mut pop, &p, &mut rng);
            assert!(pop.best().fitness <= best);
            best = pop.best().fitness;
            for learner in &pop.learners {
                assert!(learner.position.iter().all(|u| u.abs() <= p.mu));
                assert_eq!(learner.fitness, p.objective(&learner.position));
            }
        }
    }

    #[test]
    fn optimize_from_fixed_point_horizon_one() {
        // x0 = target = fixed point, N = 1: every candidate has fitness at
        // most mu plus the fixed-point residual, so with eps = 0.02 the first
        // generation succeeds for every seed; 1000 generations of 1-D search
        // then converge far below 1e-10.
        let fp = henon_fixed_point(1.4, 0.3).unwrap();
        let p = TargetingProblem::new(ChaoticMap::henon_default(), fp, fp, 1, 0.01, 0.02).unwrap();
        for seed in [0u64, 1, 42] {
            let cfg = TlboConfig::new(50, 1000, seed).unwrap();
            let record = optimize(&p, &cfg);
            assert_eq!(record.success_generation, Some(1), "seed {seed}");
            assert!(
                record.best_fitness < 1e-10,
                "seed {seed}: {}",
                record.best_fitness
            );
        }
    }

    #[test]
    fn optimize_same_seed_bit_identical() {
        let p = henon_problem(4, 0.01, 0.001);
        let cfg = TlboConfig::new(6, 40, 2024).unwrap();
        assert_eq!(optimize(&p, &cfg), optimize(&p, &cfg));
    }

    #[test]
    fn optimize_accounting_and_curve_shape() {
        let p = henon_problem(3, 0.01, 0.001);
        let cfg = TlboConfig::new(7, 25, 3).unwrap();
        let record = optimize(&p, &cfg);
        assert_eq!(record.evaluations_used, 7 + 2 * 7 * 25);
        assert_eq!(record.best_fitness_per_generation.len(), 25);
        for pair in record.best_fitness_per_generation.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        assert_eq!(
            record.best_fitness,
            *record.best_fitness_per_generation.last().unwrap()
        );
        assert_eq!(record.best_position.len(), 3);
        assert!(record
            .best_position
            .values()
            .iter()
            .all(|u| u.abs() <= 0.01));
    }

    #[test]
    fn success_generation_is_first_crossing() {
        let p = henon_problem(8, 0.01, 0.001);
        let cfg = TlboConfig::new(20, 120, 11).unwrap();
        let record = optimize(&p, &cfg);
        let g = record.success_generation.expect("this cell converges");
        assert!(record.best_fitness_per_generation[g - 1] < p.epsilon);
        assert!(record.best_fitness_per_generation[..g - 1]
            .iter()
            .all(|&f| f >= p.epsilon));
    }
}

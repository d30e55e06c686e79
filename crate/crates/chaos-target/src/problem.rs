//! The constrained targeting problem: simulate the controlled dynamics for a
//! bounded perturbation sequence and measure the terminal distance to the
//! target.
//!
//! The perturbation acts on the first state component only; every element of
//! the control sequence is kept inside the closed box [−μ, μ] by projection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{ChaoticMap, MapError, State2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid targeting problem: {0}")]
    Invalid(String),
    #[error("control sequence contains NaN")]
    NanControl,
    #[error("control length {got} does not match horizon {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A perturbation sequence u(0..N−1); doubles as a learner position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSequence(Vec<f64>);

impl ControlSequence {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Projects every element onto [−μ, μ]; idempotent. NaN elements are
    /// rejected rather than silently propagated.
    pub fn clamp_to_bounds(&self, mu: f64) -> Result<ControlSequence, ProblemError> {
        assert!(mu > 0.0, "mu must be positive");
        if self.0.iter().any(|u| u.is_nan()) {
            return Err(ProblemError::NanControl);
        }
        Ok(ControlSequence(
            self.0.iter().map(|u| u.clamp(-mu, mu)).collect(),
        ))
    }
}

impl From<Vec<f64>> for ControlSequence {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// Steer `map` from `x0` so that the state after `horizon` controlled steps
/// lands within `epsilon` of `target`, with per-step perturbations bounded by
/// `mu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetingProblem {
    pub map: ChaoticMap,
    pub x0: State2,
    pub target: State2,
    pub horizon: usize,
    pub mu: f64,
    pub epsilon: f64,
}

impl TargetingProblem {
    pub fn new(
        map: ChaoticMap,
        x0: State2,
        target: State2,
        horizon: usize,
        mu: f64,
        epsilon: f64,
    ) -> Result<Self, ProblemError> {
        if horizon < 1 {
            return Err(ProblemError::Invalid("horizon must be at least 1".into()));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(ProblemError::Invalid(format!(
                "mu must be a positive finite real, got {mu}"
            )));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(ProblemError::Invalid(format!(
                "epsilon must be a positive finite real, got {epsilon}"
            )));
        }
        if !x0.is_finite() || !target.is_finite() {
            return Err(ProblemError::Invalid(
                "initial and target states must be finite".into(),
            ));
        }
        Ok(Self {
            map,
            x0,
            target,
            horizon,
            mu,
            epsilon,
        })
    }

    /// Full controlled trajectory x(0..N): x(k+1) = (f1(x(k)) + u(k), f2(x(k))).
    pub fn controlled_trajectory(&self, u: &ControlSequence) -> Result<Vec<State2>, ProblemError> {
        self.check_length(u)?;
        let mut trajectory = Vec::with_capacity(self.horizon + 1);
        trajectory.push(self.x0);
        let mut state = self.x0;
        for &uk in u.values() {
            state = self.controlled_step(state, uk)?;
            trajectory.push(state);
        }
        Ok(trajectory)
    }

    /// Targeting objective: Euclidean distance between the controlled
    /// trajectory endpoint and the target.
    pub fn evaluate(&self, u: &ControlSequence) -> Result<f64, ProblemError> {
        self.check_length(u)?;
        let terminal = self.terminal_state(u.values())?;
        Ok(terminal.distance(&self.target))
    }

    /// Search-facing objective: overflow maps to +∞ so greedy selection
    /// discards the candidate without aborting a run.
    pub fn objective(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.horizon);
        match self.terminal_state(u) {
            Ok(terminal) => terminal.distance(&self.target),
            Err(_) => f64::INFINITY,
        }
    }

    /// True iff the objective value beats the success threshold (strict).
    pub fn is_success(value: f64, epsilon: f64) -> bool {
        assert!(epsilon > 0.0, "epsilon must be positive");
        value < epsilon
    }

    fn check_length(&self, u: &ControlSequence) -> Result<(), ProblemError> {
        if u.len() != self.horizon {
            return Err(ProblemError::LengthMismatch {
                expected: self.horizon,
                got: u.len(),
            });
        }
        Ok(())
    }

    fn controlled_step(&self, state: State2, uk: f64) -> Result<State2, MapError> {
        let (f1, f2) = self.map.image(state);
        let next = State2::new(f1 + uk, f2);
        if next.is_finite() {
            Ok(next)
        } else {
            Err(MapError::Overflow)
        }
    }

    fn terminal_state(&self, u: &[f64]) -> Result<State2, MapError> {
        let mut state = self.x0;
        for &uk in u {
            state = self.controlled_step(state, uk)?;
        }
        Ok(state)
    }
}

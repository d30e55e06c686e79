//! Discrete chaotic maps: single-step updates, fixed points, and uncontrolled
//! iteration into a target neighborhood.
//!
//! The step kernels fix the floating-point operand order (64-bit binary, no
//! fused multiply-add). Long uncontrolled trajectories are chaotic, so the
//! first-hit iteration counts are reproducible only under this exact order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point in the two-dimensional state space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State2 {
    pub x1: f64,
    pub x2: f64,
}

impl State2 {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Euclidean distance, evaluated as `sqrt(dx*dx + dy*dy)`.
    pub fn distance(&self, other: &State2) -> f64 {
        let dx = self.x1 - other.x1;
        let dy = self.x2 - other.x2;
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    /// The trajectory escaped the attractor and produced a non-finite state.
    #[error("state escaped to a non-finite value")]
    Overflow,
    /// The quadratic for the fixed point has no usable real root.
    #[error("no real fixed point for p={p}, q={q}")]
    NoFixedPoint { p: f64, q: f64 },
    /// The target neighborhood was not entered within the iteration budget.
    #[error("target neighborhood not reached within {max_iter} iterations")]
    NotReached { max_iter: usize },
}

/// A named 2-D discrete chaotic map with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChaoticMap {
    Henon { p: f64, q: f64 },
    Ushio { alpha: f64, beta: f64 },
}

impl ChaoticMap {
    /// Classical Hénon parameters p = 1.4, q = 0.3.
    pub fn henon_default() -> Self {
        ChaoticMap::Henon { p: 1.4, q: 0.3 }
    }

    /// Ushio parameters alpha = 1.9, beta = 0.5.
    pub fn ushio_default() -> Self {
        ChaoticMap::Ushio {
            alpha: 1.9,
            beta: 0.5,
        }
    }

    /// Raw map image (f1(s), f2(s)) with the pinned operand order and no
    /// finiteness check. Controlled trajectories add the perturbation to the
    /// first component before checking.
    pub fn image(&self, s: State2) -> (f64, f64) {
        match *self {
            ChaoticMap::Henon { p, q } => henon_image(s, p, q),
            ChaoticMap::Ushio { alpha, beta } => ushio_image(s, alpha, beta),
        }
    }

    /// One uncontrolled step; errors if the new state is non-finite.
    pub fn step(&self, s: State2) -> Result<State2, MapError> {
        let (x1, x2) = self.image(s);
        let next = State2::new(x1, x2);
        if next.is_finite() {
            Ok(next)
        } else {
            Err(MapError::Overflow)
        }
    }
}

// x1' = (−(p·(x1·x1)) + x2) + 1, x2' = q·x1. The square is computed first and
// then scaled by p; hit counts over ~10^6 iterations depend on this order.
fn henon_image(s: State2, p: f64, q: f64) -> (f64, f64) {
    let x1 = (-(p * (s.x1 * s.x1)) + s.x2) + 1.0;
    let x2 = q * s.x1;
    (x1, x2)
}

// x1' = ((α·x1) − ((x1·x1)·x1)) + x2, x2' = β·x1.
fn ushio_image(s: State2, alpha: f64, beta: f64) -> (f64, f64) {
    let x1 = (alpha * s.x1 - (s.x1 * s.x1) * s.x1) + s.x2;
    let x2 = beta * s.x1;
    (x1, x2)
}

/// One Hénon step: (−p·x1² + x2 + 1, q·x1).
pub fn henon_step(s: State2, p: f64, q: f64) -> Result<State2, MapError> {
    ChaoticMap::Henon { p, q }.step(s)
}

/// One Ushio step: (α·x1 − x1³ + x2, β·x1).
pub fn ushio_step(s: State2, alpha: f64, beta: f64) -> Result<State2, MapError> {
    ChaoticMap::Ushio { alpha, beta }.step(s)
}

/// Positive-branch fixed point of the Hénon map: the root of
/// p·x² + (1−q)·x − 1 = 0 with the larger value, paired with q·x.
pub fn henon_fixed_point(p: f64, q: f64) -> Result<State2, MapError> {
    let no_fixed_point = MapError::NoFixedPoint { p, q };
    if p == 0.0 {
        return Err(no_fixed_point);
    }
    let one_minus_q = 1.0 - q;
    let discriminant = one_minus_q * one_minus_q + 4.0 * p;
    if discriminant.is_nan() || discriminant < 0.0 {
        return Err(no_fixed_point);
    }
    let x = (-one_minus_q + discriminant.sqrt()) / (2.0 * p);
    let fp = State2::new(x, q * x);
    if fp.is_finite() {
        Ok(fp)
    } else {
        Err(no_fixed_point)
    }
}

/// Smallest k ≥ 1 with ||x(k) − target|| < epsilon under pure iteration
/// x(k+1) = f(x(k)) from x0.
pub fn iterate_uncontrolled(
    map: ChaoticMap,
    x0: State2,
    target: State2,
    epsilon: f64,
    max_iter: usize,
) -> Result<usize, MapError> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    assert!(max_iter >= 1, "max_iter must be at least 1");
    let mut state = x0;
    for k in 1..=max_iter {
        state = map.step(state)?;
        if state.distance(&target) < epsilon {
            return Ok(k);
        }
    }
    Err(MapError::NotReached { max_iter })
}

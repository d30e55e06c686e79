//! Batch experiment runner: seeded independent runs, aggregate statistics,
//! success metrics, parameter sweeps, and mean convergence curves.
//!
//! Runs execute in parallel (rayon) but are aggregated in run-index order, so
//! the output is independent of scheduling. Every run's seed derives from the
//! batch seed through [`crate::seed`], and every sweep cell's seed derives
//! from its (N, μ, ε) key, so adding cells never perturbs existing results.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{iterate_uncontrolled, ChaoticMap, MapError, State2};
use crate::problem::{ProblemError, TargetingProblem};
use crate::seed::{cell_seed, run_seed};
use crate::tlbo::{optimize, RunRecord, TlboConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("mean curve needs at least one run record")]
    NoRecords,
    #[error("run records disagree on generation count: {0} vs {1}")]
    CurveLengthMismatch(usize, usize),
}

/// Final-objective statistics over a batch of runs. `std` uses the population
/// formula (divide by n); runs whose objective overflowed to +∞ stay in
/// `n_runs` but are excluded from best/worst/mean/std and counted in
/// `n_overflowed`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub std: f64,
    pub n_runs: usize,
    pub n_overflowed: usize,
}

/// Success ratio and mean first-success generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessMetrics {
    pub sr_percent: f64,
    pub aven: Option<f64>,
    pub n_success: usize,
}

/// One aggregated result cell of a parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_steps: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub stats: BatchStats,
    pub metrics: SuccessMetrics,
    pub cell_seed: u64,
}

/// One point of a mean convergence curve; generations are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub generation: usize,
    pub mean_best_fitness: f64,
}

/// Uncontrolled-iteration table row; `needed` is absent when the neighborhood
/// was not entered within the budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub epsilon: f64,
    pub needed: Option<usize>,
}

fn batch_stats(final_values: &[f64]) -> BatchStats {
    let n_runs = final_values.len();
    let finite: Vec<f64> = final_values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let n_overflowed = n_runs - finite.len();
    if finite.is_empty() {
        return BatchStats {
            best: f64::INFINITY,
            worst: f64::INFINITY,
            mean: f64::INFINITY,
            std: 0.0,
            n_runs,
            n_overflowed,
        };
    }
    let best = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = finite.len() as f64;
    let mean = finite.iter().sum::<f64>() / n;
    let variance = finite.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    BatchStats {
        best,
        worst,
        mean,
        std: variance.sqrt(),
        n_runs,
        n_overflowed,
    }
}

fn success_metrics(records: &[RunRecord], n_runs: usize) -> SuccessMetrics {
    let successes: Vec<usize> = records
        .iter()
        .filter_map(|r| r.success_generation)
        .collect();
    let n_success = successes.len();
    let aven = if n_success > 0 {
        Some(successes.iter().sum::<usize>() as f64 / n_success as f64)
    } else {
        None
    };
    SuccessMetrics {
        sr_percent: 100.0 * n_success as f64 / n_runs as f64,
        aven,
        n_success,
    }
}

/// Executes `n_runs` independent searches with per-run derived seeds and
/// aggregates the final objective values and success metrics. The seed field
/// of `cfg` is ignored; run i uses `seed::run_seed(batch_seed, i)`.
pub fn run_batch(
    problem: &TargetingProblem,
    cfg: &TlboConfig,
    n_runs: usize,
    batch_seed: u64,
) -> (BatchStats, SuccessMetrics, Vec<RunRecord>) {
    assert!(n_runs >= 1, "n_runs must be at least 1");
    let records: Vec<RunRecord> = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let run_cfg = TlboConfig {
                seed: run_seed(batch_seed, i as u64),
                ..*cfg
            };
            optimize(problem, &run_cfg)
        })
        .collect();
    let finals: Vec<f64> = records.iter().map(|r| r.best_fitness).collect();
    let stats = batch_stats(&finals);
    let metrics = success_metrics(&records, n_runs);
    (stats, metrics, records)
}

/// Ordered unique cells of the (N, μ, ε) grid: N ascending, then μ, then ε.
pub fn sweep_grid(
    n_values: &[usize],
    mu_values: &[f64],
    eps_values: &[f64],
) -> Vec<(usize, f64, f64)> {
    let mut n_values = n_values.to_vec();
    n_values.sort_unstable();
    n_values.dedup();
    let mut mu_values = mu_values.to_vec();
    mu_values.sort_by(f64::total_cmp);
    mu_values.dedup();
    let mut eps_values = eps_values.to_vec();
    eps_values.sort_by(f64::total_cmp);
    eps_values.dedup();

    let mut cells = Vec::with_capacity(n_values.len() * mu_values.len() * eps_values.len());
    for &n_steps in &n_values {
        for &mu in &mu_values {
            for &epsilon in &eps_values {
                cells.push((n_steps, mu, epsilon));
            }
        }
    }
    cells
}

/// Runs one batch per cell of the (N, μ, ε) grid. Rows are ordered N
/// ascending, then μ, then ε; duplicate values are collapsed.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    base: &TargetingProblem,
    cfg: &TlboConfig,
    n_values: &[usize],
    mu_values: &[f64],
    eps_values: &[f64],
    n_runs: usize,
    batch_seed: u64,
) -> Result<Vec<SweepRow>, ProblemError> {
    let cells = sweep_grid(n_values, mu_values, eps_values);
    let mut rows = Vec::with_capacity(cells.len());
    for (n_steps, mu, epsilon) in cells {
        let problem = TargetingProblem::new(base.map, base.x0, base.target, n_steps, mu, epsilon)?;
        let seed = cell_seed(batch_seed, n_steps, mu, epsilon);
        let (stats, metrics, _) = run_batch(&problem, cfg, n_runs, seed);
        rows.push(SweepRow {
            n_steps,
            mu,
            epsilon,
            stats,
            metrics,
            cell_seed: seed,
        });
    }
    Ok(rows)
}

/// Per-generation arithmetic mean of the best-fitness curves across records.
pub fn mean_curve(records: &[RunRecord]) -> Result<Vec<CurvePoint>, HarnessError> {
    let first = records.first().ok_or(HarnessError::NoRecords)?;
    let generations = first.best_fitness_per_generation.len();
    for record in records {
        let len = record.best_fitness_per_generation.len();
        if len != generations {
            return Err(HarnessError::CurveLengthMismatch(generations, len));
        }
    }
    let n = records.len() as f64;
    let mut curve = Vec::with_capacity(generations);
    for g in 0..generations {
        let sum: f64 = records
            .iter()
            .map(|r| r.best_fitness_per_generation[g])
            .sum();
        curve.push(CurvePoint {
            generation: g + 1,
            mean_best_fitness: sum / n,
        });
    }
    Ok(curve)
}

/// Uncontrolled first-hit iteration counts, one row per epsilon. Overflow of
/// the trajectory aborts; exhausting the budget yields `needed: None`.
pub fn uncontrolled_baseline(
    map: ChaoticMap,
    x0: State2,
    target: State2,
    eps_values: &[f64],
    max_iter: usize,
) -> Result<Vec<BaselineRow>, MapError> {
    let mut rows = Vec::with_capacity(eps_values.len());
    for &epsilon in eps_values {
        let needed = match iterate_uncontrolled(map, x0, target, epsilon, max_iter) {
            Ok(k) => Some(k),
            Err(MapError::NotReached { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push(BaselineRow { epsilon, needed });
    }
    Ok(rows)
}

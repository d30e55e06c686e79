//! CSV and JSON writers for experiment results.
//!
//! CSV uses `.` for decimals, `,` as delimiter, a header row, and LF line
//! endings. Floats are written with Rust's shortest round-trip formatting, so
//! every value re-parses to the identical bits. Missing values print as `NA`.

use std::io::Write;

use chaos_target::harness::{BaselineRow, CurvePoint, SweepRow};
use chaos_target::seed::run_seed;
use chaos_target::tlbo::RunRecord;

use crate::CliError;

pub const ROW_HEADER: &str = "n_steps,mu,epsilon,best,worst,mean,std,sr_percent,aven,n_runs,seed";
pub const PER_RUN_HEADER: &str =
    "n_steps,mu,epsilon,run_index,seed,best_fitness,success_generation";
pub const CURVE_HEADER: &str = "generation,mean_best_fitness";
pub const BASELINE_HEADER: &str = "epsilon,needed_iterations";

fn io_error(e: std::io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

pub fn write_rows_csv(out: &mut dyn Write, rows: &[SweepRow]) -> Result<(), CliError> {
    writeln!(out, "{ROW_HEADER}").map_err(io_error)?;
    for row in rows {
        let aven = match row.metrics.aven {
            Some(v) => v.to_string(),
            None => "NA".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.n_steps,
            row.mu,
            row.epsilon,
            row.stats.best,
            row.stats.worst,
            row.stats.mean,
            row.stats.std,
            row.metrics.sr_percent,
            aven,
            row.stats.n_runs,
            row.cell_seed,
        )
        .map_err(io_error)?;
    }
    Ok(())
}

pub fn write_rows_json(out: &mut dyn Write, rows: &[SweepRow]) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, rows)
        .map_err(|e| CliError::Runtime(format!("JSON encoding failed: {e}")))?;
    writeln!(out).map_err(io_error)
}

pub fn write_per_run_csv(
    out: &mut dyn Write,
    cells: &[(usize, f64, f64, u64, Vec<RunRecord>)],
) -> Result<(), CliError> {
    writeln!(out, "{PER_RUN_HEADER}").map_err(io_error)?;
    for (n_steps, mu, epsilon, cell_seed, records) in cells {
        for (run_index, record) in records.iter().enumerate() {
            let success = match record.success_generation {
                Some(g) => g.to_string(),
                None => "NA".to_string(),
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                n_steps,
                mu,
                epsilon,
                run_index,
                run_seed(*cell_seed, run_index as u64),
                record.best_fitness,
                success,
            )
            .map_err(io_error)?;
        }
    }
    Ok(())
}

pub fn write_curve_csv(out: &mut dyn Write, curve: &[CurvePoint]) -> Result<(), CliError> {
    writeln!(out, "{CURVE_HEADER}").map_err(io_error)?;
    for point in curve {
        writeln!(out, "{},{}", point.generation, point.mean_best_fitness).map_err(io_error)?;
    }
    Ok(())
}

pub fn write_baseline_csv(out: &mut dyn Write, rows: &[BaselineRow]) -> Result<(), CliError> {
    writeln!(out, "{BASELINE_HEADER}").map_err(io_error)?;
    for row in rows {
        let needed = match row.needed {
            Some(k) => k.to_string(),
            None => "NA".to_string(),
        };
        writeln!(out, "{},{}", row.epsilon, needed).map_err(io_error)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chaos_target::harness::{BatchStats, SuccessMetrics};

    fn sample_row() -> SweepRow {
        SweepRow {
            n_steps: 8,
            mu: 0.01,
            epsilon: 0.001,
            stats: BatchStats {
                best: 0.0001,
                worst: 0.25,
                mean: 0.125,
                std: 0.05,
                n_runs: 4,
                n_overflowed: 0,
            },
            metrics: SuccessMetrics {
                sr_percent: 50.0,
                aven: None,
                n_success: 2,
            },
            cell_seed: 99,
        }
    }

    #[test]
    fn csv_shape_and_na() {
        let mut buffer = Vec::new();
        write_rows_csv(&mut buffer, &[sample_row()]).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), ROW_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "8,0.01,0.001,0.0001,0.25,0.125,0.05,50,NA,4,99"
        );
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_round_trips_exactly() {
        let rows = vec![sample_row()];
        let mut buffer = Vec::new();
        write_rows_json(&mut buffer, &rows).unwrap();
        let parsed: Vec<SweepRow> = serde_json::from_slice(&buffer).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn floats_print_shortest_round_trip() {
        let mut buffer = Vec::new();
        write_baseline_csv(
            &mut buffer,
            &[BaselineRow {
                epsilon: 0.00001,
                needed: None,
            }],
        )
        .unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let value_line = text.lines().nth(1).unwrap();
        let (eps_text, needed) = value_line.split_once(',').unwrap();
        assert_eq!(eps_text.parse::<f64>().unwrap(), 0.00001);
        assert_eq!(needed, "NA");
    }
}

//! Command-line driver for chaotic orbit targeting experiments.
//!
//! Subcommands: `fixed-point`, `uncontrolled`, `batch`, `sweep`, `curves`.
//! Exit codes: 0 success, 2 usage or config error, 3 runtime numeric error.

mod config;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chaos_target::harness::{mean_curve, run_batch, sweep_grid, uncontrolled_baseline, SweepRow};
use chaos_target::maps::{henon_fixed_point, ChaoticMap, State2};
use chaos_target::problem::TargetingProblem;
use chaos_target::seed::cell_seed;
use chaos_target::tlbo::{RunRecord, TlboConfig};

use config::{load_config, ExperimentConfig, OutputFormat};

const SEED_ENV: &str = "CHAOS_TARGET_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config: exit code 2.
    Usage(String),
    /// Numeric failure at runtime: exit code 3.
    Runtime(String),
}

#[derive(Parser)]
#[command(
    name = "chaos-target",
    version,
    about = "Direct orbits of discrete chaotic maps with TLBO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the positive-branch fixed point of the Hénon map and its residual
    FixedPoint {
        #[arg(long, default_value_t = 1.4, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        q: f64,
    },
    /// Iterate the uncontrolled map until each epsilon neighborhood is entered
    Uncontrolled {
        /// Map kind: henon or ushio
        #[arg(long, value_enum, default_value_t = MapKind::Henon)]
        map: MapKind,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Initial state "x1,x2"
        #[arg(long, default_value = "0,0", value_parser = parse_state_arg, allow_hyphen_values = true)]
        x0: State2,
        /// Target state "x1,x2" or the token fixed-point
        #[arg(long, default_value = "fixed-point")]
        target: String,
        /// Neighborhood radius; repeatable
        #[arg(long = "eps", required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 10_000_000)]
        max_iter: usize,
        /// Output path (defaults to stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded batches for every (N, mu, epsilon) cell of a config file
    Batch {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Like batch, with optional grid overrides from the command line
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Override the config horizon list, e.g. 6,7,8
        #[arg(long = "n-steps", value_delimiter = ',')]
        n_steps: Option<Vec<usize>>,
        /// Override the config mu list
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        /// Override the config epsilon list
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Emit per-generation mean convergence curves, one CSV per (N, mu) cell
    Curves {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the curve files
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Henon,
    Ushio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file
    #[arg(long)]
    config: PathBuf,
    /// Output path (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format override
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Seed override; beats the CHAOS_TARGET_SEED env var and the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel runs (defaults to all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write one CSV row per individual run to this path
    #[arg(long)]
    per_run: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::FixedPoint { p, q } => cmd_fixed_point(p, q),
        Command::Uncontrolled {
            map,
            p,
            q,
            alpha,
            beta,
            x0,
            target,
            eps,
            max_iter,
            out,
        } => cmd_uncontrolled(
            map,
            p,
            q,
            alpha,
            beta,
            x0,
            &target,
            &eps,
            max_iter,
            out.as_deref(),
        ),
        Command::Batch { run } => cmd_batch(run, None, None, None),
        Command::Sweep {
            run,
            n_steps,
            mu,
            eps,
        } => cmd_batch(run, n_steps, mu, eps),
        Command::Curves {
            config,
            out,
            seed,
            jobs,
        } => cmd_curves(&config, &out, seed, jobs),
    }
}

fn cmd_fixed_point(p: f64, q: f64) -> Result<(), CliError> {
    let fp = henon_fixed_point(p, q).map_err(|e| CliError::Usage(e.to_string()))?;
    let next = ChaoticMap::Henon { p, q }
        .step(fp)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{} {}", fp.x1, fp.x2);
    println!("residual {:e}", next.distance(&fp));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_uncontrolled(
    kind: MapKind,
    p: Option<f64>,
    q: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    x0: State2,
    target: &str,
    eps: &[f64],
    max_iter: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let map = build_map(kind, p, q, alpha, beta)?;
    let target = resolve_target_arg(target, map)?;
    if eps.iter().any(|&e| !e.is_finite() || e <= 0.0) {
        return Err(CliError::Usage("eps values must be positive".into()));
    }
    if max_iter < 1 {
        return Err(CliError::Usage("max-iter must be at least 1".into()));
    }
    let rows = uncontrolled_baseline(map, x0, target, eps, max_iter)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    with_output(out, |w| output::write_baseline_csv(w, &rows))
}

fn cmd_batch(
    run: RunArgs,
    n_override: Option<Vec<usize>>,
    mu_override: Option<Vec<f64>>,
    eps_override: Option<Vec<f64>>,
) -> Result<(), CliError> {
    configure_jobs(run.jobs)?;
    let mut config = load_config(&run.config)?;
    if let Some(n) = n_override {
        config.horizons = n;
    }
    if let Some(mu) = mu_override {
        config.mu_values = mu;
    }
    if let Some(eps) = eps_override {
        config.eps_values = eps;
    }
    validate_grid(&config)?;
    let seed = resolve_seed(run.seed, config.seed)?;
    let rows = run_grid(&config, seed, run.per_run.as_deref())?;
    let format = match run.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => config.format,
    };
    with_output(run.out.as_deref(), |w| match format {
        OutputFormat::Csv => output::write_rows_csv(w, &rows),
        OutputFormat::Json => output::write_rows_json(w, &rows),
    })
}

fn cmd_curves(
    config_path: &Path,
    out_dir: &Path,
    seed_flag: Option<u64>,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    configure_jobs(jobs)?;
    let config = load_config(config_path)?;
    let seed = resolve_seed(seed_flag, config.seed)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let tlbo_cfg = tlbo_config(&config)?;
    // Curves do not depend on epsilon (no early stopping); the first value
    // keys the seed derivation so cells match the corresponding batch cells.
    let epsilon = config.eps_values[0];
    for (n_steps, mu, epsilon) in sweep_grid(&config.horizons, &config.mu_values, &[epsilon]) {
        let problem = build_problem(&config, n_steps, mu, epsilon)?;
        let seed = cell_seed(seed, n_steps, mu, epsilon);
        let (_, _, records) = run_batch(&problem, &tlbo_cfg, config.n_runs, seed);
        let curve = mean_curve(&records).map_err(|e| CliError::Runtime(e.to_string()))?;
        let path = out_dir.join(format!("curve_n{n_steps}_mu{mu}.csv"));
        let file = File::create(&path)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = BufWriter::new(file);
        output::write_curve_csv(&mut writer, &curve)?;
        writer
            .flush()
            .map_err(|e| CliError::Runtime(format!("write failed: {e}")))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run_grid(
    config: &ExperimentConfig,
    seed: u64,
    per_run: Option<&Path>,
) -> Result<Vec<SweepRow>, CliError> {
    let tlbo_cfg = tlbo_config(config)?;
    let cells = sweep_grid(&config.horizons, &config.mu_values, &config.eps_values);
    let mut rows = Vec::with_capacity(cells.len());
    let mut dump: Vec<(usize, f64, f64, u64, Vec<RunRecord>)> = Vec::new();
    for (n_steps, mu, epsilon) in cells {
        let problem = build_problem(config, n_steps, mu, epsilon)?;
        let seed = cell_seed(seed, n_steps, mu, epsilon);
        let (stats, metrics, records) = run_batch(&problem, &tlbo_cfg, config.n_runs, seed);
        rows.push(SweepRow {
            n_steps,
            mu,
            epsilon,
            stats,
            metrics,
            cell_seed: seed,
        });
        if per_run.is_some() {
            dump.push((n_steps, mu, epsilon, seed, records));
        }
    }
    if let Some(path) = per_run {
        let file = File::create(path)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = BufWriter::new(file);
        output::write_per_run_csv(&mut writer, &dump)?;
        writer
            .flush()
            .map_err(|e| CliError::Runtime(format!("write failed: {e}")))?;
    }
    Ok(rows)
}

fn tlbo_config(config: &ExperimentConfig) -> Result<TlboConfig, CliError> {
    TlboConfig::new(config.population_size, config.max_generations, 0)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn build_problem(
    config: &ExperimentConfig,
    n_steps: usize,
    mu: f64,
    epsilon: f64,
) -> Result<TargetingProblem, CliError> {
    TargetingProblem::new(config.map, config.x0, config.target, n_steps, mu, epsilon)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn validate_grid(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.horizons.is_empty() || config.mu_values.is_empty() || config.eps_values.is_empty() {
        return Err(CliError::Usage(
            "horizon, mu and epsilon lists must be non-empty".into(),
        ));
    }
    if config.horizons.iter().any(|&n| n < 1) {
        return Err(CliError::Usage("horizon values must be at least 1".into()));
    }
    if config
        .mu_values
        .iter()
        .chain(&config.eps_values)
        .any(|&v| !v.is_finite() || v <= 0.0)
    {
        return Err(CliError::Usage(
            "mu and epsilon values must be positive finite reals".into(),
        ));
    }
    Ok(())
}

fn build_map(
    kind: MapKind,
    p: Option<f64>,
    q: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Result<ChaoticMap, CliError> {
    match kind {
        MapKind::Henon => {
            if alpha.is_some() || beta.is_some() {
                return Err(CliError::Usage(
                    "--alpha/--beta do not apply to --map henon".into(),
                ));
            }
            Ok(ChaoticMap::Henon {
                p: p.unwrap_or(1.4),
                q: q.unwrap_or(0.3),
            })
        }
        MapKind::Ushio => {
            if p.is_some() || q.is_some() {
                return Err(CliError::Usage(
                    "--p/--q do not apply to --map ushio".into(),
                ));
            }
            Ok(ChaoticMap::Ushio {
                alpha: alpha.unwrap_or(1.9),
                beta: beta.unwrap_or(0.5),
            })
        }
    }
}

fn resolve_target_arg(target: &str, map: ChaoticMap) -> Result<State2, CliError> {
    if target.eq_ignore_ascii_case("fixed-point") {
        match map {
            ChaoticMap::Henon { p, q } => {
                henon_fixed_point(p, q).map_err(|e| CliError::Usage(e.to_string()))
            }
            ChaoticMap::Ushio { .. } => Err(CliError::Usage(
                "the fixed-point target token is only defined for --map henon".into(),
            )),
        }
    } else {
        parse_state_arg(target).map_err(CliError::Usage)
    }
}

fn parse_state_arg(text: &str) -> Result<State2, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("`{text}` is not a pair \"x1,x2\""));
    }
    let x1 = parts[0]
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", parts[0]))?;
    let x2 = parts[1]
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", parts[1]))?;
    Ok(State2::new(x1, x2))
}

fn resolve_seed(flag: Option<u64>, config_seed: u64) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{text}` is not a 64-bit seed"))),
        Err(_) => Ok(config_seed),
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    let Some(jobs) = jobs else { return Ok(()) };
    if jobs < 1 {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("cannot configure thread pool: {e}")))
}

fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
            let mut writer = BufWriter::new(file);
            write(&mut writer)?;
            writer
                .flush()
                .map_err(|e| CliError::Runtime(format!("write failed: {e}")))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgspectral::harness::config::{parse_list, parse_override, parse_pairs};
use kgspectral::harness::csv::{order_csv, parse_sweep_csv, sweep_csv};
use kgspectral::harness::{
    emit_exact, orders_from_sweep, run_single, run_sweep, write_run, HarnessError, RunConfig,
    Simulation, SweepConfig,
};
use kgspectral::parallel::Execution;

const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

/// Fourier-spectral Klein-Gordon / sine-Gordon solver and benchmark harness
#[derive(Parser, Debug)]
#[command(name = "kgspectral", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve one configuration and write snapshots and error tables
    Run {
        /// key=value configuration file
        #[arg(long)]
        config: PathBuf,
        /// Override a configuration key (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run every (N, dt) cell of a sweep and write the sweep table
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Sweep CSV path (default: <output>/sweep.csv from the config)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run cells one after another even when built with rayon
        #[arg(long)]
        sequential: bool,
    },
    /// Export an exact solution on the collocation grid
    Exact {
        /// linear-kg or sine-gordon
        #[arg(long)]
        problem: String,
        /// Comma-separated times, e.g. 0,0.5,1
        #[arg(long = "t", value_name = "LIST")]
        times: String,
        #[arg(long = "n", default_value_t = 32)]
        modes: usize,
        #[arg(long = "j")]
        points: Option<usize>,
        #[arg(long)]
        length: Option<f64>,
        /// Output file (default: stdout)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Observed convergence orders from a sweep table
    Order {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    NonConvergence(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn read_pairs(path: &Path, overrides: &[String]) -> Result<Vec<(String, String)>, Failure> {
    // an unreadable config file is a usage problem, not a solver one
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut pairs = parse_pairs(&text)?;
    for o in overrides {
        pairs.push(parse_override(o)?);
    }
    Ok(pairs)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            fs::write(p, text).map_err(io_err(p))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(config: &Path, overrides: &[String]) -> Result<(), Failure> {
    let cfg = RunConfig::from_pairs(&read_pairs(config, overrides)?)?;
    let art = run_single(&cfg)?;
    write_run(&art, &cfg.output)?;
    match &art.failure {
        None => {
            eprintln!(
                "{} steps, max {} sweeps/step, {} snapshots written to {}",
                art.steps_taken,
                art.max_iterations,
                art.snapshots.len(),
                cfg.output.display()
            );
            for e in &art.errors {
                eprintln!(
                    "t={} error_u={:e} error_v={:e}",
                    e.time, e.error_u, e.error_v
                );
            }
            Ok(())
        }
        Some(f) => Err(Failure::NonConvergence(format!(
            "solver did not converge: N={} dt={} step_index={} t={}: {}",
            f.modes, f.dt, f.step_index, f.time, f.message
        ))),
    }
}

fn cmd_sweep(
    config: &Path,
    overrides: &[String],
    output: Option<PathBuf>,
    sequential: bool,
) -> Result<(), Failure> {
    let cfg = SweepConfig::from_pairs(&read_pairs(config, overrides)?)?;
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let rows = run_sweep(&cfg, exec)?;
    let path = output.unwrap_or_else(|| cfg.base.output.join("sweep.csv"));
    emit(&sweep_csv(&rows), Some(&path))?;
    let failed = rows.iter().filter(|r| !r.converged).count();
    eprintln!(
        "{} cells ({failed} not converged) written to {}",
        rows.len(),
        path.display()
    );
    Ok(())
}

fn cmd_exact(
    problem: &str,
    times: &str,
    modes: usize,
    points: Option<usize>,
    length: Option<f64>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let times = parse_list(times).map_err(|m| Failure::Usage(format!("--t: {m}")))?;
    let cfg = RunConfig {
        problem: problem.to_string(),
        modes,
        points,
        length,
        ..RunConfig::default()
    };
    let sim = Simulation::from_config(&cfg)?;
    emit(&emit_exact(&sim.problem, &sim.grid, &times)?, output)
}

fn cmd_order(input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let text = fs::read_to_string(input)
        .map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let rows = parse_sweep_csv(&text)?;
    emit(&order_csv(&orders_from_sweep(&rows)), output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, overrides } => cmd_run(&config, &overrides),
        Command::Sweep {
            config,
            overrides,
            output,
            sequential,
        } => cmd_sweep(&config, &overrides, output, sequential),
        Command::Exact {
            problem,
            times,
            modes,
            points,
            length,
            output,
        } => cmd_exact(&problem, &times, modes, points, length, output.as_deref()),
        Command::Order { input, output } => cmd_order(&input, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::NonConvergence(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NONCONVERGENCE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}

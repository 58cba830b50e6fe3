use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use opgg_cli::config::Mode;
use opgg_cli::presets::{preset, PRESET_NAMES};
use opgg_cli::{run_compare, run_optimize, run_simulate, run_sweep};
use opgg_cli::{RunSummary, ScenarioConfig, SolverKind};

/// Optional public goods game with fractional punishment: replicator
/// simulation, optimal punishment schedules, and constant-control baselines.
#[derive(Parser)]
#[command(name = "opgg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the dynamics under a fixed punishment level.
    Simulate(RunArgs),
    /// Solve for the punishment schedule minimizing the quadratic cost.
    Optimize(RunArgs),
    /// Evaluate every constant punishment level on a lattice.
    Sweep(RunArgs),
    /// Compare full, best-constant, and optimal punishment head to head.
    Compare(RunArgs),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Simulate(_) => Mode::Simulate,
            Command::Optimize(_) => Mode::Optimize,
            Command::Sweep(_) => Mode::Sweep,
            Command::Compare(_) => Mode::Compare,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Simulate(a)
            | Command::Optimize(a)
            | Command::Sweep(a)
            | Command::Compare(a) => a,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Path to a JSON scenario config.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Name of a built-in scenario (fig1..fig9, a4only, table1).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Directory for the output files; created if missing.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Iterative solver for optimize and compare.
    #[arg(long, value_enum, default_value_t = SolverKind::Fbsm)]
    solver: SolverKind,
}

fn load_scenario(source: &Source) -> anyhow::Result<(ScenarioConfig, Option<String>)> {
    if let Some(name) = &source.preset {
        let config = preset(name).with_context(|| {
            format!(
                "unknown preset `{name}`; available: {}",
                PRESET_NAMES.join(", ")
            )
        })?;
        return Ok((config, Some(name.clone())));
    }
    let path = source.config.as_ref().expect("clap enforces the group");
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config = ScenarioConfig::from_json(&text)
        .with_context(|| format!("invalid config {}", path.display()))?;
    Ok((config, None))
}

fn describe(summary: &RunSummary, preset_name: Option<&str>, out: &Path) {
    if let Some(name) = preset_name {
        println!("scenario: preset {name}");
    }
    match summary.mode {
        Mode::Simulate => {
            println!(
                "simulated {} steps: J = {:.6}, final distance to target = {:.6}",
                summary.scenario.grid.steps, summary.breakdown.total, summary.final_state_error
            );
        }
        Mode::Optimize => {
            println!(
                "{} {} after {} iterations: J = {:.6} (terminal {:.3e}, tracking {:.3e}, effort {:.3e}, punishment {:.3e})",
                summary.solver.expect("optimize sets solver"),
                if summary.converged { "converged" } else { "stopped" },
                summary.iterations.unwrap_or(0),
                summary.breakdown.total,
                summary.breakdown.terminal,
                summary.breakdown.tracking,
                summary.breakdown.effort,
                summary.breakdown.punished,
            );
        }
        Mode::Sweep => {
            let sweep = summary.sweep.as_ref().expect("sweep mode fills sweep");
            println!(
                "swept {} constant levels: best v = {:.4} with J = {:.6}",
                sweep.points, sweep.v_best, sweep.j_best
            );
        }
        Mode::Compare => {
            for row in summary.comparison.as_deref().unwrap_or_default() {
                println!(
                    "{:>13}: J = {:.6}, punished integral = {:.4}, wall time = {:.3}s",
                    row.strategy, row.j, row.punished_integral, row.wall_time_s
                );
            }
        }
    }
    println!("wrote {} to {}", summary.files.join(", "), out.display());
}

fn run(cli: &Cli) -> anyhow::Result<RunSummary> {
    let mode = cli.command.mode();
    let args = cli.command.args();
    let (config, preset_name) = load_scenario(&args.source)?;
    if config.mode != mode {
        bail!(
            "config declares mode `{}`; run it with the `{}` subcommand",
            config.mode,
            config.mode
        );
    }
    let summary = match mode {
        Mode::Simulate => run_simulate(&config, &args.out)?,
        Mode::Optimize => run_optimize(&config, args.solver, &args.out)?,
        Mode::Sweep => run_sweep(&config, &args.out)?,
        Mode::Compare => run_compare(&config, args.solver, &args.out)?,
    };
    describe(&summary, preset_name.as_deref(), &args.out);
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) if summary.converged => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("solver stopped before meeting its tolerances; outputs were kept");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

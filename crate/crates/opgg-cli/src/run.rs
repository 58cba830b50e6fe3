//! One entry point per mode. Each run writes its files into the output
//! directory and returns the summary that was also stored as `summary.json`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use opgg_core::{
    constant_sweep, evaluate_cost, fbsm_solve, integrate_forward, projected_gradient_solve,
    ControlTrajectory, CostBreakdown, SolveReport, StateTrajectory,
};

use crate::config::{Mode, ScenarioConfig};
use crate::output;

/// Iterative scheme used for the optimize and compare modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Forward-backward sweep with relaxed control updates.
    Fbsm,
    /// Projected gradient descent with an exact discrete gradient.
    Pgd,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverKind::Fbsm => write!(f, "fbsm"),
            SolverKind::Pgd => write!(f, "pgd"),
        }
    }
}

/// Best constant control found by a sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    pub v_best: f64,
    pub j_best: f64,
}

/// One strategy in a compare run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareRow {
    pub strategy: String,
    pub j: f64,
    pub punished_integral: f64,
    pub wall_time_s: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

/// Machine-readable record of a run, written as `summary.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverKind>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Cost of the headline trajectory (the optimal one in compare mode).
    pub breakdown: CostBreakdown,
    /// Integral of `y v` along the headline trajectory.
    pub punished_integral: f64,
    /// Distance from the cost target at the first and last node.
    pub initial_state_error: f64,
    pub final_state_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Vec<CompareRow>>,
    /// Files written by the run, relative to the output directory.
    pub files: Vec<String>,
    /// The scenario exactly as solved, re-usable as a config file.
    pub scenario: ScenarioConfig,
}

fn ensure_mode(config: &ScenarioConfig, wanted: Mode) -> anyhow::Result<()> {
    config.validate()?;
    if config.mode != wanted {
        bail!(
            "config declares mode `{}` but `{wanted}` was requested",
            config.mode
        );
    }
    Ok(())
}

fn prepare_out(out: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))
}

fn state_errors(states: &StateTrajectory, config: &ScenarioConfig) -> (f64, f64) {
    let target = config.weights.w_star;
    (
        states.state(0).distance(&target),
        states.final_state().distance(&target),
    )
}

struct FileSet<'a> {
    out: &'a Path,
    written: Vec<String>,
}

impl<'a> FileSet<'a> {
    fn new(out: &'a Path) -> Self {
        FileSet {
            out,
            written: Vec::new(),
        }
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.out.join(name)
    }
}

fn write_trajectory_files(files: &mut FileSet<'_>, states: &StateTrajectory) -> anyhow::Result<()> {
    output::write_trajectory_csv(&files.path("trajectory.csv"), states)?;
    output::write_ternary_csv(&files.path("ternary.csv"), states)
}

/// Integrates the scenario under its fixed `constant_v` control.
pub fn run_simulate(config: &ScenarioConfig, out: &Path) -> anyhow::Result<RunSummary> {
    ensure_mode(config, Mode::Simulate)?;
    prepare_out(out)?;

    let v = config.constant_v.expect("validate checked constant_v");
    let control = ControlTrajectory::constant(config.grid, v)?;
    let states = integrate_forward(&config.w0, &control, &config.params)?;
    let breakdown = evaluate_cost(&states, &control, &config.weights)?;
    let (initial_state_error, final_state_error) = state_errors(&states, config);

    let mut files = FileSet::new(out);
    write_trajectory_files(&mut files, &states)?;

    let summary_path = files.path("summary.json");
    let summary = RunSummary {
        mode: Mode::Simulate,
        solver: None,
        converged: true,
        iterations: None,
        breakdown,
        punished_integral: breakdown.punished_integral,
        initial_state_error,
        final_state_error,
        sweep: None,
        comparison: None,
        files: files.written,
        scenario: config.clone(),
    };
    output::write_json(&summary_path, &summary)?;
    Ok(summary)
}

fn solve(config: &ScenarioConfig, kind: SolverKind) -> anyhow::Result<SolveReport> {
    let report = match kind {
        SolverKind::Fbsm => fbsm_solve(
            &config.w0,
            &config.grid,
            &config.weights,
            &config.params,
            &config.solver,
        )?,
        SolverKind::Pgd => projected_gradient_solve(
            &config.w0,
            &config.grid,
            &config.weights,
            &config.params,
            &config.solver,
        )?,
    };
    Ok(report)
}

/// Solves for the optimal control schedule. Files are written even when the
/// solver stops at the iteration cap, so partial results stay inspectable;
/// the summary records `converged: false` in that case.
pub fn run_optimize(
    config: &ScenarioConfig,
    kind: SolverKind,
    out: &Path,
) -> anyhow::Result<RunSummary> {
    ensure_mode(config, Mode::Optimize)?;
    prepare_out(out)?;

    let report = solve(config, kind)?;
    let (initial_state_error, final_state_error) = state_errors(&report.states, config);

    let mut files = FileSet::new(out);
    write_trajectory_files(&mut files, &report.states)?;
    output::write_control_csv(&files.path("control.csv"), &report.states, &report.control)?;

    let summary_path = files.path("summary.json");
    let summary = RunSummary {
        mode: Mode::Optimize,
        solver: Some(kind),
        converged: report.converged,
        iterations: Some(report.iterations),
        breakdown: report.breakdown,
        punished_integral: report.breakdown.punished_integral,
        initial_state_error,
        final_state_error,
        sweep: None,
        comparison: None,
        files: files.written,
        scenario: config.clone(),
    };
    output::write_json(&summary_path, &summary)?;
    Ok(summary)
}

/// Evaluates the cost for each constant control on the sweep lattice and
/// reports the cheapest one.
pub fn run_sweep(config: &ScenarioConfig, out: &Path) -> anyhow::Result<RunSummary> {
    ensure_mode(config, Mode::Sweep)?;
    prepare_out(out)?;

    let values = config.sweep_values();
    let sweep = constant_sweep(
        &config.w0,
        &config.grid,
        &config.weights,
        &config.params,
        &values,
    )?;
    let best = *sweep.best();

    let control = ControlTrajectory::constant(config.grid, best.v)?;
    let states = integrate_forward(&config.w0, &control, &config.params)?;
    let (initial_state_error, final_state_error) = state_errors(&states, config);

    let mut files = FileSet::new(out);
    output::write_sweep_csv(&files.path("sweep.csv"), &sweep)?;
    write_trajectory_files(&mut files, &states)?;

    let summary_path = files.path("summary.json");
    let summary = RunSummary {
        mode: Mode::Sweep,
        solver: None,
        converged: true,
        iterations: None,
        breakdown: best.breakdown,
        punished_integral: best.breakdown.punished_integral,
        initial_state_error,
        final_state_error,
        sweep: Some(SweepSummary {
            points: values.len(),
            v_best: best.v,
            j_best: best.breakdown.total,
        }),
        comparison: None,
        files: files.written,
        scenario: config.clone(),
    };
    output::write_json(&summary_path, &summary)?;
    Ok(summary)
}

/// Pits three strategies against each other on the same grid: the constant
/// control pinned at `v_max`, the best constant from a sweep, and the
/// optimized schedule. Wall times include everything each strategy needs,
/// so the sweep row is charged for the whole sweep.
pub fn run_compare(
    config: &ScenarioConfig,
    kind: SolverKind,
    out: &Path,
) -> anyhow::Result<RunSummary> {
    ensure_mode(config, Mode::Compare)?;
    prepare_out(out)?;

    let v_max = config.weights.v_max;
    let mut rows = Vec::new();

    let start = Instant::now();
    let full_control = ControlTrajectory::constant(config.grid, v_max)?;
    let full_states = integrate_forward(&config.w0, &full_control, &config.params)?;
    let full = evaluate_cost(&full_states, &full_control, &config.weights)?;
    rows.push(CompareRow {
        strategy: "vmax_constant".to_string(),
        j: full.total,
        punished_integral: full.punished_integral,
        wall_time_s: start.elapsed().as_secs_f64(),
        converged: true,
        iterations: None,
    });

    let start = Instant::now();
    let values = config.sweep_values();
    let sweep = constant_sweep(
        &config.w0,
        &config.grid,
        &config.weights,
        &config.params,
        &values,
    )?;
    let best = *sweep.best();
    rows.push(CompareRow {
        strategy: "best_constant".to_string(),
        j: best.breakdown.total,
        punished_integral: best.breakdown.punished_integral,
        wall_time_s: start.elapsed().as_secs_f64(),
        converged: true,
        iterations: None,
    });

    let start = Instant::now();
    let report = solve(config, kind)?;
    rows.push(CompareRow {
        strategy: "optimal".to_string(),
        j: report.breakdown.total,
        punished_integral: report.breakdown.punished_integral,
        wall_time_s: start.elapsed().as_secs_f64(),
        converged: report.converged,
        iterations: Some(report.iterations),
    });

    let (initial_state_error, final_state_error) = state_errors(&report.states, config);

    let mut files = FileSet::new(out);
    output::write_comparison_csv(&files.path("comparison.csv"), &rows)?;
    output::write_sweep_csv(&files.path("sweep.csv"), &sweep)?;
    write_trajectory_files(&mut files, &report.states)?;
    output::write_control_csv(&files.path("control.csv"), &report.states, &report.control)?;

    let summary_path = files.path("summary.json");
    let summary = RunSummary {
        mode: Mode::Compare,
        solver: Some(kind),
        converged: report.converged,
        iterations: Some(report.iterations),
        breakdown: report.breakdown,
        punished_integral: report.breakdown.punished_integral,
        initial_state_error,
        final_state_error,
        sweep: Some(SweepSummary {
            points: values.len(),
            v_best: best.v,
            j_best: best.breakdown.total,
        }),
        comparison: Some(rows),
        files: files.written,
        scenario: config.clone(),
    };
    output::write_json(&summary_path, &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn simulate_writes_all_files_and_reports_errors() {
        let dir = tempfile::tempdir().unwrap();
        let config = preset("fig2").unwrap();
        let summary = run_simulate(&config, dir.path()).unwrap();

        assert!(summary.converged);
        assert_eq!(
            summary.files,
            vec!["trajectory.csv", "ternary.csv", "summary.json"]
        );
        for name in &summary.files {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        assert!(summary.initial_state_error > 0.0);
        assert!(summary.final_state_error > summary.initial_state_error);
    }

    #[test]
    fn summary_scenario_round_trips_as_a_config() {
        let dir = tempfile::tempdir().unwrap();
        let config = preset("fig2").unwrap();
        run_simulate(&config, dir.path()).unwrap();

        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let parsed: RunSummary = serde_json::from_str(&text).unwrap();
        parsed.scenario.validate().unwrap();
        assert_eq!(parsed.scenario, config);
    }

    #[test]
    fn optimize_effort_only_reports_zero_cost() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("fig4").unwrap();
        config.grid = opgg_core::TimeGrid::new(0.0, 10.0, 80).unwrap();
        let summary = run_optimize(&config, SolverKind::Fbsm, dir.path()).unwrap();

        assert!(summary.converged);
        assert!(summary.breakdown.total <= 1e-12);
        assert!(dir.path().join("control.csv").exists());
    }

    #[test]
    fn sweep_headline_matches_the_best_entry() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("fig8").unwrap();
        config.grid = opgg_core::TimeGrid::new(0.0, 10.0, 100).unwrap();
        config.sweep_points = Some(11);
        let summary = run_sweep(&config, dir.path()).unwrap();

        let sweep = summary.sweep.unwrap();
        assert_eq!(sweep.points, 11);
        assert_eq!(summary.breakdown.total, sweep.j_best);

        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(text.lines().count(), 12);
    }

    #[test]
    fn compare_lists_three_strategies_and_optimal_wins() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("fig9").unwrap();
        config.grid = opgg_core::TimeGrid::new(0.0, 10.0, 120).unwrap();
        config.sweep_points = Some(11);
        let summary = run_compare(&config, SolverKind::Fbsm, dir.path()).unwrap();

        let rows = summary.comparison.as_ref().unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.strategy.as_str()).collect();
        assert_eq!(names, ["vmax_constant", "best_constant", "optimal"]);
        let optimal = &rows[2];
        assert!(optimal.j <= rows[0].j);
        assert!(optimal.j <= rows[1].j);
        assert!(rows.iter().all(|r| r.wall_time_s >= 0.0));
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let config = preset("fig2").unwrap();
        let err = run_optimize(&config, SolverKind::Fbsm, dir.path()).unwrap_err();
        assert!(err.to_string().contains("mode"), "{err}");
    }
}

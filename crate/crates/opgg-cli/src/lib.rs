//! Scenario runner around the game-dynamics library: JSON-configured
//! simulations, optimizations, constant-control sweeps, and strategy
//! comparisons, exported as plot-ready CSV plus a JSON summary.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{Mode, ScenarioConfig};
pub use run::{run_compare, run_optimize, run_simulate, run_sweep, RunSummary, SolverKind};

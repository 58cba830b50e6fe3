//! The JSON scenario schema and its validation.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use opgg_core::{CostWeights, GameParams, SimplexState, SolverConfig, TimeGrid};

/// What a scenario asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Integrate under a fixed constant control.
    Simulate,
    /// Solve for the cost-minimizing schedule.
    Optimize,
    /// Score equally spaced constant controls.
    Sweep,
    /// Score max, best-constant, and optimal strategies side by side.
    Compare,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::Simulate => "simulate",
            Mode::Optimize => "optimize",
            Mode::Sweep => "sweep",
            Mode::Compare => "compare",
        };
        f.write_str(s)
    }
}

/// One fully specified run. Unknown fields are rejected so typos surface
/// as errors rather than as silently ignored settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Game parameters; defaults to the five-player baseline (r=3, sigma=1).
    #[serde(default)]
    pub params: GameParams,
    /// Initial population state.
    pub w0: SimplexState,
    /// Time grid shared by control, states, and quadrature.
    pub grid: TimeGrid,
    /// Cost weights, target, and control bound.
    pub weights: CostWeights,
    /// Solver tolerances; defaults are sensible for all presets.
    #[serde(default)]
    pub solver: SolverConfig,
    pub mode: Mode,
    /// Constant control level; required by (and only valid in) simulate mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_v: Option<f64>,
    /// Number of sweep values over [0, v_max]; sweep and compare modes only,
    /// default 101.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_points: Option<usize>,
}

pub const DEFAULT_SWEEP_POINTS: usize = 101;

impl ScenarioConfig {
    /// Checks nested invariants and mode-specific fields.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.params.validate().context("field `params`")?;
        self.w0.validate().context("field `w0`")?;
        self.grid.validate().context("field `grid`")?;
        self.weights.validate().context("field `weights`")?;
        self.solver.validate().context("field `solver`")?;

        match self.mode {
            Mode::Simulate => {
                let Some(v) = self.constant_v else {
                    bail!("field `constant_v` is required in simulate mode");
                };
                if !(0.0..=self.weights.v_max).contains(&v) {
                    bail!(
                        "field `constant_v` = {v} outside [0, {}]",
                        self.weights.v_max
                    );
                }
            }
            _ => {
                if self.constant_v.is_some() {
                    bail!("field `constant_v` only applies to simulate mode");
                }
            }
        }

        match self.mode {
            Mode::Sweep | Mode::Compare => {
                if let Some(p) = self.sweep_points {
                    if p < 2 {
                        bail!("field `sweep_points` = {p} must be at least 2");
                    }
                }
            }
            _ => {
                if self.sweep_points.is_some() {
                    bail!("field `sweep_points` only applies to sweep and compare modes");
                }
            }
        }
        Ok(())
    }

    /// Resolved sweep grid: `sweep_points` equally spaced values spanning
    /// `[0, v_max]`.
    pub fn sweep_values(&self) -> Vec<f64> {
        let points = self.sweep_points.unwrap_or(DEFAULT_SWEEP_POINTS);
        let v_max = self.weights.v_max;
        (0..points)
            .map(|i| v_max * i as f64 / (points - 1) as f64)
            .collect()
    }

    /// Parses and validates a JSON scenario document.
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let config: ScenarioConfig =
            serde_json::from_str(text).context("scenario config does not match the schema")?;
        config.validate()?;
        Ok(config)
    }
}

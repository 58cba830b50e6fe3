//! Scoring of constant punishment schedules.

use crate::cost::{evaluate_cost, CostBreakdown, CostWeights};
use crate::error::{Error, Result};
use crate::grid::{ControlTrajectory, TimeGrid};
use crate::integrate::integrate_forward;
use crate::params::GameParams;
use crate::state::SimplexState;

/// One scored constant schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepEntry {
    pub v: f64,
    pub breakdown: CostBreakdown,
}

/// All scored schedules plus the index of the cheapest one.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
    /// Index of the smallest total cost; earliest wins on exact ties.
    pub argmin: usize,
}

impl SweepResult {
    pub fn best(&self) -> &SweepEntry {
        &self.entries[self.argmin]
    }
}

/// Integrates and scores each constant control value in turn.
pub fn constant_sweep(
    w0: &SimplexState,
    grid: &TimeGrid,
    weights: &CostWeights,
    params: &GameParams,
    v_values: &[f64],
) -> Result<SweepResult> {
    w0.validate()?;
    grid.validate()?;
    weights.validate()?;
    params.validate()?;
    if v_values.is_empty() {
        return Err(Error::InvalidConfig(
            "a sweep needs at least one control value".into(),
        ));
    }

    let mut entries = Vec::with_capacity(v_values.len());
    for &v in v_values {
        if !(0.0..=weights.v_max).contains(&v) {
            return Err(Error::ControlOutOfRange {
                value: v,
                lo: 0.0,
                hi: weights.v_max,
            });
        }
        let control = ControlTrajectory::constant(*grid, v)?;
        let states = integrate_forward(w0, &control, params)?;
        let breakdown = evaluate_cost(&states, &control, weights)?;
        entries.push(SweepEntry { v, breakdown });
    }

    let mut argmin = 0;
    for (i, e) in entries.iter().enumerate() {
        if e.breakdown.total < entries[argmin].breakdown.total {
            argmin = i;
        }
    }
    Ok(SweepResult { entries, argmin })
}

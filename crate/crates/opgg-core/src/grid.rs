//! Uniform time grids and the node-valued trajectories living on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::SimplexState;

/// A uniform grid of `steps + 1` nodes over `[t0, tf]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub tf: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, tf: f64, steps: usize) -> Result<Self> {
        let grid = TimeGrid { t0, tf, steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t0.is_finite() || !self.tf.is_finite() || self.tf <= self.t0 {
            return Err(Error::InvalidGrid(format!(
                "need finite tf > t0, got [{}, {}]",
                self.t0, self.tf
            )));
        }
        if self.steps < 1 {
            return Err(Error::InvalidGrid("at least one step required".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.tf - self.t0) / self.steps as f64
    }

    /// Number of nodes, `steps + 1`.
    pub fn num_nodes(&self) -> usize {
        self.steps + 1
    }

    /// Time of node `k`, hitting `tf` exactly at the last node.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + (self.tf - self.t0) * k as f64 / self.steps as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_nodes()).map(|k| self.time(k))
    }
}

/// A punishment schedule sampled at grid nodes; between nodes the control
/// is understood as piecewise linear.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlTrajectory {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl ControlTrajectory {
    /// Wraps node values after checking length and the hard range [0, 1].
    /// Solvers additionally keep values within their configured `v_max`.
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "{} control values on a grid with {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ControlOutOfRange {
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(ControlTrajectory { grid, values })
    }

    /// The constant schedule `v(t) = v`.
    pub fn constant(grid: TimeGrid, v: f64) -> Result<Self> {
        ControlTrajectory::new(grid, vec![v; grid.num_nodes()])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A state path sampled at grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTrajectory {
    grid: TimeGrid,
    states: Vec<SimplexState>,
}

impl StateTrajectory {
    pub fn new(grid: TimeGrid, states: Vec<SimplexState>) -> Result<Self> {
        grid.validate()?;
        if states.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "{} states on a grid with {} nodes",
                states.len(),
                grid.num_nodes()
            )));
        }
        for w in &states {
            w.validate()?;
        }
        Ok(StateTrajectory { grid, states })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> &[SimplexState] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &SimplexState {
        &self.states[k]
    }

    pub fn final_state(&self) -> &SimplexState {
        self.states.last().expect("grids have at least two nodes")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nodes_are_affine_and_hit_endpoints() {
        let grid = TimeGrid::new(0.0, 20.0, 400).unwrap();
        assert_eq!(grid.num_nodes(), 401);
        assert_eq!(grid.time(0), 0.0);
        assert_eq!(grid.time(400), 20.0);
        assert!((grid.time(1) - 0.05).abs() < 1e-15);
        assert!((grid.dt() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_degenerate_spans() {
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(5.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn control_lengths_and_ranges_are_enforced() {
        let grid = TimeGrid::new(0.0, 1.0, 2).unwrap();
        assert!(ControlTrajectory::new(grid, vec![0.0, 0.5]).is_err());
        assert!(ControlTrajectory::new(grid, vec![0.0, 1.5, 0.5]).is_err());
        assert!(ControlTrajectory::new(grid, vec![0.0, f64::NAN, 0.5]).is_err());
        let c = ControlTrajectory::constant(grid, 0.57).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.values().iter().all(|&v| v == 0.57));
    }

    #[test]
    fn state_trajectory_checks_membership() {
        let grid = TimeGrid::new(0.0, 1.0, 1).unwrap();
        let good = SimplexState::new(0.2, 0.7, 0.1).unwrap();
        StateTrajectory::new(grid, vec![good, good]).unwrap();
        let bad = SimplexState {
            x: 0.5,
            y: 0.5,
            z: 0.5,
        };
        assert!(StateTrajectory::new(grid, vec![good, bad]).is_err());
    }
}

//! The four-term quadratic objective and its evaluation on discrete
//! trajectories.
//!
//! The total cost charges (1) missing the target state at the final time,
//! (2) accumulated tracking error along the way, (3) raw control effort,
//! and (4) control effort scaled by how many defectors actually get fined.
//! Integrals use the composite trapezoidal rule on the trajectory grid,
//! matching the piecewise-linear control representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ControlTrajectory, StateTrajectory, TimeGrid};
use crate::state::SimplexState;

/// Weights of the four cost terms, the tracking target, and the control
/// upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    /// Terminal state error weight.
    pub alpha1: f64,
    /// Accumulated tracking error weight.
    pub alpha2: f64,
    /// Control effort weight.
    pub alpha3: f64,
    /// Punished-share weight (effort times squared defector share).
    pub alpha4: f64,
    /// Tracking target, full cooperation unless configured otherwise.
    #[serde(default = "default_target")]
    pub w_star: SimplexState,
    /// Upper bound of the admissible control interval `[0, v_max]`.
    #[serde(default = "default_v_max")]
    pub v_max: f64,
}

fn default_target() -> SimplexState {
    SimplexState::COOPERATION
}

fn default_v_max() -> f64 {
    1.0
}

impl CostWeights {
    /// Weights with the default target `(1,0,0)` and `v_max = 1`.
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64, alpha4: f64) -> Result<Self> {
        let weights = CostWeights {
            alpha1,
            alpha2,
            alpha3,
            alpha4,
            w_star: default_target(),
            v_max: default_v_max(),
        };
        weights.validate()?;
        Ok(weights)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
            ("alpha4", self.alpha4),
        ] {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "{name} = {a} must be finite and non-negative"
                )));
            }
        }
        if self.alpha1 + self.alpha2 + self.alpha3 + self.alpha4 <= 0.0 {
            return Err(Error::InvalidWeights(
                "at least one weight must be positive".into(),
            ));
        }
        self.w_star
            .validate()
            .map_err(|e| Error::InvalidWeights(format!("target: {e}")))?;
        if !(self.v_max > 0.0 && self.v_max <= 1.0) {
            return Err(Error::InvalidWeights(format!(
                "v_max = {} must lie in (0, 1]",
                self.v_max
            )));
        }
        Ok(())
    }

    /// Whether the running cost is strictly convex in the control at every
    /// state. With only `alpha4` positive, convexity degenerates where
    /// `y = 0`; solvers fall back to a bang-bang choice there.
    pub fn is_strictly_convex(&self) -> bool {
        self.alpha3 > 0.0 || self.alpha4 > 0.0
    }
}

/// Per-term decomposition of the total cost, plus the unweighted integral
/// of the punished share for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// `(alpha1/2) ||w(tf) - w*||^2`.
    pub terminal: f64,
    /// `(alpha2/2) integral of ||w - w*||^2`.
    pub tracking: f64,
    /// `(alpha3/2) integral of v^2`.
    pub effort: f64,
    /// `(alpha4/2) integral of v^2 y^2`.
    pub punished: f64,
    /// Sum of the four terms.
    pub total: f64,
    /// `integral of y v`, the cumulative fined share (not part of total).
    pub punished_integral: f64,
}

/// The integrand of the running (non-terminal) part of the cost.
pub fn running_cost(w: &SimplexState, v: f64, weights: &CostWeights) -> f64 {
    let d = w.distance(&weights.w_star);
    0.5 * (weights.alpha2 * d * d + weights.alpha3 * v * v + weights.alpha4 * v * v * w.y * w.y)
}

/// Trapezoidal node weight: `dt`, halved at the two endpoints.
pub(crate) fn quadrature_weight(grid: &TimeGrid, k: usize) -> f64 {
    let dt = grid.dt();
    if k == 0 || k == grid.steps {
        0.5 * dt
    } else {
        dt
    }
}

/// Evaluates the full cost of a trajectory/control pair sharing one grid.
pub fn evaluate_cost(
    traj: &StateTrajectory,
    control: &ControlTrajectory,
    weights: &CostWeights,
) -> Result<CostBreakdown> {
    weights.validate()?;
    if traj.grid() != control.grid() {
        return Err(Error::GridMismatch(format!(
            "states on {:?}, control on {:?}",
            traj.grid(),
            control.grid()
        )));
    }

    let grid = traj.grid();
    let mut tracking = 0.0;
    let mut effort = 0.0;
    let mut punished = 0.0;
    let mut punished_integral = 0.0;
    for k in 0..grid.num_nodes() {
        let w = traj.state(k);
        let v = control.value(k);
        let omega = quadrature_weight(grid, k);
        let d = w.distance(&weights.w_star);
        tracking += omega * d * d;
        effort += omega * v * v;
        punished += omega * v * v * w.y * w.y;
        punished_integral += omega * w.y * v;
    }
    tracking *= 0.5 * weights.alpha2;
    effort *= 0.5 * weights.alpha3;
    punished *= 0.5 * weights.alpha4;

    let d_final = traj.final_state().distance(&weights.w_star);
    let terminal = 0.5 * weights.alpha1 * d_final * d_final;

    Ok(CostBreakdown {
        terminal,
        tracking,
        effort,
        punished,
        total: terminal + tracking + effort + punished,
        punished_integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    fn constant_pair(
        w: SimplexState,
        v: f64,
        grid: TimeGrid,
    ) -> (StateTrajectory, ControlTrajectory) {
        let traj = StateTrajectory::new(grid, vec![w; grid.num_nodes()]).unwrap();
        let control = ControlTrajectory::constant(grid, v).unwrap();
        (traj, control)
    }

    #[test]
    fn weights_validation_catches_bad_inputs() {
        assert!(CostWeights::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(CostWeights::new(-1.0, 1.0, 0.0, 0.0).is_err());
        assert!(CostWeights::new(f64::NAN, 1.0, 0.0, 0.0).is_err());
        let mut w = CostWeights::new(1.0, 0.0, 0.0, 0.0).unwrap();
        w.v_max = 0.0;
        assert!(w.validate().is_err());
        w.v_max = 1.5;
        assert!(w.validate().is_err());
    }

    #[test]
    fn convexity_flag_follows_control_weights() {
        assert!(!CostWeights::new(1.0, 1.0, 0.0, 0.0)
            .unwrap()
            .is_strictly_convex());
        assert!(CostWeights::new(0.0, 0.0, 1.0, 0.0)
            .unwrap()
            .is_strictly_convex());
        assert!(CostWeights::new(0.0, 0.0, 0.0, 1.0)
            .unwrap()
            .is_strictly_convex());
    }

    #[test]
    fn running_cost_matches_hand_computation() {
        let weights = CostWeights {
            alpha1: 0.0,
            alpha2: 2.0,
            alpha3: 2.0,
            alpha4: 2.0,
            w_star: SimplexState::COOPERATION,
            v_max: 1.0,
        };
        let w = SimplexState::new(0.0, 1.0, 0.0).unwrap();
        // Squared distance to the target is 2, and v = y = 1.
        assert!((running_cost(&w, 1.0, &weights) - 4.0).abs() < 1e-15);

        let at_target = running_cost(&SimplexState::COOPERATION, 0.0, &weights);
        assert_eq!(at_target, 0.0);
    }

    #[test]
    fn resting_at_the_target_costs_nothing() {
        let grid = TimeGrid::new(0.0, 10.0, 10).unwrap();
        let weights = CostWeights::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let (traj, control) = constant_pair(SimplexState::COOPERATION, 0.0, grid);
        let b = evaluate_cost(&traj, &control, &weights).unwrap();
        assert_eq!(b.total, 0.0);
        assert_eq!(b.punished_integral, 0.0);
    }

    #[test]
    fn constant_integrands_are_integrated_exactly() {
        let grid = TimeGrid::new(0.0, 10.0, 7).unwrap();
        let w = SimplexState::new(0.2, 0.7, 0.1).unwrap();
        let weights = CostWeights::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let v = 0.5;
        let (traj, control) = constant_pair(w, v, grid);
        let b = evaluate_cost(&traj, &control, &weights).unwrap();

        let d2 = w.distance(&SimplexState::COOPERATION).powi(2);
        let horizon = 10.0;
        assert!((b.terminal - 0.5 * d2).abs() < 1e-14);
        assert!((b.tracking - 0.5 * d2 * horizon).abs() < 1e-12);
        assert!((b.effort - 0.5 * v * v * horizon).abs() < 1e-12);
        assert!((b.punished - 0.5 * v * v * w.y * w.y * horizon).abs() < 1e-12);
        assert!((b.punished_integral - w.y * v * horizon).abs() < 1e-12);
        assert!((b.total - (b.terminal + b.tracking + b.effort + b.punished)).abs() < 1e-15);
    }

    #[test]
    fn single_weight_isolates_its_term() {
        let grid = TimeGrid::new(0.0, 5.0, 9).unwrap();
        let w = SimplexState::new(0.3, 0.3, 0.4).unwrap();
        let (traj, control) = constant_pair(w, 0.8, grid);

        let b = evaluate_cost(
            &traj,
            &control,
            &CostWeights::new(3.0, 0.0, 0.0, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(b.tracking, 0.0);
        assert_eq!(b.effort, 0.0);
        assert_eq!(b.punished, 0.0);
        let d2 = w.distance(&SimplexState::COOPERATION).powi(2);
        assert!((b.total - 1.5 * d2).abs() < 1e-14);
    }

    #[test]
    fn scaling_one_weight_scales_exactly_its_term() {
        let grid = TimeGrid::new(0.0, 5.0, 9).unwrap();
        let w = SimplexState::new(0.3, 0.3, 0.4).unwrap();
        let (traj, control) = constant_pair(w, 0.8, grid);
        let base = evaluate_cost(
            &traj,
            &control,
            &CostWeights::new(1.0, 1.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        let scaled = evaluate_cost(
            &traj,
            &control,
            &CostWeights::new(1.0, 5.0, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!((scaled.tracking - 5.0 * base.tracking).abs() < 1e-12);
        assert_eq!(scaled.terminal, base.terminal);
        assert_eq!(scaled.effort, base.effort);
        assert_eq!(scaled.punished, base.punished);
        assert_eq!(scaled.punished_integral, base.punished_integral);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let g1 = TimeGrid::new(0.0, 5.0, 9).unwrap();
        let g2 = TimeGrid::new(0.0, 5.0, 10).unwrap();
        let w = SimplexState::new(0.3, 0.3, 0.4).unwrap();
        let traj = StateTrajectory::new(g1, vec![w; g1.num_nodes()]).unwrap();
        let control = ControlTrajectory::constant(g2, 0.1).unwrap();
        let weights = CostWeights::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            evaluate_cost(&traj, &control, &weights),
            Err(Error::GridMismatch(_))
        ));
    }
}

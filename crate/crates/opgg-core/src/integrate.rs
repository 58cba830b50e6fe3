//! Fixed-step Runge-Kutta integration of the controlled replicator system.
//!
//! The flow keeps the simplex invariant analytically, but floating point
//! does not; after every step the state is clamped at zero and rescaled to
//! unit sum. The unrenormalized drift is watched: anything beyond a loose
//! safety margin means the step size is too coarse and the run aborts
//! instead of silently producing garbage.

use crate::dynamics::field_raw;
use crate::error::{Error, Result};
use crate::grid::{ControlTrajectory, StateTrajectory};
use crate::params::GameParams;
use crate::payoff::check_control;
use crate::state::SimplexState;

/// Abort threshold on the pre-renormalization simplex deviation.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Extremes of the raw (pre-renormalization) states seen during a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    /// Largest `|x + y + z - 1|` before renormalization.
    pub max_drift: f64,
    /// Smallest component before clamping.
    pub min_component: f64,
}

impl StepDiagnostics {
    fn update(&mut self, raw: [f64; 3]) {
        let sum: f64 = raw.iter().sum();
        self.max_drift = self.max_drift.max((sum - 1.0).abs());
        for c in raw {
            self.min_component = self.min_component.min(c);
        }
    }
}

impl Default for StepDiagnostics {
    fn default() -> Self {
        StepDiagnostics {
            max_drift: 0.0,
            min_component: f64::INFINITY,
        }
    }
}

fn rk4_raw(
    w: [f64; 3],
    v_left: f64,
    v_mid: f64,
    v_right: f64,
    dt: f64,
    params: &GameParams,
) -> [f64; 3] {
    let add =
        |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = field_raw(w, v_left, params);
    let k2 = field_raw(add(w, k1, dt / 2.0), v_mid, params);
    let k3 = field_raw(add(w, k2, dt / 2.0), v_mid, params);
    let k4 = field_raw(add(w, k3, dt), v_right, params);
    let mut out = w;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// How far a raw point sits from the simplex: unit-sum violation or the
/// depth of the most negative component, whichever is worse.
fn deviation(raw: [f64; 3]) -> f64 {
    let sum: f64 = raw.iter().sum();
    let neg = raw.iter().fold(0.0f64, |acc, &c| acc.max(-c));
    (sum - 1.0).abs().max(neg)
}

/// One classical RK4 step with the control sampled at the step endpoints
/// and (linearly interpolated) midpoint. The result is renormalized; if the
/// raw result deviates from the simplex by more than [`DRIFT_LIMIT`] the
/// step fails instead.
pub fn rk4_step(
    w: &SimplexState,
    v_left: f64,
    v_mid: f64,
    v_right: f64,
    dt: f64,
    params: &GameParams,
) -> Result<SimplexState> {
    params.validate()?;
    for v in [v_left, v_mid, v_right] {
        check_control(v)?;
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidGrid(format!(
            "step size {dt} must be positive"
        )));
    }
    let raw = rk4_raw(w.to_array(), v_left, v_mid, v_right, dt, params);
    let drift = deviation(raw);
    if drift > DRIFT_LIMIT {
        return Err(Error::StepOffSimplex { index: 0, drift });
    }
    Ok(SimplexState::renormalize(raw))
}

/// Integrates from `w0` across the control's grid, one RK4 step per
/// interval. Node `k` of the result holds the state at time `grid.time(k)`,
/// with node 0 equal to `w0` exactly.
pub fn integrate_forward(
    w0: &SimplexState,
    control: &ControlTrajectory,
    params: &GameParams,
) -> Result<StateTrajectory> {
    integrate_forward_diag(w0, control, params).map(|(traj, _)| traj)
}

/// Same as [`integrate_forward`], also reporting how far the raw states
/// strayed before renormalization pulled them back.
pub fn integrate_forward_diag(
    w0: &SimplexState,
    control: &ControlTrajectory,
    params: &GameParams,
) -> Result<(StateTrajectory, StepDiagnostics)> {
    w0.validate()?;
    params.validate()?;
    let grid = *control.grid();
    let dt = grid.dt();
    let mut diag = StepDiagnostics::default();
    let mut states = Vec::with_capacity(grid.num_nodes());
    states.push(*w0);
    let mut w = w0.to_array();
    for k in 0..grid.steps {
        let v_left = control.value(k);
        let v_right = control.value(k + 1);
        let v_mid = 0.5 * (v_left + v_right);
        let raw = rk4_raw(w, v_left, v_mid, v_right, dt, params);
        diag.update(raw);
        let drift = deviation(raw);
        if drift > DRIFT_LIMIT {
            return Err(Error::StepOffSimplex { index: k, drift });
        }
        let next = SimplexState::renormalize(raw);
        states.push(next);
        w = next.to_array();
    }
    Ok((StateTrajectory::new(grid, states)?, diag))
}

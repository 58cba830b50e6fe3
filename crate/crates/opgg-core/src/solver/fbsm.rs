//! Forward-backward sweep with relaxation and a descent safeguard.

use crate::cost::{evaluate_cost, CostWeights};
use crate::error::Result;
use crate::grid::{ControlTrajectory, TimeGrid};
use crate::integrate::integrate_forward;
use crate::params::GameParams;
use crate::solver::{
    costate_sweep, initial_control, pointwise_control_update, step_converged, SolveReport,
    SolverConfig,
};
use crate::state::SimplexState;

/// Most halvings of the relaxation weight within one iteration before the
/// update is declared unable to descend.
const MAX_BACKTRACKS: usize = 20;

/// Solves the punishment scheduling problem by forward-backward sweeping.
///
/// Each iteration integrates the states forward under the current control,
/// integrates the costate backward from its terminal condition, minimizes
/// the Hamiltonian pointwise at every node, then moves the control a
/// fraction `theta` toward that minimizer. If the move raises the cost,
/// `theta` is halved for this iteration until the cost does not increase,
/// which makes `cost_history` non-increasing. The iteration stops when an
/// accepted update changes neither the cost nor the control beyond the
/// configured tolerances.
///
/// Convergence of the sweep is not guaranteed in general; a run that
/// exhausts `max_iters` reports `converged = false` rather than failing.
pub fn fbsm_solve(
    w0: &SimplexState,
    grid: &TimeGrid,
    weights: &CostWeights,
    params: &GameParams,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let mut control = initial_control(w0, grid, weights, params, config)?;
    let mut states = integrate_forward(w0, &control, params)?;
    let mut breakdown = evaluate_cost(&states, &control, weights)?;
    let mut cost_history = vec![breakdown.total];

    let nodes = grid.num_nodes();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..config.max_iters {
        iterations += 1;
        let lambdas = costate_sweep(&states, &control, weights, params)?;

        let mut target = vec![0.0; nodes];
        for k in 0..nodes {
            let w = states.state(k);
            let proposed =
                pointwise_control_update(w, lambdas[k], weights, params, config.bang_bang_epsilon);
            // Where the Hamiltonian is flat in v (no curvature and no
            // slope, e.g. after the defectors die out), any value is
            // optimal; keep the current one so the iteration can settle
            // instead of dithering between the bounds.
            let curvature = weights.alpha3 + weights.alpha4 * w.y * w.y;
            let slope = crate::solver::hamiltonian_v(w, 0.0, lambdas[k], weights, params);
            target[k] = if curvature <= config.bang_bang_epsilon
                && slope.abs() <= config.bang_bang_epsilon
            {
                control.value(k)
            } else {
                proposed
            };
        }

        // Relax toward the pointwise minimizer, backing off if that
        // overshoots and raises the cost.
        let mut theta = config.theta;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial_values: Vec<f64> = (0..nodes)
                .map(|k| (1.0 - theta) * control.value(k) + theta * target[k])
                .collect();
            let trial_control = ControlTrajectory::new(*grid, trial_values)?;
            let trial_states = integrate_forward(w0, &trial_control, params)?;
            let trial_breakdown = evaluate_cost(&trial_states, &trial_control, weights)?;
            if trial_breakdown.total <= breakdown.total {
                accepted = Some((trial_control, trial_states, trial_breakdown));
                break;
            }
            theta *= 0.5;
        }

        let Some((new_control, new_states, new_breakdown)) = accepted else {
            // Even a vanishing step uphill: the iterate is stationary to
            // machine precision.
            converged = true;
            break;
        };

        let max_change = new_control
            .values()
            .iter()
            .zip(control.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let j_prev = breakdown.total;

        control = new_control;
        states = new_states;
        breakdown = new_breakdown;
        cost_history.push(breakdown.total);

        if step_converged(config, j_prev, breakdown.total, max_change) {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        control,
        states,
        breakdown,
        iterations,
        converged,
        cost_history,
    })
}

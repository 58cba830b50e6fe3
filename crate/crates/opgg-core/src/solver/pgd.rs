//! Projected gradient descent on the node values of the control, driven by
//! an exact gradient of the discretized cost.
//!
//! The gradient is assembled by reverse-mode differentiation of the actual
//! computation: trapezoidal cost sums, each RK4 stage, and the
//! clamp-and-rescale renormalization. Differentiating the discretization
//! itself (rather than sampling the continuous adjoint at the nodes) keeps
//! the gradient consistent with the evaluated cost down to rounding, which
//! is what a finite-difference oracle checks.

use crate::cost::{evaluate_cost, quadrature_weight, CostWeights};
use crate::dynamics::{control_sensitivity_raw, field_raw, jacobian_raw};
use crate::error::Result;
use crate::grid::{ControlTrajectory, StateTrajectory, TimeGrid};
use crate::integrate::integrate_forward;
use crate::params::GameParams;
use crate::solver::{initial_control, step_converged, SolveReport, SolverConfig};
use crate::state::SimplexState;

/// Armijo sufficient-decrease fraction.
const ARMIJO_SIGMA: f64 = 1e-4;
/// Most halvings of the trial step within one iteration.
const MAX_HALVINGS: usize = 40;
/// Initial and maximum gradient step sizes.
const STEP0: f64 = 1.0;
const STEP_MAX: f64 = 1e6;

type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn axpy(a: Vec3, b: Vec3, s: f64) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Pulls a gradient through `renormalize`: clamped coordinates are dead,
/// the rest share the rescaling.
fn renormalize_vjp(raw: Vec3, gbar: Vec3) -> Vec3 {
    let clamped = raw.map(|c| c.max(0.0));
    let s: f64 = clamped.iter().sum();
    let u = clamped.map(|c| c / s);
    let mean = dot(gbar, u);
    let mut out = [0.0; 3];
    for j in 0..3 {
        out[j] = if raw[j] > 0.0 {
            (gbar[j] - mean) / s
        } else {
            0.0
        };
    }
    out
}

/// Direct dependence of the cost on the state at node `k` (quadrature
/// weight included); the terminal term is added separately.
fn node_state_gradient(w: &SimplexState, v: f64, omega: f64, weights: &CostWeights) -> Vec3 {
    let t = weights.w_star;
    let mut g = [
        omega * weights.alpha2 * (w.x - t.x),
        omega * weights.alpha2 * (w.y - t.y),
        omega * weights.alpha2 * (w.z - t.z),
    ];
    g[1] += omega * weights.alpha4 * v * v * w.y;
    g
}

/// Gradient of the discrete cost with respect to every control node, by
/// one forward integration and one reverse sweep through the stored steps.
pub fn discrete_adjoint_gradient(
    w0: &SimplexState,
    control: &ControlTrajectory,
    weights: &CostWeights,
    params: &GameParams,
) -> Result<Vec<f64>> {
    weights.validate()?;
    let states = integrate_forward(w0, control, params)?;
    Ok(gradient_from_states(&states, control, weights, params))
}

fn gradient_from_states(
    states: &StateTrajectory,
    control: &ControlTrajectory,
    weights: &CostWeights,
    params: &GameParams,
) -> Vec<f64> {
    let grid = states.grid();
    let nodes = grid.num_nodes();
    let dt = grid.dt();
    let last = nodes - 1;

    let mut grad = vec![0.0; nodes];
    // Direct control dependence of the trapezoid sums.
    for (k, g) in grad.iter_mut().enumerate() {
        let w = states.state(k);
        let v = control.value(k);
        let omega = quadrature_weight(grid, k);
        *g = omega * v * (weights.alpha3 + weights.alpha4 * w.y * w.y);
    }

    // Seed the reverse sweep with the cost's dependence on the final node.
    let wf = states.state(last);
    let mut wbar = node_state_gradient(
        wf,
        control.value(last),
        quadrature_weight(grid, last),
        weights,
    );
    let t = weights.w_star;
    wbar[0] += weights.alpha1 * (wf.x - t.x);
    wbar[1] += weights.alpha1 * (wf.y - t.y);
    wbar[2] += weights.alpha1 * (wf.z - t.z);

    for k in (0..grid.steps).rev() {
        let w = states.state(k).to_array();
        let v1 = control.value(k);
        let v4 = control.value(k + 1);
        let v_mid = 0.5 * (v1 + v4);

        // Recompute the forward stages of this step.
        let k1 = field_raw(w, v1, params);
        let a2 = axpy(w, k1, dt / 2.0);
        let k2 = field_raw(a2, v_mid, params);
        let a3 = axpy(w, k2, dt / 2.0);
        let k3 = field_raw(a3, v_mid, params);
        let a4 = axpy(w, k3, dt);
        let k4 = field_raw(a4, v4, params);
        let mut raw = w;
        for i in 0..3 {
            raw[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        // Through the renormalization first.
        let graw = renormalize_vjp(raw, wbar);

        // Then back through the four stages.
        let jt_mul = |p: Vec3, vv: f64, kb: Vec3| -> Vec3 {
            let jac = jacobian_raw(p, vv, params);
            let mut out = [0.0; 3];
            for j in 0..3 {
                for i in 0..3 {
                    out[j] += jac[i][j] * kb[i];
                }
            }
            out
        };
        let fv_dot = |p: Vec3, kb: Vec3| -> f64 { dot(control_sensitivity_raw(p, params), kb) };

        let kb4 = [graw[0] * dt / 6.0, graw[1] * dt / 6.0, graw[2] * dt / 6.0];
        let a4bar = jt_mul(a4, v4, kb4);
        let v4bar = fv_dot(a4, kb4);

        let mut kb3 = [0.0; 3];
        for i in 0..3 {
            kb3[i] = graw[i] * dt / 3.0 + dt * a4bar[i];
        }
        let a3bar = jt_mul(a3, v_mid, kb3);
        let v3bar = fv_dot(a3, kb3);

        let mut kb2 = [0.0; 3];
        for i in 0..3 {
            kb2[i] = graw[i] * dt / 3.0 + dt / 2.0 * a3bar[i];
        }
        let a2bar = jt_mul(a2, v_mid, kb2);
        let v2bar = fv_dot(a2, kb2);

        let mut kb1 = [0.0; 3];
        for i in 0..3 {
            kb1[i] = graw[i] * dt / 6.0 + dt / 2.0 * a2bar[i];
        }
        let wbar_k1 = jt_mul(w, v1, kb1);
        let v1bar = fv_dot(w, kb1);

        // Stage controls map back to the two nodes: the midpoint samples
        // split evenly between them.
        let mid_share = 0.5 * (v2bar + v3bar);
        grad[k] += v1bar + mid_share;
        grad[k + 1] += v4bar + mid_share;

        // Total state gradient at node k: identity path into `raw` plus
        // all four stage inputs, plus the direct cost term at this node.
        let mut wk = node_state_gradient(states.state(k), v1, quadrature_weight(grid, k), weights);
        for i in 0..3 {
            wk[i] += graw[i] + a4bar[i] + a3bar[i] + a2bar[i] + wbar_k1[i];
        }
        wbar = wk;
    }

    grad
}

/// Minimizes the cost over node values of the control with projected
/// gradient descent and an Armijo backtracking line search along the
/// projection arc. The step size doubles after each accepted iteration and
/// halves during backtracking, so it self-tunes to the local curvature.
pub fn projected_gradient_solve(
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

    let mut step = STEP0;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..config.max_iters {
        iterations += 1;
        let grad = gradient_from_states(&states, &control, weights, params);

        let mut trial_step = step;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial_values: Vec<f64> = control
                .values()
                .iter()
                .zip(&grad)
                .map(|(&v, &g)| (v - trial_step * g).clamp(0.0, weights.v_max))
                .collect();
            let predicted: f64 = control
                .values()
                .iter()
                .zip(&trial_values)
                .zip(&grad)
                .map(|((&v, &vt), &g)| g * (v - vt))
                .sum();
            let trial_control = ControlTrajectory::new(*grid, trial_values)?;
            let trial_states = integrate_forward(w0, &trial_control, params)?;
            let trial_breakdown = evaluate_cost(&trial_states, &trial_control, weights)?;
            if trial_breakdown.total <= breakdown.total - ARMIJO_SIGMA * predicted {
                accepted = Some((trial_control, trial_states, trial_breakdown));
                break;
            }
            trial_step *= 0.5;
        }

        let Some((new_control, new_states, new_breakdown)) = accepted else {
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
        step = (trial_step * 2.0).min(STEP_MAX);

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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use crate::solver::fbsm_solve;

    fn defaults() -> GameParams {
        GameParams::default()
    }

    fn start() -> SimplexState {
        SimplexState::new(0.2, 0.7, 0.1).unwrap()
    }

    #[test]
    fn adjoint_gradient_matches_finite_differences() {
        let params = defaults();
        let weights = CostWeights::new(0.3, 0.04, 0.001, 0.959).unwrap();
        let grid = TimeGrid::new(0.0, 20.0, 19).unwrap();
        let values: Vec<f64> = (0..grid.num_nodes())
            .map(|k| 0.2 + 0.5 * (k as f64 * 0.37).sin().abs())
            .collect();
        let control = ControlTrajectory::new(grid, values.clone()).unwrap();
        let grad = discrete_adjoint_gradient(&start(), &control, &weights, &params).unwrap();

        let cost_of = |vals: Vec<f64>| {
            let c = ControlTrajectory::new(grid, vals).unwrap();
            let s = integrate_forward(&start(), &c, &params).unwrap();
            evaluate_cost(&s, &c, &weights).unwrap().total
        };
        let h = 1e-6;
        for k in 0..grid.num_nodes() {
            let mut plus = values.clone();
            let mut minus = values.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (cost_of(plus) - cost_of(minus)) / (2.0 * h);
            assert!(
                (grad[k] - fd).abs() <= 1e-4 * fd.abs().max(1e-3),
                "node {k}: adjoint {} vs fd {}",
                grad[k],
                fd
            );
        }
    }

    #[test]
    fn effort_only_weights_converge_to_zero_control() {
        let params = defaults();
        let grid = TimeGrid::new(0.0, 70.0, 300).unwrap();
        let weights = CostWeights::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let report =
            projected_gradient_solve(&start(), &grid, &weights, &params, &SolverConfig::default())
                .unwrap();
        assert!(report.converged);
        let max_v = report
            .control
            .values()
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        assert!(max_v <= 1e-12, "max v = {max_v}");
    }

    #[test]
    fn agrees_with_the_sweep_solver_on_a_combined_scenario() {
        let params = defaults();
        let grid = TimeGrid::new(0.0, 20.0, 150).unwrap();
        let weights = CostWeights::new(0.0, 0.04, 0.001, 0.959).unwrap();
        let config = SolverConfig::default();
        let sweep = fbsm_solve(&start(), &grid, &weights, &params, &config).unwrap();
        let grad = projected_gradient_solve(&start(), &grid, &weights, &params, &config).unwrap();
        assert!(sweep.converged && grad.converged);
        let gap = (sweep.breakdown.total - grad.breakdown.total).abs() / sweep.breakdown.total;
        assert!(gap <= 0.01, "relative cost gap {gap}");
    }

    #[test]
    fn history_is_monotone_and_control_feasible() {
        let params = defaults();
        let grid = TimeGrid::new(0.0, 20.0, 100).unwrap();
        let weights = CostWeights::new(0.0, 0.04, 0.001, 0.959).unwrap();
        let report =
            projected_gradient_solve(&start(), &grid, &weights, &params, &SolverConfig::default())
                .unwrap();
        for pair in report.cost_history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        for &v in report.control.values() {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

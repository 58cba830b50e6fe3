//! Solvers for the punishment scheduling problem: minimize the quadratic
//! cost subject to the replicator dynamics and the box constraint
//! `0 <= v(t) <= v_max`.
//!
//! The workhorse is a forward-backward sweep ([`fbsm_solve`]): integrate
//! the states forward, integrate the costate backward, minimize the
//! Hamiltonian pointwise in the control, and relax toward that minimizer
//! with a backtracking safeguard. A projected gradient method
//! ([`projected_gradient_solve`]) built on an exact gradient of the
//! discretized cost serves as an independent cross-check, and
//! [`constant_sweep`] scores constant schedules.

mod fbsm;
mod pgd;
mod sweep;

pub use fbsm::fbsm_solve;
pub use pgd::{discrete_adjoint_gradient, projected_gradient_solve};
pub use sweep::{constant_sweep, SweepEntry, SweepResult};

use serde::{Deserialize, Serialize};

use crate::cost::{running_cost, CostBreakdown, CostWeights};
use crate::dynamics::{control_sensitivity_raw, field_raw, jacobian_raw};
use crate::error::{Error, Result};
use crate::grid::{ControlTrajectory, StateTrajectory};
use crate::params::GameParams;
use crate::state::SimplexState;

/// Iteration limits and tolerances shared by both solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Iteration cap before giving up.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Relaxation weight on the new control in the sweep update, in (0, 1].
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Stop threshold on the cost decrease, relative to `max(1, |J|)`.
    #[serde(default = "default_tol_cost")]
    pub tol_cost: f64,
    /// Stop threshold on the largest control change between iterates.
    #[serde(default = "default_tol_control")]
    pub tol_control: f64,
    /// Below this, the Hamiltonian curvature in `v` counts as zero and the
    /// pointwise minimizer switches to its bang-bang branch.
    #[serde(default = "default_bang_bang_epsilon")]
    pub bang_bang_epsilon: f64,
    /// Value of the constant initial control guess.
    #[serde(default = "default_initial_control")]
    pub initial_control: f64,
}

fn default_max_iters() -> usize {
    2000
}
fn default_theta() -> f64 {
    0.5
}
fn default_tol_cost() -> f64 {
    1e-8
}
fn default_tol_control() -> f64 {
    1e-6
}
fn default_bang_bang_epsilon() -> f64 {
    1e-12
}
fn default_initial_control() -> f64 {
    0.0
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: default_max_iters(),
            theta: default_theta(),
            tol_cost: default_tol_cost(),
            tol_control: default_tol_control(),
            bang_bang_epsilon: default_bang_bang_epsilon(),
            initial_control: default_initial_control(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "theta = {} must lie in (0, 1]",
                self.theta
            )));
        }
        for (name, tol) in [
            ("tol_cost", self.tol_cost),
            ("tol_control", self.tol_control),
        ] {
            if !tol.is_finite() || tol <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {tol} must be positive"
                )));
            }
        }
        if !self.bang_bang_epsilon.is_finite() || self.bang_bang_epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "bang_bang_epsilon = {} must be non-negative",
                self.bang_bang_epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.initial_control) {
            return Err(Error::InvalidConfig(format!(
                "initial_control = {} must lie in [0, 1]",
                self.initial_control
            )));
        }
        Ok(())
    }
}

/// Everything a solve produces: the schedule, its trajectory, the cost and
/// its terms, and convergence diagnostics.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub control: ControlTrajectory,
    pub states: StateTrajectory,
    pub breakdown: CostBreakdown,
    /// Iterations actually performed.
    pub iterations: usize,
    /// Whether both stopping tolerances were met within the iteration cap.
    pub converged: bool,
    /// Total cost after the initial guess and each accepted update;
    /// non-increasing by construction.
    pub cost_history: Vec<f64>,
}

/// Right side of the costate equation, `dλ/dt = -∂H/∂w`, with the three
/// coordinates treated as independent:
///
/// ```text
/// -[ α₂ (w - w*) + α₄ v² y e_y + (∂f/∂w)ᵀ λ ]
/// ```
pub fn costate_rhs(
    w: &SimplexState,
    v: f64,
    lambda: [f64; 3],
    weights: &CostWeights,
    params: &GameParams,
) -> [f64; 3] {
    costate_rhs_raw(w.to_array(), v, lambda, weights, params)
}

pub(crate) fn costate_rhs_raw(
    w: [f64; 3],
    v: f64,
    lambda: [f64; 3],
    weights: &CostWeights,
    params: &GameParams,
) -> [f64; 3] {
    let jac = jacobian_raw(w, v, params);
    let target = weights.w_star.to_array();
    let mut rhs = [0.0; 3];
    for k in 0..3 {
        let mut grad = weights.alpha2 * (w[k] - target[k]);
        if k == 1 {
            grad += weights.alpha4 * v * v * w[1];
        }
        // Transposed Jacobian action: column k dotted with lambda.
        for i in 0..3 {
            grad += jac[i][k] * lambda[i];
        }
        rhs[k] = -grad;
    }
    rhs
}

/// The control Hamiltonian, running cost plus costate-weighted dynamics.
pub fn hamiltonian(
    w: &SimplexState,
    v: f64,
    lambda: [f64; 3],
    weights: &CostWeights,
    params: &GameParams,
) -> f64 {
    let f = field_raw(w.to_array(), v, params);
    running_cost(w, v, weights) + lambda[0] * f[0] + lambda[1] * f[1] + lambda[2] * f[2]
}

/// Partial derivative of the Hamiltonian in the control,
/// `H_v = α₃ v + α₄ v y² + λ·f_v`. Zero at interior optimal controls.
pub fn hamiltonian_v(
    w: &SimplexState,
    v: f64,
    lambda: [f64; 3],
    weights: &CostWeights,
    params: &GameParams,
) -> f64 {
    let fv = control_sensitivity_raw(w.to_array(), params);
    weights.alpha3 * v
        + weights.alpha4 * v * w.y * w.y
        + lambda[0] * fv[0]
        + lambda[1] * fv[1]
        + lambda[2] * fv[2]
}

/// Pointwise minimizer of the Hamiltonian over `v ∈ [0, v_max]`.
///
/// When the curvature `α₃ + α₄ y²` exceeds `bang_bang_epsilon` the
/// unconstrained stationary point is clamped into the box. Otherwise the
/// Hamiltonian is (numerically) linear in `v` and the minimizer sits at the
/// bound opposite to the slope's sign: `v_max` if `λ·f_v < 0`, else `0`.
pub fn pointwise_control_update(
    w: &SimplexState,
    lambda: [f64; 3],
    weights: &CostWeights,
    params: &GameParams,
    bang_bang_epsilon: f64,
) -> f64 {
    let fv = control_sensitivity_raw(w.to_array(), params);
    let slope = lambda[0] * fv[0] + lambda[1] * fv[1] + lambda[2] * fv[2];
    let curvature = weights.alpha3 + weights.alpha4 * w.y * w.y;
    if curvature > bang_bang_epsilon {
        (-slope / curvature).clamp(0.0, weights.v_max)
    } else if slope < 0.0 {
        weights.v_max
    } else {
        0.0
    }
}

/// Backward RK4 sweep of the costate along a state/control pair, from the
/// terminal condition `λ(tf) = α₁ (w(tf) - w*)`. States and controls are
/// interpolated linearly at step midpoints. Returns one multiplier per
/// grid node.
pub fn costate_sweep(
    states: &StateTrajectory,
    control: &ControlTrajectory,
    weights: &CostWeights,
    params: &GameParams,
) -> Result<Vec<[f64; 3]>> {
    weights.validate()?;
    params.validate()?;
    if states.grid() != control.grid() {
        return Err(Error::GridMismatch(format!(
            "states on {:?}, control on {:?}",
            states.grid(),
            control.grid()
        )));
    }

    let grid = states.grid();
    let n = grid.num_nodes();
    let h = -grid.dt();
    let target = weights.w_star.to_array();
    let w_final = states.final_state().to_array();

    let mut lambdas = vec![[0.0; 3]; n];
    let mut lam = [
        weights.alpha1 * (w_final[0] - target[0]),
        weights.alpha1 * (w_final[1] - target[1]),
        weights.alpha1 * (w_final[2] - target[2]),
    ];
    lambdas[n - 1] = lam;

    let add =
        |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    for k in (0..grid.steps).rev() {
        let w_right = states.state(k + 1).to_array();
        let w_left = states.state(k).to_array();
        let w_mid = [
            0.5 * (w_left[0] + w_right[0]),
            0.5 * (w_left[1] + w_right[1]),
            0.5 * (w_left[2] + w_right[2]),
        ];
        let v_right = control.value(k + 1);
        let v_left = control.value(k);
        let v_mid = 0.5 * (v_left + v_right);

        let k1 = costate_rhs_raw(w_right, v_right, lam, weights, params);
        let k2 = costate_rhs_raw(w_mid, v_mid, add(lam, k1, h / 2.0), weights, params);
        let k3 = costate_rhs_raw(w_mid, v_mid, add(lam, k2, h / 2.0), weights, params);
        let k4 = costate_rhs_raw(w_left, v_left, add(lam, k3, h), weights, params);
        for i in 0..3 {
            lam[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        lambdas[k] = lam;
    }
    Ok(lambdas)
}

/// Shared solve preamble: validate everything and build the initial
/// constant control, capped at the box bound.
pub(crate) fn initial_control(
    w0: &SimplexState,
    grid: &crate::grid::TimeGrid,
    weights: &CostWeights,
    params: &GameParams,
    config: &SolverConfig,
) -> Result<ControlTrajectory> {
    w0.validate()?;
    grid.validate()?;
    weights.validate()?;
    params.validate()?;
    config.validate()?;
    ControlTrajectory::constant(*grid, config.initial_control.min(weights.v_max))
}

/// Convergence test shared by both solvers: the accepted step must barely
/// move the cost (relative to `max(1, |J|)`, so costs shrinking toward zero
/// still terminate) and barely move the control.
pub(crate) fn step_converged(
    config: &SolverConfig,
    j_prev: f64,
    j_new: f64,
    max_control_change: f64,
) -> bool {
    (j_prev - j_new).abs() <= config.tol_cost * j_prev.abs().max(1.0)
        && max_control_change <= config.tol_control
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use crate::integrate::integrate_forward;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn defaults() -> GameParams {
        GameParams::default()
    }

    fn random_state(rng: &mut impl Rng) -> SimplexState {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let (u, v) = if u + v > 1.0 {
            (1.0 - u, 1.0 - v)
        } else {
            (u, v)
        };
        SimplexState::new(u, v, 1.0 - u - v).unwrap()
    }

    #[test]
    fn config_defaults_validate_and_bad_values_do_not() {
        SolverConfig::default().validate().unwrap();
        let defaults = SolverConfig::default;
        let bad = [
            SolverConfig {
                theta: 0.0,
                ..defaults()
            },
            SolverConfig {
                theta: 1.5,
                ..defaults()
            },
            SolverConfig {
                max_iters: 0,
                ..defaults()
            },
            SolverConfig {
                tol_cost: 0.0,
                ..defaults()
            },
            SolverConfig {
                initial_control: 1.2,
                ..defaults()
            },
        ];
        for config in bad {
            assert!(config.validate().is_err(), "{config:?}");
        }
    }

    #[test]
    fn costate_rhs_trivial_cases() {
        let params = defaults();
        let weights = CostWeights::new(0.0, 1.0, 0.0, 0.0).unwrap();

        // At the target with zero multiplier nothing drives the costate.
        let rhs = costate_rhs(&SimplexState::COOPERATION, 0.0, [0.0; 3], &weights, &params);
        assert_eq!(rhs, [0.0; 3]);

        // With lambda = 0 only the tracking gradient remains.
        let w = SimplexState::new(0.2, 0.7, 0.1).unwrap();
        let rhs = costate_rhs(&w, 0.3, [0.0; 3], &weights, &params);
        let expect = [-(0.2 - 1.0), -0.7, -0.1];
        for (a, b) in rhs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn costate_rhs_is_minus_state_gradient_of_hamiltonian() {
        let params = defaults();
        let weights = CostWeights {
            alpha1: 0.3,
            alpha2: 0.7,
            alpha3: 0.2,
            alpha4: 0.9,
            w_star: SimplexState::COOPERATION,
            v_max: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0_57_a7_e5);
        let h = 1e-6;
        for _ in 0..100 {
            let w = random_state(&mut rng);
            let v = rng.gen::<f64>();
            let lambda = [
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ];
            let rhs = costate_rhs(&w, v, lambda, &weights, &params);
            for (k, rhs_k) in rhs.iter().enumerate() {
                let mut plus = w;
                let mut minus = w;
                match k {
                    0 => {
                        plus.x += h;
                        minus.x -= h;
                    }
                    1 => {
                        plus.y += h;
                        minus.y -= h;
                    }
                    _ => {
                        plus.z += h;
                        minus.z -= h;
                    }
                }
                let fd = (hamiltonian(&plus, v, lambda, &weights, &params)
                    - hamiltonian(&minus, v, lambda, &weights, &params))
                    / (2.0 * h);
                assert!(
                    (rhs_k + fd).abs() <= 1e-6 * fd.abs().max(1.0),
                    "coordinate {k}: rhs {rhs_k} vs -dH {}",
                    -fd
                );
            }
        }
    }

    #[test]
    fn hamiltonian_reduces_to_running_cost_without_multiplier() {
        let params = defaults();
        let weights = CostWeights::new(0.1, 0.4, 0.3, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let w = random_state(&mut rng);
            let v = rng.gen::<f64>();
            let h = hamiltonian(&w, v, [0.0; 3], &weights, &params);
            assert!((h - running_cost(&w, v, &weights)).abs() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_v_matches_difference_quotient() {
        let params = defaults();
        let weights = CostWeights::new(0.0, 0.04, 0.001, 0.959).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..50 {
            let w = random_state(&mut rng);
            let v = 0.2 + 0.6 * rng.gen::<f64>();
            let lambda = [
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ];
            let hv = hamiltonian_v(&w, v, lambda, &weights, &params);
            let fd = (hamiltonian(&w, v + h, lambda, &weights, &params)
                - hamiltonian(&w, v - h, lambda, &weights, &params))
                / (2.0 * h);
            assert!((hv - fd).abs() <= 1e-8 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn pointwise_update_handles_quadratic_and_linear_branches() {
        let params = defaults();
        let quad = CostWeights::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let w = SimplexState::new(0.2, 0.7, 0.1).unwrap();

        // Zero multiplier, positive curvature: stationary point at zero.
        assert_eq!(
            pointwise_control_update(&w, [0.0; 3], &quad, &params, 1e-12),
            0.0
        );

        // No curvature on the y = 0 edge with alpha4-only weights, and the
        // slope vanishes there too: the bang-bang branch picks zero.
        let a4 = CostWeights::new(0.0, 0.0, 0.0, 1.0).unwrap();
        let edge = SimplexState::new(0.6, 0.0, 0.4).unwrap();
        assert_eq!(
            pointwise_control_update(&edge, [0.2, -0.1, 0.4], &a4, &params, 1e-12),
            0.0
        );

        // Linear Hamiltonian with a negative slope saturates at the bound.
        let a2 = CostWeights::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let fv = crate::dynamics::control_sensitivity(&w, &params).unwrap();
        let lambda = [-fv[0], -fv[1], -fv[2]];
        assert_eq!(
            pointwise_control_update(&w, lambda, &a2, &params, 1e-12),
            1.0
        );

        // Interior stationary point: slope / curvature inside the box.
        let lam_scaled = [-0.1 * fv[0], -0.1 * fv[1], -0.1 * fv[2]];
        let slope: f64 = lam_scaled.iter().zip(fv).map(|(l, f)| l * f).sum();
        let expect = (-slope / (quad.alpha3)).clamp(0.0, 1.0);
        let got = pointwise_control_update(&w, lam_scaled, &quad, &params, 1e-12);
        assert!((got - expect).abs() < 1e-15);
        assert!(got > 0.0 && got < 1.0);
    }

    #[test]
    fn costate_terminal_condition_holds() {
        let params = defaults();
        let weights = CostWeights::new(2.0, 0.1, 0.1, 0.1).unwrap();
        let w0 = SimplexState::new(0.2, 0.7, 0.1).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 50).unwrap();
        let control = ControlTrajectory::constant(grid, 0.4).unwrap();
        let states = integrate_forward(&w0, &control, &params).unwrap();
        let lambdas = costate_sweep(&states, &control, &weights, &params).unwrap();
        let wf = states.final_state();
        let expect = [2.0 * (wf.x - 1.0), 2.0 * wf.y, 2.0 * wf.z];
        assert_eq!(lambdas.len(), grid.num_nodes());
        for (a, b) in lambdas[grid.steps].iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
